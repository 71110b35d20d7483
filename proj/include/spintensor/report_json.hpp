#pragma once

#include <json.hpp>

#include "spintensor/derivation.hpp"
#include "spintensor/lambda.hpp"
#include "spintensor/printer.hpp"

namespace spintensor {

/// Structured report. Timing fields ("ms") are the only run-dependent values.
inline nlohmann::ordered_json report_json(const Report& r, bool timings = true) {
  nlohmann::ordered_json j;
  j["passed"] = r.passed;
  j["exit_code"] = r.exit_code();
  j["assertions"] = r.assertions;
  if (!r.passed) j["failed_step"] = r.failed_step;
  j["ricci_convention"] = r.ricci_convention;
  j["final"] = r.final_term;
  j["notes"] = r.notes;
  auto& steps = j["steps"] = nlohmann::ordered_json::array();
  for (const auto& s : r.steps) {
    nlohmann::ordered_json e;
    e["line"] = s.line;
    e["name"] = s.name;
    e["command"] = s.command;
    e["status"] = s.status;
    if (!s.detail.empty()) e["detail"] = s.detail;
    if (!s.residue.empty()) e["residue"] = s.residue;
    if (timings) e["ms"] = s.ms;
    steps.push_back(std::move(e));
  }
  return j;
}

inline nlohmann::ordered_json assignment_json(const LambdaAssignment& a) {
  nlohmann::ordered_json j;
  auto& v = j["lambdas"] = nlohmann::ordered_json::object();
  for (int k = 1; k <= 12; ++k) v["lam" + std::to_string(k)] = print_coefficient(a.at(k));
  j["mu"] = print_coefficient(a.at(9) * a.at(12));
  j["lam1 lam4 + lam2 lam6"] = print_coefficient(a.composite_p());
  j["lam3 lam7 + lam5 lam8"] = print_coefficient(a.composite_s());
  j["product"] = print_coefficient(a.composite_p() * a.composite_s());
  j["failed_relations"] = failed_relations(a);
  return j;
}

}  // namespace spintensor
