#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "spintensor/derivation.hpp"
#include "spintensor/suite_text.hpp"  // generated from data/reduction_suite.tsc

namespace spintensor {

inline std::string builtin_suite_text() { return std::string(detail::kSuiteText); }

/// A single-token edit of one step of the builtin suite.
struct Mutation {
  std::string name;
  std::string step;
  std::string from;
  std::string to;
  std::string description;
  std::string expected_failure;  ///< first step that must fail
};

inline const std::vector<Mutation>& mutations() {
  static const std::vector<Mutation> kAll = {
      {"flip-ricci-comm", "comm_rhs", "+ Ric_{ac} tPhiS^{c}_{b}", "- Ric_{ac} tPhiS^{c}_{b}",
       "sign of the Ricci term in the charged commutator", "derive_comm"},
      {"drop-ricci-comm", "comm_rhs", " + Ric_{ac} tPhiS^{c}_{b}", "", "Ricci term removed from the charged commutator",
       "derive_comm"},
      {"flip-riemann-gravity", "comm_gravity_rhs", "R_{cabn} tPhiS^{cn}", "-R_{cabn} tPhiS^{cn}",
       "sign of the Riemann term in the neutral commutator", "derive_comm_gravity"},
      {"flip-f-mu-term", "mu_term_rhs", "mu/M i e", "-mu/M i e", "sign of the field-strength coupling", "derive_mu_term"},
      {"printed-identity", "identity_last", "- 1/2 D^{c} D_{a} PsiS_{bc}", "- 1/3 D^{c} D_{a} PsiS_{bc}",
       "bracket identity with the printed -1/3 coefficient", "identity_second_form"},
  };
  return kAll;
}

inline const Mutation& find_mutation(const std::string& name) {
  for (const auto& m : mutations()) {
    if (m.name == name) return m;
  }
  std::string known;
  for (const auto& m : mutations()) known += (known.empty() ? "" : ", ") + m.name;
  throw Error("unknown mutation '" + name + "' (known: " + known + ")");
}

/// Applies m to the step it names; the edit must match inside that step.
inline std::string apply_mutation(std::string text, const Mutation& m) {
  for (const auto& logical : detail::logical_lines(text)) {
    const std::string body = detail::trim(logical.text);
    if (body.rfind(m.step, 0) != 0) continue;
    const std::string rest = detail::trim(std::string_view(body).substr(m.step.size()));
    if (rest.empty() || rest.front() != ':') continue;
    const std::size_t at = std::string_view(text).substr(logical.offset, logical.text.size()).find(m.from);
    if (at == std::string_view::npos) throw Error("mutation '" + m.name + "' does not match step '" + m.step + "'");
    text.replace(logical.offset + at, m.from.size(), m.to);
    return text;
  }
  throw Error("mutation '" + m.name + "' names a missing step '" + m.step + "'");
}

inline std::string suite_text(const std::vector<std::string>& mutation_names = {}) {
  std::string text = builtin_suite_text();
  for (const auto& n : mutation_names) text = apply_mutation(std::move(text), find_mutation(n));
  return text;
}

inline Report builtin_paper_suite(const std::vector<std::string>& mutation_names = {}, EngineOptions opt = {}) {
  return run_script(suite_text(mutation_names), standard_symbols(), std::move(opt));
}

}  // namespace spintensor
