#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "spintensor/tensor_ir.hpp"

namespace spintensor {

/// Exact values for lam1..lam12, possibly depending on the free parameter mu.
struct LambdaAssignment {
  std::map<std::string, Coefficient> values;

  [[nodiscard]] Coefficient apply(const Coefficient& c) const { return c.substitute(values); }

  [[nodiscard]] Expr apply(const Expr& e) const {
    std::vector<Term> ts;
    for (const auto& t : e.terms()) ts.push_back(Term{apply(t.coeff), t.factors});
    return Expr::from_terms(std::move(ts));
  }

  [[nodiscard]] const Coefficient& at(int k) const { return values.at("lam" + std::to_string(k)); }

  /// lam1 lam4 + lam2 lam6
  [[nodiscard]] Coefficient composite_p() const { return at(1) * at(4) + at(2) * at(6); }
  /// lam3 lam7 + lam5 lam8
  [[nodiscard]] Coefficient composite_s() const { return at(3) * at(7) + at(5) * at(8); }
};

namespace detail {

inline Coefficient lam(int k) { return Coefficient::symbol("lam" + std::to_string(k)); }

}  // namespace detail

/// The four quadratic restrictions on the lambdas, written as "expression = 0",
/// plus the definition of mu as lam9 lam12.
inline std::vector<std::pair<std::string, Coefficient>> lambda_relations(bool with_mu = true) {
  using detail::lam;
  std::vector<std::pair<std::string, Coefficient>> r = {
      {"2 lam10 lam11 - (2/3) lam9 lam12 - 1",
       Coefficient(2L) * lam(10) * lam(11) - Coefficient::fraction(2, 3) * lam(9) * lam(12) - Coefficient(1L)},
      {"lam4 lam7 + lam6 lam8 + (8/9) lam9 lam12 - 1/3",
       lam(4) * lam(7) + lam(6) * lam(8) + Coefficient::fraction(8, 9) * lam(9) * lam(12) - Coefficient::fraction(1, 3)},
      {"lam1 lam3 + lam2 lam5 + 1/4", lam(1) * lam(3) + lam(2) * lam(5) + Coefficient::fraction(1, 4)},
      {"(lam1 lam4 + lam2 lam6)(lam3 lam7 + lam5 lam8) + 1/12",
       (lam(1) * lam(4) + lam(2) * lam(6)) * (lam(3) * lam(7) + lam(5) * lam(8)) + Coefficient::fraction(1, 12)},
  };
  if (with_mu) r.emplace_back("lam9 lam12 - mu", lam(9) * lam(12) - Coefficient::symbol("mu"));
  return r;
}

/// Relations that do not reduce to exactly zero under the assignment.
inline std::vector<std::string> failed_relations(const LambdaAssignment& a) {
  std::vector<std::string> out;
  for (const auto& [name, rel] : lambda_relations()) {
    if (!a.apply(rel).is_zero()) out.push_back(name);
  }
  return out;
}

namespace detail {

/// Value of the single unknown lambda in a relation linear in it, if any.
inline std::optional<std::pair<std::string, Coefficient>> solve_single(const Coefficient& rel,
                                                                       const std::map<std::string, Coefficient>& known) {
  const Coefficient r = rel.substitute(known);
  std::set<std::string> unknown;
  for (const auto& v : r.variables()) {
    if (v.rfind("lam", 0) == 0) unknown.insert(v);
  }
  if (unknown.size() != 1) return std::nullopt;
  const std::string x = *unknown.begin();
  if (!r.is_polynomial() || r.numerator().degree(x) != 1) return std::nullopt;
  const Coefficient a(r.numerator().coefficient(x, 1));
  const Coefficient b(r.numerator().coefficient(x, 0));
  if (a.is_zero()) return std::nullopt;
  return std::pair{x, -b / a};
}

}  // namespace detail

/// Completes a partial choice of lambdas to an exact assignment obeying every
/// relation, with mu = lam9 lam12 left free (or fixed when "mu" is chosen).
///
/// Relations with a single linear unknown are solved first; otherwise the next
/// default pivot (lam12 = 1, lam11 = 1, lam2 = 0, lam5 = 0, lam1 = 1, lam4 = 1,
/// lam8 = 1, lam6 = 0, then any remaining lambda = 1) is set.
inline LambdaAssignment lambda_solve(const std::map<std::string, Coefficient>& choices = {}) {
  std::map<std::string, Coefficient> known;
  std::optional<Coefficient> mu_value;
  for (const auto& [k, v] : choices) {
    if (k == "mu") {
      mu_value = v;
      continue;
    }
    bool valid = false;
    for (int j = 1; j <= 12; ++j) valid = valid || k == "lam" + std::to_string(j);
    if (!valid) throw DerivationError("unknown lambda '" + k + "'");
    known[k] = v;
  }
  const auto relations = lambda_relations();
  static const std::vector<std::pair<std::string, long>> kPivots = {{"lam12", 1}, {"lam11", 1}, {"lam2", 0}, {"lam5", 0},
                                                                    {"lam1", 1},  {"lam4", 1},  {"lam8", 1}, {"lam6", 0}};
  std::size_t next_pivot = 0;
  while (known.size() < 12) {
    bool progress = false;
    for (const auto& [name, rel] : relations) {
      if (auto s = detail::solve_single(rel, known)) {
        known[s->first] = s->second;
        progress = true;
      }
    }
    if (progress) continue;
    while (next_pivot < kPivots.size() && known.contains(kPivots[next_pivot].first)) ++next_pivot;
    if (next_pivot < kPivots.size()) {
      known[kPivots[next_pivot].first] = Coefficient(kPivots[next_pivot].second);
      continue;
    }
    for (int j = 1; j <= 12; ++j) {
      if (!known.contains("lam" + std::to_string(j))) {
        known["lam" + std::to_string(j)] = Coefficient(1L);
        break;
      }
    }
  }
  if (mu_value) {
    for (auto& [k, v] : known) v = v.substitute({{"mu", *mu_value}});
  }
  LambdaAssignment a{known};
  std::map<std::string, Coefficient> mu_map;
  if (mu_value) mu_map["mu"] = *mu_value;
  for (const auto& [name, rel] : relations) {
    if (!a.apply(rel).substitute(mu_map).is_zero())
      throw DerivationError("inconsistent lambda choices: relation '" + name + "' does not vanish");
  }
  if ((a.at(1) * a.at(8) - a.at(2) * a.at(7)).is_zero())
    throw DerivationError("lambda choices make the B/C change of variables singular (lam1 lam8 - lam2 lam7 = 0)");
  if (a.composite_p().is_zero()) throw DerivationError("lambda choices give lam1 lam4 + lam2 lam6 = 0");
  return a;
}

}  // namespace spintensor
