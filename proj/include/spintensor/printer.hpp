#pragma once

#include <string>
#include <vector>

#include "spintensor/tensor_ir.hpp"

namespace spintensor {

namespace detail {

/// One rational multiple of a basis element of Q(i, sqrt2, sqrt3) times a monomial.
struct AtomicTerm {
  Rational value;
  int basis = 0;
  Monomial monomial;
};

inline std::vector<AtomicTerm> atomic_terms(const Polynomial& p) {
  std::vector<AtomicTerm> out;
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    for (int k = 0; k < Number::kBasis; ++k) {
      const Rational& c = it->second.component(k);
      if (sgn(c) != 0) out.push_back({c, k, it->first});
    }
  }
  return out;
}

/// Unsigned rendering: "2", "(1/2)*i*sqrt2*mu*mu", "lam1".
inline std::string atomic_magnitude(const AtomicTerm& a) {
  std::vector<std::string> atoms;
  const Rational mag = abs(a.value);
  const bool bare = a.basis == 0 && a.monomial.is_one();
  if (mag != 1 || bare) atoms.push_back(mag.get_den() == 1 ? mag.get_str() : "(" + mag.get_str() + ")");
  if (a.basis & Number::kImag) atoms.emplace_back("i");
  if (a.basis & Number::kSqrt2) atoms.emplace_back("sqrt2");
  if (a.basis & Number::kSqrt3) atoms.emplace_back("sqrt3");
  for (const auto& [v, e] : a.monomial.powers()) {
    for (unsigned k = 0; k < e; ++k) atoms.push_back(v);
  }
  std::string s;
  for (const auto& x : atoms) s += (s.empty() ? "" : "*") + x;
  return s;
}

inline std::string print_polynomial(const Polynomial& p) {
  const auto atoms = atomic_terms(p);
  if (atoms.empty()) return "0";
  std::string s;
  for (const auto& a : atoms) {
    const bool neg = sgn(a.value) < 0;
    if (s.empty()) {
      s += neg ? "-" : "";
    } else {
      s += neg ? " - " : " + ";
    }
    const bool bare = a.basis == 0 && a.monomial.is_one();
    s += bare ? mpq_class(abs(a.value)).get_str() : atomic_magnitude(a);
  }
  return s;
}

/// Splits a coefficient into a sign and an unsigned multiplier text ("" for 1).
inline std::pair<bool, std::string> signed_coefficient(const Coefficient& c) {
  const auto num = atomic_terms(c.numerator());
  if (c.denominator().is_one() && num.size() == 1) {
    const std::string mag = atomic_magnitude(num[0]);
    return {sgn(num[0].value) < 0, mag == "1" ? "" : mag};
  }
  const bool neg = sgn(num.front().value) < 0;
  const Polynomial n = neg ? -c.numerator() : c.numerator();
  std::string s = "(" + print_polynomial(n) + ")";
  if (!c.denominator().is_one()) s += "/(" + print_polynomial(c.denominator()) + ")";
  return {neg, s};
}

inline std::string print_index_groups(const std::vector<Index>& is) {
  std::string s;
  for (std::size_t k = 0; k < is.size();) {
    std::size_t e = k;
    std::string group;
    while (e < is.size() && is[e].variance == is[k].variance) {
      group += (group.empty() ? "" : " ") + is[e].name;
      ++e;
    }
    s += (is[k].variance == Variance::upper ? "^{" : "_{") + group + "}";
    k = e;
  }
  return s;
}

}  // namespace detail

inline std::string print_coefficient(const Coefficient& c) {
  if (c.is_zero()) return "0";
  if (c.denominator().is_one()) return detail::print_polynomial(c.numerator());
  auto [neg, mag] = detail::signed_coefficient(c);
  return (neg ? "-" : "") + (mag.empty() ? std::string("1") : mag);
}

inline std::string print_factor(const Factor& f) {
  std::string s;
  for (const auto& d : f.derivs) s += std::string("D") + (d.variance == Variance::upper ? "^{" : "_{") + d.name + "} ";
  return s + f.name() + detail::print_index_groups(f.slots);
}

/// Unsigned body of a term together with its sign.
inline std::pair<bool, std::string> print_term_parts(const Term& t) {
  auto [neg, s] = detail::signed_coefficient(t.coeff);
  for (const auto& f : t.factors) s += (s.empty() ? "" : "*") + print_factor(f);
  if (s.empty()) s = "1";
  return {neg, s};
}

inline std::string print_term(const Term& t) {
  auto [neg, s] = print_term_parts(t);
  return (neg ? "-" : "") + s;
}

/// Deterministic text such as "-(1/2)*g_{a b}*D^{c} Phi_{c}"; the empty sum prints "0".
inline std::string print_expr(const Expr& e) {
  if (e.is_empty()) return "0";
  std::string s;
  for (const auto& t : e.terms()) {
    auto [neg, body] = print_term_parts(t);
    if (s.empty()) {
      s += neg ? "-" : "";
    } else {
      s += neg ? " - " : " + ";
    }
    s += body;
  }
  return s;
}

}  // namespace spintensor
