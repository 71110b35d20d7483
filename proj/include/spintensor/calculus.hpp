#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "spintensor/canonicalizer.hpp"
#include "spintensor/tensor_ir.hpp"

namespace spintensor {

/// D_index applied to one term by the Leibniz rule. Dummies named like the
/// new index are renamed first; the metric and constants differentiate to zero.
inline std::vector<Term> differentiate_term(Term t, const Index& index) {
  if (dummy_names(t).contains(index.name)) {
    auto used = index_names(t);
    used.insert(index.name);
    t = rename_indices(std::move(t), {{index.name, fresh_index_name(used)}});
  }
  std::vector<Term> out;
  for (std::size_t k = 0; k < t.factors.size(); ++k) {
    if (t.factors[k].role() == TensorRole::metric) continue;
    Term d = t;
    auto& derivs = d.factors[k].derivs;
    derivs.insert(derivs.begin(), index);
    check_term(d);
    out.push_back(std::move(d));
  }
  return out;
}

inline Expr covariant_derivative(const Expr& e, const Index& index) {
  for (const auto& i : e.free()) {
    if (i.name == index.name && i.variance == index.variance)
      throw IndexError("derivative index '" + index.name + "' collides with a free index of the same variance");
  }
  std::vector<Term> ts;
  for (const auto& t : e.terms()) {
    auto d = differentiate_term(t, index);
    ts.insert(ts.end(), d.begin(), d.end());
  }
  return Expr::from_terms(std::move(ts));
}

/// Applies a string of derivatives, outermost first.
inline Expr apply_derivatives(Expr e, const std::vector<Index>& outermost_first) {
  for (auto it = outermost_first.rbegin(); it != outermost_first.rend(); ++it) e = covariant_derivative(e, *it);
  return e;
}

namespace detail {

inline Factor make_factor(const SymbolHandle& s, std::vector<Index> slots) { return Factor{s, {}, std::move(slots)}; }

}  // namespace detail

/// [D_x, D_y] U for a single factor U (derivative indices of U count as slots):
///   lower slot s:  -R^n_{s x y} U(s -> n),   upper slot s:  +R^s_{n x y} U(s -> n),
/// plus i q F_{x y} U for a factor of charge q. `avoid` lists names the
/// generated dummies must not use.
inline std::vector<Term> commutator_terms(const Factor& u, const Index& x, const Index& y, const SymbolTable& table,
                                          std::set<std::string> avoid = {}) {
  std::vector<Term> out;
  const auto riemann = table.role(TensorRole::riemann);
  const auto field_strength = table.role(TensorRole::field_strength);
  Term base{Coefficient(1L), {u}};
  auto names = index_names(base);
  avoid.insert(names.begin(), names.end());
  avoid.insert(x.name);
  avoid.insert(y.name);
  const std::string n = fresh_index_name(avoid, "n");

  if (riemann) {
    const std::size_t nd = u.derivs.size();
    for (std::size_t pos = 0; pos < nd + u.slots.size(); ++pos) {
      Factor v = u;
      Index& s = pos < nd ? v.derivs[pos] : v.slots[pos - nd];
      const Index original = s;
      s.name = n;
      Term t;
      if (original.variance == Variance::lower) {
        t.coeff = Coefficient(-1L);
        t.factors = {detail::make_factor(riemann, {upper(n), original, x, y}), v};
      } else {
        t.coeff = Coefficient(1L);
        t.factors = {detail::make_factor(riemann, {original, lower(n), x, y}), v};
      }
      check_term(t);
      out.push_back(std::move(t));
    }
  }
  if (field_strength && !u.symbol->charge.is_zero()) {
    Term t{Coefficient(Number::imaginary_unit()) * u.symbol->charge,
           {detail::make_factor(field_strength, {x, y}), u}};
    check_term(t);
    out.push_back(std::move(t));
  }
  return out;
}

/// D_{d_0} ... D_{d_{k-1}} [D_{d_k}, D_{d_{k+1}}] applied to the rest of the
/// factor's derivative string: the difference between the factor and the
/// same factor with derivatives k and k+1 swapped.
inline Expr expand_commutator(const Factor& f, std::size_t k, const SymbolTable& table,
                              const std::set<std::string>& avoid = {}) {
  if (k + 1 >= f.derivs.size()) throw IndexError("commutator position outside the derivative string of '" + f.name() + "'");
  Factor inner = f;
  inner.derivs.erase(inner.derivs.begin(), inner.derivs.begin() + static_cast<long>(k) + 2);
  std::set<std::string> used = avoid;
  for (const auto& i : f.derivs) used.insert(i.name);
  for (const auto& i : f.slots) used.insert(i.name);
  const Expr comm = Expr::from_terms(commutator_terms(inner, f.derivs[k], f.derivs[k + 1], table, used));
  const std::vector<Index> outer(f.derivs.begin(), f.derivs.begin() + static_cast<long>(k));
  return apply_derivatives(comm, outer);
}

/// Commutator of the adjacent derivative pair named (c, a); errors when they are not adjacent.
inline Expr expand_commutator(const Factor& f, const std::string& c, const std::string& a, const SymbolTable& table) {
  for (std::size_t k = 0; k + 1 < f.derivs.size(); ++k) {
    if (f.derivs[k].name == c && f.derivs[k + 1].name == a) return expand_commutator(f, k, table);
  }
  throw IndexError("derivative indices '" + c + "', '" + a + "' are not adjacent on '" + f.name() + "'");
}

/// Rewrites term t, swapping derivatives k and k+1 on factor fi:
/// t = t_swapped + (commutator) * (rest of t).
inline std::vector<Term> swap_derivatives(const Term& t, std::size_t fi, std::size_t k, const SymbolTable& table) {
  std::vector<Term> out;
  Term swapped = t;
  std::swap(swapped.factors[fi].derivs[k], swapped.factors[fi].derivs[k + 1]);
  out.push_back(swapped);
  const auto all = index_names(t);
  const Expr comm = expand_commutator(t.factors[fi], k, table, all);
  Term rest{t.coeff, {}};
  for (std::size_t j = 0; j < t.factors.size(); ++j) {
    if (j != fi) rest.factors.push_back(t.factors[j]);
  }
  for (const auto& c : comm.terms()) {
    Term p = c;
    p.coeff = p.coeff * rest.coeff;
    p.factors.insert(p.factors.end(), rest.factors.begin(), rest.factors.end());
    check_term(p);
    out.push_back(std::move(p));
  }
  return out;
}

namespace detail {

/// Sort key of a derivative index inside its term. Free indices come first
/// (by name), then dummies contracted into the same factor's slots (by slot),
/// then dummies contracted with other factors, then dummies contracted within
/// the derivative string (kept in place).
using DerivRank = std::tuple<int, std::string, int>;

inline DerivRank deriv_rank(const Term& t, std::size_t fi, std::size_t k) {
  const Index& idx = t.factors[fi].derivs[k];
  for (std::size_t j = 0; j < t.factors.size(); ++j) {
    const Factor& f = t.factors[j];
    for (std::size_t p = 0; p < f.derivs.size(); ++p) {
      if (j == fi && p == k) continue;
      if (f.derivs[p].name != idx.name) continue;
      if (j == fi) return {3, "", static_cast<int>(k)};
      return {2, f.name() + "/" + std::to_string(f.derivs.size()) + "/d" + std::to_string(p), 0};
    }
    for (std::size_t p = 0; p < f.slots.size(); ++p) {
      if (f.slots[p].name != idx.name) continue;
      if (j == fi) return {1, "", static_cast<int>(p)};
      return {2, f.name() + "/" + std::to_string(f.derivs.size()) + "/s" + std::to_string(p), 0};
    }
  }
  return {0, idx.name, 0};
}

inline void normal_order_term(const Term& t, const SymbolTable& table, std::vector<Term>& out) {
  for (std::size_t fi = 0; fi < t.factors.size(); ++fi) {
    const auto& derivs = t.factors[fi].derivs;
    for (std::size_t k = 0; k + 1 < derivs.size(); ++k) {
      if (deriv_rank(t, fi, k) > deriv_rank(t, fi, k + 1)) {
        for (const auto& r : swap_derivatives(t, fi, k, table)) normal_order_term(r, table, out);
        return;
      }
    }
  }
  out.push_back(t);
}

}  // namespace detail

/// Sorts every derivative string into the fixed order of detail::deriv_rank,
/// emitting commutator terms for each transposition. Not canonicalized.
inline Expr normal_order(const Expr& e, const SymbolTable& table) {
  std::vector<Term> out;
  for (const auto& t : e.terms()) detail::normal_order_term(t, table, out);
  return Expr::from_terms(std::move(out));
}

/// Replaces self-contracted Riemann factors by the Ricci symbol, with
/// R_{bd} = sign * g^{ac} R_{abcd}. Contractions of an antisymmetric pair vanish.
inline Expr rewrite_ricci(const Expr& e, const SymbolTable& table, int sign = 1) {
  const auto ricci = table.role(TensorRole::ricci);
  if (!ricci) throw SymbolError("no tensor with the ricci role is declared");
  std::vector<Term> out;
  for (auto t : e.terms()) {
    bool vanished = false;
    for (auto& f : t.factors) {
      if (f.role() != TensorRole::riemann) continue;
      const auto& s = f.slots;
      auto contracted = [&](int i, int j) { return s[static_cast<std::size_t>(i)].name == s[static_cast<std::size_t>(j)].name; };
      if (contracted(0, 1) || contracted(2, 3)) {
        vanished = true;
        break;
      }
      int rel = 0;
      std::vector<Index> rest;
      if (contracted(0, 2)) {
        rel = 1;
        rest = {s[1], s[3]};
      } else if (contracted(1, 3)) {
        rel = 1;
        rest = {s[0], s[2]};
      } else if (contracted(0, 3)) {
        rel = -1;
        rest = {s[1], s[2]};
      } else if (contracted(1, 2)) {
        rel = -1;
        rest = {s[0], s[3]};
      }
      if (rel == 0) continue;
      f = Factor{ricci, f.derivs, rest};
      t.coeff = t.coeff * Coefficient(static_cast<long>(rel * sign));
    }
    if (!vanished) out.push_back(std::move(t));
  }
  return Expr::from_terms(std::move(out));
}

/// Opt-in first Bianchi pass: R_{p q r s} with q holding the largest index
/// (by canonical position among slots 2..4) becomes -R_{p r s q} - R_{p s q r}.
/// Iterates to a fixed point within a bounded number of rounds.
inline Expr bianchi_pass(const Expr& e, const SymbolTable& table, int rounds = 4) {
  Expr cur = canonicalize(e, table).expr;
  for (int round = 0; round < rounds; ++round) {
    bool changed = false;
    std::vector<Term> out;
    for (const auto& t : cur.terms()) {
      std::size_t target = t.factors.size();
      for (std::size_t k = 0; k < t.factors.size(); ++k) {
        const auto& f = t.factors[k];
        if (f.role() != TensorRole::riemann || f.symbol->cyclic_triples.empty()) continue;
        const auto& s = f.slots;
        if (s[1].name > s[2].name && s[1].name > s[3].name) {
          target = k;
          break;
        }
      }
      if (target == t.factors.size()) {
        out.push_back(t);
        continue;
      }
      changed = true;
      const auto& s = t.factors[target].slots;
      for (const auto& perm : {std::vector<Index>{s[0], s[2], s[3], s[1]}, std::vector<Index>{s[0], s[3], s[1], s[2]}}) {
        Term r = t;
        r.coeff = -r.coeff;
        r.factors[target].slots = perm;
        out.push_back(std::move(r));
      }
    }
    cur = canonicalize(Expr::from_terms(std::move(out)), table).expr;
    if (!changed) break;
  }
  return cur;
}

enum class ProjectMode { symmetrize, antisymmetrize, traceless_symmetrize };

namespace detail {

inline int permutation_sign(const std::vector<int>& p) {
  int sign = 1;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      if (p[i] > p[j]) sign = -sign;
    }
  }
  return sign;
}

inline Index find_free(const Expr& e, const std::string& name) {
  for (const auto& i : e.free()) {
    if (i.name == name) return i;
  }
  throw IndexError("index '" + name + "' is not free in the projected expression");
}

/// Contraction of indices a and b of e with g_{ab}-type reinsertion:
/// returns g_{a b} * (e with a, b traced).
inline Expr trace_back(const Expr& e, const Index& a, const Index& b, const SymbolTable& table) {
  const auto metric = table.role(TensorRole::metric);
  if (!metric) throw SymbolError("no tensor with the metric role is declared");
  std::set<std::string> used;
  for (const auto& t : e.terms()) {
    auto n = index_names(t);
    used.insert(n.begin(), n.end());
  }
  const std::string m1 = fresh_index_name(used, "y");
  used.insert(m1);
  const std::string m2 = fresh_index_name(used, "y");
  const Expr traced = relabel(e, {{a.name, m1}, {b.name, m2}});
  const Expr inverse(Term{Coefficient(1L), {Factor{metric, {}, {Index{m1, flipped(a.variance)}, Index{m2, flipped(b.variance)}}}}});
  const Expr outer(Term{Coefficient(1L), {Factor{metric, {}, {a, b}}}});
  return outer * inverse * traced;
}

}  // namespace detail

/// Symmetrization over the listed free indices. Sym/antisym average over
/// permutations; traceless mode takes (1/(k-1)!) * sum and removes traces
/// (rank 2 and 3 only).
inline Expr project(const Expr& e, ProjectMode mode, const std::vector<std::string>& names, const SymbolTable& table) {
  std::vector<Index> idx;
  for (const auto& n : names) idx.push_back(detail::find_free(e, n));
  const int k = static_cast<int>(idx.size());
  if (k == 0) return e;
  std::vector<int> p(static_cast<std::size_t>(k));
  std::iota(p.begin(), p.end(), 0);
  Expr sum;
  long count = 0;
  do {
    std::map<std::string, std::string> ren;
    for (int j = 0; j < k; ++j) ren[names[static_cast<std::size_t>(j)]] = names[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])];
    const int sign = mode == ProjectMode::antisymmetrize ? detail::permutation_sign(p) : 1;
    sum = sum + scale(relabel(e, ren), Coefficient(static_cast<long>(sign)));
    ++count;
  } while (std::next_permutation(p.begin(), p.end()));
  if (mode != ProjectMode::traceless_symmetrize) return scale(sum, Coefficient(ratio(1, count)));

  if (k != 2 && k != 3) throw IndexError("traceless symmetrization is implemented for two or three indices");
  const Expr s = scale(sum, Coefficient(ratio(k, count)));
  const long d = table.dimension();
  if (k == 2) return s - scale(detail::trace_back(s, idx[0], idx[1], table), Coefficient(ratio(1, d)));
  Expr traces;
  for (auto [i, j] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}}) {
    traces = traces + detail::trace_back(s, idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)], table);
  }
  return s - scale(traces, Coefficient(ratio(1, d + 2)));
}

/// Drops every term containing one of the named tensors (flat or neutral backgrounds).
inline Expr set_to_zero(const Expr& e, const std::set<std::string>& names) {
  std::vector<Term> out;
  for (const auto& t : e.terms()) {
    bool hit = std::any_of(t.factors.begin(), t.factors.end(), [&](const Factor& f) { return names.contains(f.name()); });
    if (!hit) out.push_back(t);
  }
  return Expr::from_terms(std::move(out));
}

}  // namespace spintensor
