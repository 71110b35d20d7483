#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "spintensor/tensor_ir.hpp"

namespace spintensor {

/// Canonical representative of an expression. `certified` records that every
/// term was minimized by exhaustive search over its symmetry orbit.
struct CanonicalExpr {
  Expr expr;
  bool certified = true;
};

namespace detail {

/// Names handed to dummies in canonical output, skipping any free name.
inline std::vector<std::string> dummy_pool(const std::set<std::string>& free_names, std::size_t count) {
  static const char* kPool[] = {"m", "n", "p", "q", "r", "s", "t", "u", "v", "w", "x", "y", "z", "k", "l", "h", "j"};
  std::vector<std::string> out;
  for (const char* n : kPool) {
    if (out.size() == count) return out;
    if (!free_names.contains(n)) out.emplace_back(n);
  }
  for (int k = 1; out.size() < count; ++k) {
    std::string n = "d" + std::to_string(k);
    if (!free_names.contains(n)) out.push_back(n);
  }
  return out;
}

/// Absorbs metric factors into neighbours; returns false if the term vanishes.
inline bool absorb_metrics(Term& t, int dimension) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t fi = 0; fi < t.factors.size() && !changed; ++fi) {
      const Factor& g = t.factors[fi];
      if (g.role() != TensorRole::metric) continue;
      if (!g.derivs.empty()) return false;
      const Index s0 = g.slots[0];
      const Index s1 = g.slots[1];
      if (s0.name == s1.name) {
        t.coeff = t.coeff * Coefficient(static_cast<long>(dimension));
        t.factors.erase(t.factors.begin() + static_cast<long>(fi));
        changed = true;
        break;
      }
      for (int k = 0; k < 2 && !changed; ++k) {
        const Index& here = k == 0 ? s0 : s1;
        const Index& other = k == 0 ? s1 : s0;
        for (std::size_t fj = 0; fj < t.factors.size() && !changed; ++fj) {
          if (fj == fi) continue;
          auto replace_in = [&](std::vector<Index>& v) {
            for (auto& idx : v) {
              if (idx.name == here.name) {
                idx = other;
                return true;
              }
            }
            return false;
          };
          if (replace_in(t.factors[fj].derivs) || replace_in(t.factors[fj].slots)) {
            t.factors.erase(t.factors.begin() + static_cast<long>(fi));
            changed = true;
          }
        }
      }
    }
  }
  return true;
}

inline bool has_vanishing_trace(const Factor& f) {
  if (f.symbol->identically_zero) return true;
  for (const auto& [i, j] : f.symbol->vanishing_traces) {
    if (f.slots[static_cast<std::size_t>(i)].name == f.slots[static_cast<std::size_t>(j)].name) return true;
  }
  return false;
}

struct Arrangement {
  std::vector<std::size_t> order;                 // factor positions
  std::vector<const SignedPermutation*> perms;    // per arranged factor
};

class TermCanonicalizer {
 public:
  explicit TermCanonicalizer(const Term& t) : term_(t) {
    for (const auto& i : free_indices(t)) free_rank_[i.name] = static_cast<int>(free_rank_.size());
  }

  /// nullopt when the term vanishes by symmetry.
  std::optional<Term> run() {
    std::vector<std::size_t> order(term_.factors.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const auto& fa = term_.factors[a];
      const auto& fb = term_.factors[b];
      if (fa.name() != fb.name()) return fa.name() < fb.name();
      return fa.derivs.size() < fb.derivs.size();
    });
    for (std::size_t k = 0; k < order.size();) {
      std::size_t e = k + 1;
      while (e < order.size() && same_key(order[k], order[e])) ++e;
      blocks_.emplace_back(k, e);
      k = e;
    }
    current_.order = order;
    current_.perms.assign(order.size(), nullptr);
    permute_blocks(0);
    if (vanishes_) return std::nullopt;
    return build();
  }

 private:
  bool same_key(std::size_t a, std::size_t b) const {
    return term_.factors[a].name() == term_.factors[b].name() &&
           term_.factors[a].derivs.size() == term_.factors[b].derivs.size();
  }

  void permute_blocks(std::size_t block) {
    if (block == blocks_.size()) {
      choose_elements(0, 1);
      return;
    }
    auto [b, e] = blocks_[block];
    std::vector<std::size_t> members(current_.order.begin() + static_cast<long>(b),
                                     current_.order.begin() + static_cast<long>(e));
    std::sort(members.begin(), members.end());
    do {
      std::copy(members.begin(), members.end(), current_.order.begin() + static_cast<long>(b));
      permute_blocks(block + 1);
    } while (std::next_permutation(members.begin(), members.end()));
  }

  void choose_elements(std::size_t pos, int sign) {
    if (pos == current_.order.size()) {
      evaluate(sign);
      return;
    }
    for (const auto& p : term_.factors[current_.order[pos]].symbol->group) {
      current_.perms[pos] = &p;
      choose_elements(pos + 1, sign * p.sign);
    }
  }

  std::vector<Index> arranged_indices(const Arrangement& a) const {
    std::vector<Index> out;
    for (std::size_t pos = 0; pos < a.order.size(); ++pos) {
      const Factor& f = term_.factors[a.order[pos]];
      out.insert(out.end(), f.derivs.begin(), f.derivs.end());
      for (int src : a.perms[pos]->image) out.push_back(f.slots[static_cast<std::size_t>(src)]);
    }
    return out;
  }

  std::vector<int> encode(const std::vector<Index>& flat) const {
    std::vector<int> code;
    code.reserve(flat.size());
    std::map<std::string, int> dummy_number;
    for (const auto& i : flat) {
      if (auto it = free_rank_.find(i.name); it != free_rank_.end()) {
        code.push_back(2 * it->second + (i.variance == Variance::upper ? 1 : 0));
        continue;
      }
      auto [dit, first] = dummy_number.emplace(i.name, static_cast<int>(dummy_number.size()));
      code.push_back(1000 + 2 * dit->second + (first ? 0 : 1));
    }
    return code;
  }

  void evaluate(int sign) {
    auto code = encode(arranged_indices(current_));
    if (!have_best_ || code < best_code_) {
      have_best_ = true;
      best_code_ = std::move(code);
      best_sign_ = sign;
      best_ = current_;
      vanishes_ = false;
    } else if (code == best_code_ && sign != best_sign_) {
      vanishes_ = true;
    }
  }

  Term build() const {
    std::set<std::string> free_names;
    for (const auto& [n, r] : free_rank_) free_names.insert(n);
    const auto flat = arranged_indices(best_);
    std::size_t dummies = 0;
    for (const auto& i : flat) dummies += free_rank_.contains(i.name) ? 0 : 1;
    const auto pool = dummy_pool(free_names, dummies / 2);
    std::map<std::string, std::string> dummy_name;
    Term out;
    out.coeff = term_.coeff * Coefficient(static_cast<long>(best_sign_));
    auto rename = [&](Index i) {
      if (free_rank_.contains(i.name)) return i;
      auto it = dummy_name.find(i.name);
      if (it == dummy_name.end()) {
        it = dummy_name.emplace(i.name, pool[dummy_name.size()]).first;
        return Index{it->second, Variance::lower};
      }
      return Index{it->second, Variance::upper};
    };
    for (std::size_t pos = 0; pos < best_.order.size(); ++pos) {
      const Factor& f = term_.factors[best_.order[pos]];
      Factor g{f.symbol, {}, {}};
      for (const auto& i : f.derivs) g.derivs.push_back(rename(i));
      for (int src : best_.perms[pos]->image) g.slots.push_back(rename(f.slots[static_cast<std::size_t>(src)]));
      out.factors.push_back(std::move(g));
    }
    return out;
  }

  const Term& term_;
  std::map<std::string, int> free_rank_;
  std::vector<std::pair<std::size_t, std::size_t>> blocks_;
  Arrangement current_;
  Arrangement best_;
  std::vector<int> best_code_;
  int best_sign_ = 1;
  bool have_best_ = false;
  bool vanishes_ = false;
};

/// Sort key: symbol names, derivative counts and index pattern of a canonical term.
inline std::string term_key(const Term& t) {
  std::string key;
  for (const auto& f : t.factors) {
    key += f.name();
    key += '\x1f';
    key += static_cast<char>('0' + f.derivs.size());
    for (const auto& i : f.derivs) key += (i.variance == Variance::upper ? "^" : "_") + i.name + ",";
    key += '|';
    for (const auto& i : f.slots) key += (i.variance == Variance::upper ? "^" : "_") + i.name + ",";
    key += '\x1e';
  }
  return key;
}

}  // namespace detail

/// Canonical form of one term, or nullopt when it vanishes.
inline std::optional<Term> canonicalize_term(Term t, int dimension) {
  if (t.coeff.is_zero()) return std::nullopt;
  if (!detail::absorb_metrics(t, dimension)) return std::nullopt;
  for (const auto& f : t.factors) {
    if (detail::has_vanishing_trace(f)) return std::nullopt;
  }
  return detail::TermCanonicalizer(t).run();
}

inline CanonicalExpr canonicalize(const Expr& e, int dimension) {
  std::map<std::string, Term> merged;
  for (const auto& t : e.terms()) {
    auto c = canonicalize_term(t, dimension);
    if (!c) continue;
    auto key = detail::term_key(*c);
    auto [it, inserted] = merged.emplace(key, *c);
    if (!inserted) it->second.coeff += c->coeff;
  }
  std::vector<Term> out;
  for (auto& [k, t] : merged) {
    if (!t.coeff.is_zero()) out.push_back(std::move(t));
  }
  return {Expr::from_terms(std::move(out)), true};
}

inline CanonicalExpr canonicalize(const Expr& e, const SymbolTable& table) {
  return canonicalize(e, table.dimension());
}

inline bool is_zero(const Expr& e, int dimension) { return canonicalize(e, dimension).expr.is_empty(); }

inline bool canonical_equal(const Expr& a, const Expr& b, int dimension) { return is_zero(a - b, dimension); }

}  // namespace spintensor
