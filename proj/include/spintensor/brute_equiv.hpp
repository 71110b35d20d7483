#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "spintensor/tensor_ir.hpp"

namespace spintensor {

/// Exhaustive-enumeration equivalence of two single terms, kept deliberately
/// separate from the canonicalizer so it can serve as its oracle.
///
/// Walks every factor permutation, every element of every slot-symmetry group
/// and every dummy bijection (with variance flips of whole dummy pairs).
/// Metric factors are outside its domain.
class BruteEquiv {
 public:
  static constexpr std::size_t kMaxIndices = 8;

  /// True iff a and b denote the same tensor expression.
  static bool equivalent(const Term& a, const Term& b) {
    check(a);
    check(b);
    const bool za = vanishes(a);
    const bool zb = vanishes(b);
    if (za || zb) return za && zb;
    for (int sign : reachable_signs(a, b)) {
      if (a.coeff * Coefficient(static_cast<long>(sign)) == b.coeff) return true;
    }
    return false;
  }

  /// True iff the term is zero by its symmetries alone.
  static bool vanishes(const Term& t) {
    if (t.coeff.is_zero()) return true;
    for (const auto& f : t.factors) {
      if (f.symbol->identically_zero) return true;
      for (const auto& [i, j] : f.symbol->traceless_pairs) {
        // Any group image of a declared traceless pair.
        for (const auto& p : f.symbol->group) {
          auto x = p.image[static_cast<std::size_t>(i)];
          auto y = p.image[static_cast<std::size_t>(j)];
          if (f.slots[static_cast<std::size_t>(x)].name == f.slots[static_cast<std::size_t>(y)].name) return true;
        }
      }
    }
    auto signs = reachable_signs(t, t);
    return signs.contains(-1);
  }

 private:
  static void check(const Term& t) {
    std::size_t n = 0;
    for (const auto& f : t.factors) {
      if (f.role() == TensorRole::metric) throw IndexError("brute_equiv does not handle metric factors");
      n += f.derivs.size() + f.slots.size();
    }
    if (n > kMaxIndices) throw IndexError("brute_equiv is limited to " + std::to_string(kMaxIndices) + " indices per term");
    check_term(t);
  }

  /// Signs s such that some symmetry transformation maps a's index structure onto b's with a = s * (b's structure).
  static std::set<int> reachable_signs(const Term& a, const Term& b) {
    std::set<int> signs;
    if (a.factors.size() != b.factors.size()) return signs;
    std::vector<std::size_t> perm(a.factors.size());
    std::iota(perm.begin(), perm.end(), 0);
    do {
      bool shapes_match = true;
      for (std::size_t k = 0; k < perm.size() && shapes_match; ++k) {
        const Factor& fa = a.factors[perm[k]];
        const Factor& fb = b.factors[k];
        shapes_match = fa.symbol == fb.symbol && fa.derivs.size() == fb.derivs.size();
      }
      if (!shapes_match) continue;
      std::vector<std::size_t> choice(perm.size(), 0);
      for (;;) {
        std::vector<Index> flat;
        int sign = 1;
        for (std::size_t k = 0; k < perm.size(); ++k) {
          const Factor& fa = a.factors[perm[k]];
          const SignedPermutation& g = fa.symbol->group[choice[k]];
          sign *= g.sign;
          flat.insert(flat.end(), fa.derivs.begin(), fa.derivs.end());
          for (int src : g.image) flat.push_back(fa.slots[static_cast<std::size_t>(src)]);
        }
        std::vector<Index> target;
        for (const auto& fb : b.factors) {
          target.insert(target.end(), fb.derivs.begin(), fb.derivs.end());
          target.insert(target.end(), fb.slots.begin(), fb.slots.end());
        }
        if (indices_match(a, b, flat, target)) signs.insert(sign);
        std::size_t k = 0;
        while (k < choice.size() && ++choice[k] == a.factors[perm[k]].symbol->group.size()) choice[k++] = 0;
        if (k == choice.size()) break;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return signs;
  }

  static bool indices_match(const Term& a, const Term& b, const std::vector<Index>& x, const std::vector<Index>& y) {
    const auto dummies_a = dummy_names(a);
    const auto dummies_b = dummy_names(b);
    std::map<std::string, std::string> forward, backward;
    std::map<std::string, bool> flip;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const bool da = dummies_a.contains(x[k].name);
      const bool db = dummies_b.contains(y[k].name);
      if (da != db) return false;
      if (!da) {
        if (x[k] != y[k]) return false;
        continue;
      }
      const bool flipped_here = x[k].variance != y[k].variance;
      auto [f, fnew] = forward.emplace(x[k].name, y[k].name);
      auto [r, rnew] = backward.emplace(y[k].name, x[k].name);
      if (f->second != y[k].name || r->second != x[k].name) return false;
      auto [fl, flnew] = flip.emplace(x[k].name, flipped_here);
      if (fl->second != flipped_here) return false;
      (void)fnew;
      (void)rnew;
      (void)flnew;
    }
    return true;
  }
};

inline bool brute_equiv(const Term& a, const Term& b) { return BruteEquiv::equivalent(a, b); }

}  // namespace spintensor
