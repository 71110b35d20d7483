#pragma once

// Random terms and expressions shared by the property tests and the acceptance binary.

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "spintensor/spintensor.hpp"

namespace testsupport {

using namespace spintensor;

/// Background symbols plus fields covering every symmetry type the engine sees.
inline SymbolTable test_table() {
  SymbolTable t = standard_symbols();
  const Coefficient e = Coefficient::symbol("e");
  t.declare_tensor("X", 0, {}, {}, e);
  t.declare_tensor("V", 1, {}, {}, e);
  t.declare_tensor("U", 1, {}, {}, 0);
  t.declare_tensor("S", 2, {{{1, 0}, 1}}, {{0, 1}}, e);
  t.declare_tensor("A", 2, {{{1, 0}, -1}}, {}, 0);
  t.declare_tensor("N", 2, {}, {}, e);
  t.declare_tensor("T", 3, {{{1, 0, 2}, 1}}, {}, e);
  t.declare_tensor("K", 3, {{{0, 2, 1}, -1}}, {{0, 1}}, 0);
  t.declare_tensor("H", 3, {{{1, 0, 2}, 1}, {{0, 2, 1}, 1}}, {}, 0);
  t.declare_tensor("W", 4, {{{1, 0, 2, 3}, -1}, {{0, 1, 3, 2}, -1}, {{2, 3, 0, 1}, 1}}, {}, 0);
  return t;
}

struct GenOptions {
  std::size_t max_indices = 6;
  std::size_t max_factors = 3;
  int max_derivs = 1;       ///< per factor, on fields only
  bool metric = false;      ///< allow g factors
  bool background = true;   ///< allow R, Ric, F
  bool rich_coefficients = true;
};

class Generator {
 public:
  Generator(const SymbolTable& table, std::uint64_t seed, GenOptions opt = {})
      : table_(table), rng_(seed), opt_(opt) {
    for (const auto& [name, s] : table_.tensors()) {
      if (s->role == TensorRole::metric && !opt_.metric) continue;
      if (s->is_background() && s->role != TensorRole::metric && !opt_.background) continue;
      symbols_.push_back(s);
    }
  }

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }
  std::mt19937_64& rng() { return rng_; }

  Coefficient coefficient() {
    static const char* kPlain[] = {"1", "-1", "2", "-3", "1/2", "-2/3"};
    static const char* kRich[] = {"1", "-1", "2", "1/2", "-2/3", "i", "-i/2", "sqrt2", "sqrt3/3", "mu", "e/M",
                                  "3 lam1", "(1 + mu)", "i e", "sqrt2 sqrt3 mu/M", "-(lam2 + 2 lam4)/(M mu)"};
    const std::string s = opt_.rich_coefficients ? kRich[uniform(0, 15)] : kPlain[uniform(0, 5)];
    return parse_expr(s, table_).scalar_value();
  }

  /// Random term whose free indices are exactly `free` (in any slot order).
  Term term_with_free(const std::vector<Index>& free) {
    for (;;) {
      std::vector<Factor> fs;
      std::size_t slots = 0;
      const int n = uniform(1, static_cast<int>(opt_.max_factors));
      for (int k = 0; k < n; ++k) {
        const auto& s = symbols_[static_cast<std::size_t>(uniform(0, static_cast<int>(symbols_.size()) - 1))];
        Factor f{s, {}, std::vector<Index>(static_cast<std::size_t>(s->rank))};
        if (s->role == TensorRole::field && opt_.max_derivs > 0) {
          f.derivs.resize(static_cast<std::size_t>(uniform(0, opt_.max_derivs)));
        }
        slots += f.derivs.size() + f.slots.size();
        fs.push_back(std::move(f));
      }
      if (slots > opt_.max_indices || slots < free.size() || (slots - free.size()) % 2 != 0) continue;
      std::vector<Index> names = free;
      static const char* kDummies[] = {"m", "n", "p", "q", "r", "s", "t", "u"};
      for (std::size_t k = 0; k < (slots - free.size()) / 2; ++k) {
        const bool up = coin();
        names.push_back(Index{kDummies[k], up ? Variance::upper : Variance::lower});
        names.push_back(Index{kDummies[k], up ? Variance::lower : Variance::upper});
      }
      std::shuffle(names.begin(), names.end(), rng_);
      std::size_t pos = 0;
      for (auto& f : fs) {
        for (auto& i : f.derivs) i = names[pos++];
        for (auto& i : f.slots) i = names[pos++];
      }
      Term t{coefficient(), std::move(fs)};
      try {
        check_term(t);
      } catch (const IndexError&) {
        continue;
      }
      return t;
    }
  }

  std::vector<Index> free_set(int max_free = 2) {
    static const char* kFree[] = {"a", "b", "c", "d"};
    std::vector<Index> out;
    const int n = uniform(0, max_free);
    for (int k = 0; k < n; ++k) out.push_back(Index{kFree[k], coin() ? Variance::upper : Variance::lower});
    return out;
  }

  Term term() { return term_with_free(free_set()); }

  Expr expr(int max_terms = 3) {
    const auto free = free_set();
    std::vector<Term> ts;
    const int n = uniform(1, max_terms);
    for (int k = 0; k < n; ++k) ts.push_back(term_with_free(free));
    return Expr::from_terms(std::move(ts));
  }

  /// A term equal to t by construction: random group element per factor,
  /// shuffled factors, renamed dummies and flipped dummy pairs.
  Term symmetric_image(const Term& t) {
    Term out = t;
    for (auto& f : out.factors) {
      const auto& g = f.symbol->group[static_cast<std::size_t>(uniform(0, static_cast<int>(f.symbol->group.size()) - 1))];
      // T_{x[image]} = sign T_{x}, so T_{x} = sign T_{x[image]}.
      std::vector<Index> permuted(f.slots.size());
      for (std::size_t k = 0; k < f.slots.size(); ++k) permuted[k] = f.slots[static_cast<std::size_t>(g.image[k])];
      f.slots = std::move(permuted);
      out.coeff *= Coefficient(static_cast<long>(g.sign));
    }
    std::shuffle(out.factors.begin(), out.factors.end(), rng_);
    const auto dummies = dummy_names(out);
    std::vector<std::string> fresh = {"w", "x", "y", "z", "k", "l", "h", "j"};
    std::shuffle(fresh.begin(), fresh.end(), rng_);
    std::map<std::string, std::string> renaming;
    std::set<std::string> flip;
    std::size_t k = 0;
    for (const auto& d : dummies) {
      renaming[d] = fresh[k++];
      if (coin()) flip.insert(d);
    }
    for_each_index_mut(out, [&](Index& i) {
      if (flip.contains(i.name)) i.variance = flipped(i.variance);
    });
    return rename_indices(out, renaming);
  }

  /// A nearby term that may or may not be equal: two index positions swapped, sign maybe flipped.
  Term perturbed(const Term& t) {
    Term out = symmetric_image(t);
    std::vector<Index*> all;
    for_each_index_mut(out, [&](Index& i) { all.push_back(&i); });
    if (all.size() >= 2) {
      const auto a = static_cast<std::size_t>(uniform(0, static_cast<int>(all.size()) - 1));
      const auto b = static_cast<std::size_t>(uniform(0, static_cast<int>(all.size()) - 1));
      std::swap(*all[a], *all[b]);
    }
    if (coin(0.3)) out.coeff = -out.coeff;
    return out;
  }

 private:
  const SymbolTable& table_;
  std::mt19937_64 rng_;
  GenOptions opt_;
  std::vector<SymbolHandle> symbols_;
};

/// Exact evaluation of e at a fixed random point, with every scalar given a value.
inline ComponentArray evaluate_at(const Expr& e, const SymbolTable& table, std::uint64_t seed,
                                  const std::vector<SymbolHandle>& fields) {
  OracleOptions o;
  o.dimension = table.dimension();
  TrialValuation val(seed, nullptr, {});
  for (const auto& s : table.scalars()) val.symbol(s);  // fixed draw order
  const GeometrySample geo = sample_geometry(seed, o);
  const JetSample jets = sample_jets(seed, fields, geo, [&](const Coefficient& c) { return val(c); });
  return eval_expr(e, geo, jets, [&](const Coefficient& c) { return val(c); });
}

inline std::vector<SymbolHandle> all_fields(const SymbolTable& table) {
  std::vector<SymbolHandle> out;
  for (const auto& [n, s] : table.tensors()) {
    if (s->role == TensorRole::field) out.push_back(s);
  }
  return out;
}

inline bool same_components(const ComponentArray& a, const ComponentArray& b) {
  if (a.data.size() != b.data.size()) return false;
  for (std::size_t k = 0; k < a.data.size(); ++k) {
    if (a.data[k] != b.data[k]) return false;
  }
  return true;
}

}  // namespace testsupport
