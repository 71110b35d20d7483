#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "spintensor/coefficient.hpp"
#include "spintensor/error.hpp"

namespace spintensor {

enum class Variance : std::uint8_t { lower, upper };

inline Variance flipped(Variance v) { return v == Variance::lower ? Variance::upper : Variance::lower; }

/// Abstract index: an interned name plus its position.
struct Index {
  std::string name;
  Variance variance = Variance::lower;

  friend auto operator<=>(const Index&, const Index&) = default;
};

inline Index lower(std::string name) { return {std::move(name), Variance::lower}; }
inline Index upper(std::string name) { return {std::move(name), Variance::upper}; }

/// T_{x[image[0]] ... x[image[r-1]]} = sign * T_{x[0] ... x[r-1]}, slots 0-based.
struct SignedPermutation {
  std::vector<int> image;
  int sign = 1;

  friend auto operator<=>(const SignedPermutation&, const SignedPermutation&) = default;
};

inline SignedPermutation compose(const SignedPermutation& a, const SignedPermutation& b) {
  SignedPermutation c;
  c.image.resize(b.image.size());
  for (std::size_t k = 0; k < b.image.size(); ++k) c.image[k] = a.image[static_cast<std::size_t>(b.image[k])];
  c.sign = a.sign * b.sign;
  return c;
}

inline SignedPermutation identity_permutation(int rank) {
  SignedPermutation p;
  for (int k = 0; k < rank; ++k) p.image.push_back(k);
  return p;
}

/// Background tensors get special treatment in the canonicalizer, calculus and oracle.
enum class TensorRole : std::uint8_t { field, metric, riemann, ricci, field_strength };

struct TensorSymbol {
  std::string name;
  int rank = 0;
  std::vector<SignedPermutation> generators;
  std::vector<std::pair<int, int>> traceless_pairs;
  /// Slot triples whose cyclic sum vanishes. Only the oracle's sampler and the
  /// opt-in Bianchi pass look at these.
  std::vector<std::array<int, 3>> cyclic_triples;
  Coefficient charge;
  TensorRole role = TensorRole::field;

  // Derived in make_tensor_symbol.
  std::vector<SignedPermutation> group;
  std::set<std::pair<int, int>> vanishing_traces;
  bool identically_zero = false;

  [[nodiscard]] bool is_background() const { return role != TensorRole::field; }
};

using SymbolHandle = std::shared_ptr<const TensorSymbol>;

namespace detail {

inline void check_permutation(const SignedPermutation& p, int rank, const std::string& name) {
  if (static_cast<int>(p.image.size()) != rank)
    throw SymbolError("symmetry generator of '" + name + "' has wrong length");
  if (p.sign != 1 && p.sign != -1) throw SymbolError("symmetry generator of '" + name + "' has sign other than +-1");
  std::vector<int> seen(static_cast<std::size_t>(rank), 0);
  for (int k : p.image) {
    if (k < 0 || k >= rank || seen[static_cast<std::size_t>(k)]++)
      throw SymbolError("symmetry generator of '" + name + "' is not a permutation of its slots");
  }
}

}  // namespace detail

/// Builds a symbol and closes its symmetry group. Slots are 0-based here.
inline SymbolHandle make_tensor_symbol(std::string name, int rank, std::vector<SignedPermutation> generators,
                                       std::vector<std::pair<int, int>> traceless_pairs, Coefficient charge,
                                       TensorRole role = TensorRole::field,
                                       std::vector<std::array<int, 3>> cyclic_triples = {}) {
  if (name.empty()) throw SymbolError("empty tensor name");
  if (rank < 0) throw SymbolError("negative rank for '" + name + "'");
  auto s = std::make_shared<TensorSymbol>();
  s->name = std::move(name);
  s->rank = rank;
  for (const auto& g : generators) detail::check_permutation(g, rank, s->name);
  for (auto& [i, j] : traceless_pairs) {
    if (i < 0 || j < 0 || i >= rank || j >= rank || i == j)
      throw SymbolError("traceless pair of '" + s->name + "' must name two distinct valid slots");
    if (i > j) std::swap(i, j);
  }
  for (const auto& t : cyclic_triples) {
    for (int k : t) {
      if (k < 0 || k >= rank) throw SymbolError("cyclic triple of '" + s->name + "' names an invalid slot");
    }
  }
  s->generators = std::move(generators);
  s->traceless_pairs = std::move(traceless_pairs);
  s->cyclic_triples = std::move(cyclic_triples);
  s->charge = std::move(charge);
  s->role = role;

  std::set<SignedPermutation> closed{identity_permutation(rank)};
  std::vector<SignedPermutation> frontier(closed.begin(), closed.end());
  while (!frontier.empty()) {
    std::vector<SignedPermutation> next;
    for (const auto& p : frontier) {
      for (const auto& g : s->generators) {
        auto q = compose(p, g);
        if (closed.insert(q).second) next.push_back(std::move(q));
      }
    }
    frontier = std::move(next);
  }
  auto id = identity_permutation(rank);
  id.sign = -1;
  s->identically_zero = closed.contains(id);
  s->group.assign(closed.begin(), closed.end());
  for (const auto& [i, j] : s->traceless_pairs) {
    for (const auto& p : s->group) {
      int a = p.image[static_cast<std::size_t>(i)];
      int b = p.image[static_cast<std::size_t>(j)];
      s->vanishing_traces.insert({std::min(a, b), std::max(a, b)});
    }
  }
  return s;
}

/// Same symbol with extra traceless pairs, used once a trace has been proven to vanish.
inline SymbolHandle with_traceless_pair(const TensorSymbol& s, int i, int j) {
  auto pairs = s.traceless_pairs;
  pairs.emplace_back(i, j);
  return make_tensor_symbol(s.name, s.rank, s.generators, pairs, s.charge, s.role, s.cyclic_triples);
}

/// Append-only registry of tensor and scalar names plus the spacetime dimension.
class SymbolTable {
 public:
  explicit SymbolTable(int dimension = 4) : dimension_(dimension) {
    if (dimension < 1) throw SymbolError("dimension must be positive");
  }

  static bool is_reserved(const std::string& name) {
    return name == "D" || name == "Nabla" || name == "i" || name == "sqrt2" || name == "sqrt3";
  }

  SymbolHandle declare_tensor(const std::string& name, int rank, std::vector<SignedPermutation> generators,
                              std::vector<std::pair<int, int>> traceless_pairs, Coefficient charge,
                              TensorRole role = TensorRole::field,
                              std::vector<std::array<int, 3>> cyclic_triples = {}) {
    check_unused(name);
    for (const auto& v : charge.variables()) {
      if (!scalars_.contains(v)) throw SymbolError("charge of '" + name + "' uses undeclared scalar '" + v + "'");
    }
    auto s = make_tensor_symbol(name, rank, std::move(generators), std::move(traceless_pairs), std::move(charge),
                                role, std::move(cyclic_triples));
    if (role != TensorRole::field) {
      if (roles_.contains(role)) throw SymbolError("a tensor with the role of '" + name + "' is already declared");
      roles_[role] = name;
    }
    tensors_[name] = s;
    return s;
  }

  void declare_scalar(const std::string& name) {
    check_unused(name);
    scalars_.insert(name);
  }

  /// Rebinds an existing name to a refined symbol (same name, rank and role).
  void refine_tensor(SymbolHandle s) {
    auto it = tensors_.find(s->name);
    if (it == tensors_.end()) throw SymbolError("unknown tensor '" + s->name + "'");
    if (it->second->rank != s->rank || it->second->role != s->role)
      throw SymbolError("refinement of '" + s->name + "' changes rank or role");
    it->second = std::move(s);
  }

  [[nodiscard]] SymbolHandle find_tensor(const std::string& name) const {
    auto it = tensors_.find(name);
    return it == tensors_.end() ? nullptr : it->second;
  }

  [[nodiscard]] SymbolHandle tensor(const std::string& name) const {
    auto s = find_tensor(name);
    if (!s) throw SymbolError("unknown tensor '" + name + "'");
    return s;
  }

  [[nodiscard]] SymbolHandle role(TensorRole r) const {
    auto it = roles_.find(r);
    return it == roles_.end() ? nullptr : tensor(it->second);
  }

  [[nodiscard]] bool is_scalar(const std::string& name) const { return scalars_.contains(name); }
  [[nodiscard]] const std::set<std::string>& scalars() const { return scalars_; }
  [[nodiscard]] const std::map<std::string, SymbolHandle>& tensors() const { return tensors_; }
  [[nodiscard]] int dimension() const { return dimension_; }
  void set_dimension(int d) {
    if (d < 1) throw SymbolError("dimension must be positive");
    dimension_ = d;
  }

 private:
  void check_unused(const std::string& name) const {
    if (is_reserved(name)) throw SymbolError("'" + name + "' is a reserved name");
    if (tensors_.contains(name) || scalars_.contains(name)) throw SymbolError("duplicate declaration of '" + name + "'");
  }

  int dimension_;
  std::map<std::string, SymbolHandle> tensors_;
  std::set<std::string> scalars_;
  std::map<TensorRole, std::string> roles_;
};

/// Background tensors and the scalar symbols of the spin-2 system.
inline SymbolTable standard_symbols(int dimension = 4) {
  SymbolTable t(dimension);
  for (int k = 1; k <= 12; ++k) t.declare_scalar("lam" + std::to_string(k));
  for (const char* s : {"mu", "M", "e"}) t.declare_scalar(s);
  t.declare_tensor("g", 2, {{{1, 0}, 1}}, {}, 0, TensorRole::metric);
  t.declare_tensor("F", 2, {{{1, 0}, -1}}, {}, 0, TensorRole::field_strength);
  t.declare_tensor("R", 4, {{{1, 0, 2, 3}, -1}, {{0, 1, 3, 2}, -1}, {{2, 3, 0, 1}, 1}}, {}, 0, TensorRole::riemann,
                   {{1, 2, 3}});
  t.declare_tensor("Ric", 2, {{{1, 0}, 1}}, {}, 0, TensorRole::ricci);
  return t;
}

struct Factor {
  SymbolHandle symbol;
  std::vector<Index> derivs;  ///< outermost derivative first
  std::vector<Index> slots;

  [[nodiscard]] const std::string& name() const { return symbol->name; }
  [[nodiscard]] TensorRole role() const { return symbol->role; }
};

struct Term {
  Coefficient coeff;
  std::vector<Factor> factors;
};

template <class F>
void for_each_index(const Term& t, F&& f) {
  for (const auto& fac : t.factors) {
    for (const auto& i : fac.derivs) f(i);
    for (const auto& i : fac.slots) f(i);
  }
}

template <class F>
void for_each_index_mut(Term& t, F&& f) {
  for (auto& fac : t.factors) {
    for (auto& i : fac.derivs) f(i);
    for (auto& i : fac.slots) f(i);
  }
}

/// Throws IndexError unless every name occurs once, or twice with opposite variance.
inline void check_term(const Term& t) {
  std::map<std::string, std::vector<Variance>> seen;
  for (const auto& f : t.factors) {
    if (static_cast<int>(f.slots.size()) != f.symbol->rank)
      throw IndexError("tensor '" + f.name() + "' expects " + std::to_string(f.symbol->rank) + " indices, got " +
                       std::to_string(f.slots.size()));
  }
  for_each_index(t, [&](const Index& i) { seen[i.name].push_back(i.variance); });
  for (const auto& [name, vs] : seen) {
    if (vs.size() > 2) throw IndexError("index '" + name + "' appears " + std::to_string(vs.size()) + " times");
    if (vs.size() == 2 && vs[0] == vs[1])
      throw IndexError("index '" + name + "' repeated with the same variance");
  }
}

inline Term validate(Term t) {
  check_term(t);
  return t;
}

/// Once-occurring indices of a term, sorted.
inline std::vector<Index> free_indices(const Term& t) {
  std::map<std::string, std::vector<Index>> seen;
  for_each_index(t, [&](const Index& i) { seen[i.name].push_back(i); });
  std::vector<Index> out;
  for (const auto& [name, is] : seen) {
    if (is.size() == 1) out.push_back(is.front());
  }
  return out;
}

inline std::set<std::string> dummy_names(const Term& t) {
  std::map<std::string, int> count;
  for_each_index(t, [&](const Index& i) { ++count[i.name]; });
  std::set<std::string> out;
  for (const auto& [n, c] : count) {
    if (c == 2) out.insert(n);
  }
  return out;
}

inline std::set<std::string> index_names(const Term& t) {
  std::set<std::string> out;
  for_each_index(t, [&](const Index& i) { out.insert(i.name); });
  return out;
}

/// First name of the form z1, z2, ... not in `used`.
inline std::string fresh_index_name(const std::set<std::string>& used, const std::string& stem = "z") {
  for (int k = 1;; ++k) {
    std::string n = stem + std::to_string(k);
    if (!used.contains(n)) return n;
  }
}

/// Simultaneous renaming; names absent from the map are kept.
inline Term rename_indices(Term t, const std::map<std::string, std::string>& renaming) {
  for_each_index_mut(t, [&](Index& i) {
    if (auto it = renaming.find(i.name); it != renaming.end()) i.name = it->second;
  });
  return t;
}

inline std::string describe(const std::vector<Index>& is) {
  std::string s;
  for (const auto& i : is) {
    if (!s.empty()) s += " ";
    s += (i.variance == Variance::upper ? "^" : "_") + i.name;
  }
  return "{" + s + "}";
}

/// Finite sum of terms sharing one free-index multiset. The empty sum is zero.
class Expr {
 public:
  Expr() = default;
  explicit Expr(Term t) {
    if (t.coeff.is_zero()) return;
    check_term(t);
    free_ = free_indices(t);
    terms_.push_back(std::move(t));
  }
  explicit Expr(const Coefficient& c) : Expr(Term{c, {}}) {}

  static Expr from_terms(std::vector<Term> terms) {
    Expr e;
    bool first = true;
    for (auto& t : terms) {
      if (t.coeff.is_zero()) continue;
      check_term(t);
      auto fi = free_indices(t);
      if (first) {
        e.free_ = std::move(fi);
        first = false;
      } else if (fi != e.free_) {
        throw IndexError("free-index mismatch: " + describe(e.free_) + " vs " + describe(fi));
      }
      e.terms_.push_back(std::move(t));
    }
    return e;
  }

  [[nodiscard]] const std::vector<Term>& terms() const { return terms_; }
  [[nodiscard]] bool is_empty() const { return terms_.empty(); }
  [[nodiscard]] const std::vector<Index>& free() const { return free_; }
  [[nodiscard]] bool is_scalar() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const Term& t) { return t.factors.empty(); });
  }

  /// Sum of the coefficients of a factor-free Expr.
  [[nodiscard]] Coefficient scalar_value() const {
    Coefficient c;
    for (const auto& t : terms_) {
      if (!t.factors.empty()) throw IndexError("expression is not a scalar coefficient");
      c += t.coeff;
    }
    return c;
  }

 private:
  std::vector<Term> terms_;
  std::vector<Index> free_;
};

inline void check_compatible(const Expr& a, const Expr& b) {
  if (!a.is_empty() && !b.is_empty() && a.free() != b.free())
    throw IndexError("free-index mismatch: " + describe(a.free()) + " vs " + describe(b.free()));
}

inline Expr scale(const Expr& e, const Coefficient& c) {
  std::vector<Term> ts;
  for (const auto& t : e.terms()) ts.push_back(Term{t.coeff * c, t.factors});
  return Expr::from_terms(std::move(ts));
}

inline Expr operator+(const Expr& a, const Expr& b) {
  check_compatible(a, b);
  std::vector<Term> ts = a.terms();
  ts.insert(ts.end(), b.terms().begin(), b.terms().end());
  return Expr::from_terms(std::move(ts));
}

inline Expr operator-(const Expr& a) { return scale(a, Coefficient(-1L)); }
inline Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

/// Product of two terms; dummies of either side are renamed away from every
/// name of the other side, and matching free names contract.
inline Term multiply_terms(const Term& a, Term b) {
  const auto names_a = index_names(a);
  const auto dummies_a = dummy_names(a);
  auto names_b = index_names(b);
  const auto dummies_b = dummy_names(b);
  std::set<std::string> used = names_a;
  used.insert(names_b.begin(), names_b.end());
  std::map<std::string, std::string> rename_b;
  for (const auto& n : dummies_b) {
    if (names_a.contains(n)) {
      auto fresh = fresh_index_name(used);
      used.insert(fresh);
      rename_b[n] = fresh;
    }
  }
  b = rename_indices(std::move(b), rename_b);
  names_b = index_names(b);
  std::map<std::string, std::string> rename_a;
  for (const auto& n : dummies_a) {
    if (names_b.contains(n)) {
      auto fresh = fresh_index_name(used);
      used.insert(fresh);
      rename_a[n] = fresh;
    }
  }
  Term out = rename_indices(a, rename_a);
  out.coeff = out.coeff * b.coeff;
  out.factors.insert(out.factors.end(), b.factors.begin(), b.factors.end());
  check_term(out);
  return out;
}

inline Expr operator*(const Expr& a, const Expr& b) {
  std::vector<Term> ts;
  for (const auto& x : a.terms()) {
    for (const auto& y : b.terms()) ts.push_back(multiply_terms(x, y));
  }
  return Expr::from_terms(std::move(ts));
}

/// Formal linear combination; no simplification beyond dropping zero coefficients.
inline Expr combine(const std::vector<std::pair<Coefficient, Expr>>& parts) {
  Expr out;
  for (const auto& [c, e] : parts) out = out + scale(e, c);
  return out;
}

/// Renames free indices of an expression simultaneously, keeping dummies clear.
inline Expr relabel(const Expr& e, const std::map<std::string, std::string>& renaming) {
  std::set<std::string> targets;
  for (const auto& [from, to] : renaming) targets.insert(to);
  std::vector<Term> ts;
  for (auto t : e.terms()) {
    std::set<std::string> used = index_names(t);
    used.insert(targets.begin(), targets.end());
    std::map<std::string, std::string> dummy_fix;
    for (const auto& d : dummy_names(t)) {
      if (targets.contains(d)) {
        auto fresh = fresh_index_name(used);
        used.insert(fresh);
        dummy_fix[d] = fresh;
      }
    }
    t = rename_indices(std::move(t), dummy_fix);
    std::map<std::string, std::string> free_map;
    for (const auto& i : free_indices(t)) {
      if (auto it = renaming.find(i.name); it != renaming.end()) free_map[i.name] = it->second;
    }
    ts.push_back(rename_indices(std::move(t), free_map));
  }
  return Expr::from_terms(std::move(ts));
}

}  // namespace spintensor
