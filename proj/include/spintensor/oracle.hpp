#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "spintensor/lambda.hpp"
#include "spintensor/tensor_ir.hpp"

namespace spintensor {

struct OracleOptions {
  int dimension = 4;
  bool flat = false;     ///< Riemann = Ricci = 0 and g = diag(1, -1, ..., -1)
  bool neutral = false;  ///< F = 0
  bool cyclic = true;    ///< impose the cyclic Riemann identity
  int ricci_sign = 1;    ///< R_bd = ricci_sign * g^{ac} R_abcd
};

/// Deterministic source of small exact rationals.
class RationalSource {
 public:
  explicit RationalSource(std::uint64_t seed) : gen_(seed) {}

  long integer(long lo, long hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<long>(gen_() % span);
  }

  /// p/q with |p| <= num_range, 1 <= q <= den_range.
  Rational rational(long num_range = 6, long den_range = 4) {
    Rational r(integer(-num_range, num_range), integer(1, den_range));
    r.canonicalize();
    return r;
  }

  Rational nonzero_rational(long num_range = 6, long den_range = 4) {
    for (;;) {
      Rational r = rational(num_range, den_range);
      if (sgn(r) != 0) return r;
    }
  }

  Number complex_value() { return Number(rational()) + Number::imaginary_unit() * Number(rational()); }

 private:
  std::mt19937_64 gen_;
};

namespace detail {

inline std::size_t ipow(std::size_t d, std::size_t k) {
  std::size_t r = 1;
  for (std::size_t j = 0; j < k; ++j) r *= d;
  return r;
}

/// Multi-index <-> flat position, first index most significant.
inline std::vector<int> unflatten(std::size_t pos, std::size_t d, std::size_t rank) {
  std::vector<int> x(rank);
  for (std::size_t k = rank; k-- > 0;) {
    x[k] = static_cast<int>(pos % d);
    pos /= d;
  }
  return x;
}

inline std::size_t flatten(const std::vector<int>& x, std::size_t d) {
  std::size_t pos = 0;
  for (int v : x) pos = pos * d + static_cast<std::size_t>(v);
  return pos;
}

inline std::uint64_t mix_seed(std::uint64_t seed, const std::string& salt) {
  std::uint64_t h = 1469598103934665603ULL ^ seed;
  for (unsigned char c : salt) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h ^ (seed * 0x9E3779B97F4A7C15ULL);
}

/// Exact inverse of a square rational matrix, or nullopt when singular.
inline std::optional<std::vector<Rational>> invert(std::vector<Rational> a, std::size_t n) {
  std::vector<Rational> inv(n * n);
  for (std::size_t i = 0; i < n; ++i) inv[i * n + i] = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && sgn(a[piv * n + col]) == 0) ++piv;
    if (piv == n) return std::nullopt;
    for (std::size_t k = 0; k < n; ++k) {
      std::swap(a[col * n + k], a[piv * n + k]);
      std::swap(inv[col * n + k], inv[piv * n + k]);
    }
    const Rational p = a[col * n + col];
    for (std::size_t k = 0; k < n; ++k) {
      a[col * n + k] /= p;
      inv[col * n + k] /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || sgn(a[r * n + col]) == 0) continue;
      const Rational f = a[r * n + col];
      for (std::size_t k = 0; k < n; ++k) {
        a[r * n + k] -= f * a[col * n + k];
        inv[r * n + k] -= f * inv[col * n + k];
      }
    }
  }
  return inv;
}

/// Basis of the null space of a rational matrix with `cols` columns.
inline std::vector<std::vector<Rational>> null_space(std::vector<std::vector<Rational>> rows, std::size_t cols) {
  std::vector<std::size_t> pivot_cols;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows.size(); ++c) {
    std::size_t piv = r;
    while (piv < rows.size() && sgn(rows[piv][c]) == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[r], rows[piv]);
    const Rational p = rows[r][c];
    for (auto& x : rows[r]) x /= p;
    for (std::size_t o = 0; o < rows.size(); ++o) {
      if (o == r || sgn(rows[o][c]) == 0) continue;
      const Rational f = rows[o][c];
      for (std::size_t k = 0; k < cols; ++k) rows[o][k] -= f * rows[r][k];
    }
    pivot_cols.push_back(c);
    ++r;
  }
  std::vector<bool> is_pivot(cols, false);
  for (auto c : pivot_cols) is_pivot[c] = true;
  std::vector<std::vector<Rational>> basis;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    std::vector<Rational> v(cols);
    v[f] = 1;
    for (std::size_t k = 0; k < pivot_cols.size(); ++k) v[pivot_cols[k]] = -rows[k][f];
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace detail

/// Exact background at one point: metric, inverse, curvature and field strength,
/// all with lower indices.
struct GeometrySample {
  int d = 4;
  std::vector<Rational> g, ginv, riemann, ricci, F;

  [[nodiscard]] const Rational& metric(int a, int b) const { return g[static_cast<std::size_t>(a * d + b)]; }
  [[nodiscard]] const Rational& inverse(int a, int b) const { return ginv[static_cast<std::size_t>(a * d + b)]; }
  [[nodiscard]] const Rational& riem(int a, int b, int c, int e) const {
    return riemann[static_cast<std::size_t>(((a * d + b) * d + c) * d + e)];
  }
};

inline GeometrySample sample_geometry(std::uint64_t seed, const OracleOptions& opt = {}) {
  const int d = opt.dimension;
  if (d < 2) throw OracleError("geometry sampling needs dimension >= 2");
  const auto n = static_cast<std::size_t>(d);
  RationalSource rng(detail::mix_seed(seed, "geometry"));
  GeometrySample s;
  s.d = d;
  for (int attempt = 0;; ++attempt) {
    if (attempt == 16) throw OracleError("could not draw an invertible metric");
    s.g.assign(n * n, Rational(0));
    for (std::size_t a = 0; a < n; ++a) s.g[a * n + a] = a == 0 ? 1 : -1;
    if (!opt.flat) {
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a; b < n; ++b) {
          const Rational eps = rng.rational(2, 5) / 2;
          s.g[a * n + b] += eps;
          if (a != b) s.g[b * n + a] += eps;
        }
      }
    }
    if (auto inv = detail::invert(s.g, n)) {
      s.ginv = std::move(*inv);
      break;
    }
  }

  const std::size_t n4 = n * n * n * n;
  s.riemann.assign(n4, Rational(0));
  if (!opt.flat) {
    std::vector<Rational> x(n4);
    for (auto& v : x) v = rng.rational();
    auto at = [&](const std::vector<Rational>& arr, int a, int b, int c, int e) -> const Rational& {
      return arr[static_cast<std::size_t>(((a * d + b) * d + c) * d + e)];
    };
    std::vector<Rational> y(n4), z(n4);
    for (std::size_t p = 0; p < n4; ++p) {
      auto i = detail::unflatten(p, n, 4);
      y[p] = (at(x, i[0], i[1], i[2], i[3]) - at(x, i[1], i[0], i[2], i[3]) - at(x, i[0], i[1], i[3], i[2]) +
              at(x, i[1], i[0], i[3], i[2])) /
             4;
    }
    for (std::size_t p = 0; p < n4; ++p) {
      auto i = detail::unflatten(p, n, 4);
      z[p] = (y[p] + at(y, i[2], i[3], i[0], i[1])) / 2;
    }
    s.riemann = z;
    if (opt.cyclic) {
      // With both pair antisymmetries and pair exchange, the cyclic sum is
      // three times the totally antisymmetric part.
      for (std::size_t p = 0; p < n4; ++p) {
        auto i = detail::unflatten(p, n, 4);
        const Rational cyc = at(z, i[0], i[1], i[2], i[3]) + at(z, i[0], i[2], i[3], i[1]) + at(z, i[0], i[3], i[1], i[2]);
        s.riemann[p] -= cyc / 3;
      }
    }
  }
  s.ricci.assign(n * n, Rational(0));
  for (int b = 0; b < d; ++b) {
    for (int e = 0; e < d; ++e) {
      Rational acc = 0;
      for (int a = 0; a < d; ++a) {
        for (int c = 0; c < d; ++c) acc += s.inverse(a, c) * s.riem(a, b, c, e);
      }
      s.ricci[static_cast<std::size_t>(b * d + e)] = acc * opt.ricci_sign;
    }
  }
  s.F.assign(n * n, Rational(0));
  if (!opt.neutral) {
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        s.F[a * n + b] = rng.rational();
        s.F[b * n + a] = -s.F[a * n + b];
      }
    }
  }
  return s;
}

/// Violated invariants of a geometry sample (empty when all hold exactly).
inline std::vector<std::string> geometry_violations(const GeometrySample& s, bool cyclic, int ricci_sign) {
  std::vector<std::string> out;
  const int d = s.d;
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      Rational acc = 0;
      for (int c = 0; c < d; ++c) acc += s.metric(a, c) * s.inverse(c, b);
      if (acc != (a == b ? 1 : 0)) out.emplace_back("g * ginv is not the identity");
      if (s.metric(a, b) != s.metric(b, a)) out.emplace_back("metric not symmetric");
      if (s.F[static_cast<std::size_t>(a * d + b)] != -s.F[static_cast<std::size_t>(b * d + a)])
        out.emplace_back("F not antisymmetric");
      Rational ric = 0;
      for (int p = 0; p < d; ++p) {
        for (int q = 0; q < d; ++q) ric += s.inverse(p, q) * s.riem(p, a, q, b);
      }
      if (s.ricci[static_cast<std::size_t>(a * d + b)] != ric * ricci_sign) out.emplace_back("Ricci is not the declared contraction");
      for (int c = 0; c < d; ++c) {
        for (int e = 0; e < d; ++e) {
          const Rational& r = s.riem(a, b, c, e);
          if (r != -s.riem(b, a, c, e)) out.emplace_back("Riemann not antisymmetric in its first pair");
          if (r != -s.riem(a, b, e, c)) out.emplace_back("Riemann not antisymmetric in its second pair");
          if (r != s.riem(c, e, a, b)) out.emplace_back("Riemann not symmetric under pair exchange");
          if (cyclic && r + s.riem(a, c, e, b) + s.riem(a, e, b, c) != 0) out.emplace_back("cyclic identity fails");
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Value and first/second covariant-derivative components of one field, all
/// indices lower, derivative indices first (outermost first).
struct FieldJet {
  SymbolHandle symbol;
  std::vector<Number> j0, j1, j2;
};

struct JetSample {
  std::map<std::string, FieldJet> fields;
};

namespace detail {

/// Basis of the component space allowed by the symbol's symmetries and traces.
inline std::vector<std::vector<Rational>> allowed_basis(const TensorSymbol& sym, const GeometrySample& geo) {
  const auto d = static_cast<std::size_t>(geo.d);
  const auto rank = static_cast<std::size_t>(sym.rank);
  const std::size_t size = ipow(d, rank);
  if (sym.identically_zero) return {};
  std::vector<std::vector<Rational>> rows;
  for (const auto& p : sym.generators) {
    for (std::size_t pos = 0; pos < size; ++pos) {
      auto x = unflatten(pos, d, rank);
      std::vector<int> y(rank);
      for (std::size_t k = 0; k < rank; ++k) y[k] = x[static_cast<std::size_t>(p.image[k])];
      std::vector<Rational> row(size);
      row[flatten(y, d)] += 1;
      row[pos] -= p.sign;
      rows.push_back(std::move(row));
    }
  }
  for (const auto& [i, j] : sym.vanishing_traces) {
    for (std::size_t pos = 0; pos < size; ++pos) {
      auto x = unflatten(pos, d, rank);
      if (x[static_cast<std::size_t>(i)] != 0 || x[static_cast<std::size_t>(j)] != 0) continue;
      std::vector<Rational> row(size);
      for (int m = 0; m < geo.d; ++m) {
        for (int n = 0; n < geo.d; ++n) {
          x[static_cast<std::size_t>(i)] = m;
          x[static_cast<std::size_t>(j)] = n;
          row[flatten(x, d)] += geo.inverse(m, n);
        }
      }
      rows.push_back(std::move(row));
    }
  }
  return null_space(std::move(rows), size);
}

inline std::vector<Number> random_element(const std::vector<std::vector<Rational>>& basis, std::size_t size,
                                          RationalSource& rng) {
  std::vector<Number> v(size);
  for (const auto& b : basis) {
    const Number c = rng.complex_value();
    for (std::size_t k = 0; k < size; ++k) {
      if (sgn(b[k]) != 0) v[k] += c * Number(b[k]);
    }
  }
  return v;
}

}  // namespace detail

/// [D_a, D_b] T_x from the commutator rule, evaluated on the sample:
///   -sum_k R^n_{x_k a b} T_{x_1..n..x_r} + i q F_{ab} T_x.
inline std::vector<Number> commutator_values(const std::vector<Number>& value, int rank, const Number& charge,
                                             const GeometrySample& geo) {
  const auto d = static_cast<std::size_t>(geo.d);
  const auto r = static_cast<std::size_t>(rank);
  const std::size_t size = detail::ipow(d, r);
  std::vector<Number> out(d * d * size);
  // R^n_{s a b} = ginv^{n m} R_{m s a b}
  std::vector<Rational> mixed(d * d * d * d);
  for (int n = 0; n < geo.d; ++n) {
    for (int s = 0; s < geo.d; ++s) {
      for (int a = 0; a < geo.d; ++a) {
        for (int b = 0; b < geo.d; ++b) {
          Rational acc = 0;
          for (int m = 0; m < geo.d; ++m) acc += geo.inverse(n, m) * geo.riem(m, s, a, b);
          mixed[detail::flatten({n, s, a, b}, d)] = acc;
        }
      }
    }
  }
  for (int a = 0; a < geo.d; ++a) {
    for (int b = 0; b < geo.d; ++b) {
      const Rational& f = geo.F[static_cast<std::size_t>(a * geo.d + b)];
      for (std::size_t pos = 0; pos < size; ++pos) {
        auto x = detail::unflatten(pos, d, r);
        Number acc;
        for (std::size_t k = 0; k < r; ++k) {
          const int s = x[k];
          for (int n = 0; n < geo.d; ++n) {
            const Rational& rv = mixed[detail::flatten({n, s, a, b}, d)];
            if (sgn(rv) == 0) continue;
            auto y = x;
            y[k] = n;
            acc -= Number(rv) * value[detail::flatten(y, d)];
          }
        }
        if (sgn(f) != 0 && !charge.is_zero()) acc += Number::imaginary_unit() * charge * Number(f) * value[pos];
        out[(static_cast<std::size_t>(a) * d + static_cast<std::size_t>(b)) * size + pos] = acc;
      }
    }
  }
  return out;
}

/// Samples jets for every listed field. `charge_value` evaluates the symbolic charge.
inline JetSample sample_jets(std::uint64_t seed, const std::vector<SymbolHandle>& fields, const GeometrySample& geo,
                             const std::function<Number(const Coefficient&)>& charge_value) {
  JetSample js;
  const auto d = static_cast<std::size_t>(geo.d);
  for (const auto& sym : fields) {
    if (js.fields.contains(sym->name)) continue;
    RationalSource rng(detail::mix_seed(seed, "jet:" + sym->name));
    const auto basis = detail::allowed_basis(*sym, geo);
    const std::size_t size = detail::ipow(d, static_cast<std::size_t>(sym->rank));
    FieldJet jet;
    jet.symbol = sym;
    jet.j0 = detail::random_element(basis, size, rng);
    jet.j1.resize(d * size);
    for (std::size_t a = 0; a < d; ++a) {
      auto v = detail::random_element(basis, size, rng);
      std::copy(v.begin(), v.end(), jet.j1.begin() + static_cast<long>(a * size));
    }
    jet.j2.resize(d * d * size);
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = a; b < d; ++b) {
        auto v = detail::random_element(basis, size, rng);
        for (std::size_t k = 0; k < size; ++k) {
          jet.j2[(a * d + b) * size + k] += v[k];
          if (a != b) jet.j2[(b * d + a) * size + k] += v[k];
        }
      }
    }
    const auto comm = commutator_values(jet.j0, sym->rank, charge_value(sym->charge), geo);
    const Number half(ratio(1, 2));
    for (std::size_t k = 0; k < jet.j2.size(); ++k) jet.j2[k] += half * comm[k];
    js.fields[sym->name] = std::move(jet);
  }
  return js;
}

/// Components of an expression, indexed by its sorted free indices.
struct ComponentArray {
  std::vector<Index> free;
  std::vector<Number> data;

  [[nodiscard]] bool is_zero() const {
    return std::all_of(data.begin(), data.end(), [](const Number& x) { return x.is_zero(); });
  }
};

namespace detail {

/// Lower-index components of a factor's symbol with its derivative string.
inline std::vector<Number> lowered_components(const Factor& f, const GeometrySample& geo, const JetSample& jets) {
  const auto d = static_cast<std::size_t>(geo.d);
  auto from_rational = [](const std::vector<Rational>& v) {
    std::vector<Number> out;
    out.reserve(v.size());
    for (const auto& x : v) out.emplace_back(x);
    return out;
  };
  switch (f.role()) {
    case TensorRole::metric:
      if (!f.derivs.empty()) return std::vector<Number>(ipow(d, 2 + f.derivs.size()));
      return from_rational(geo.g);
    case TensorRole::riemann:
    case TensorRole::ricci:
    case TensorRole::field_strength:
      if (!f.derivs.empty()) throw OracleError("derivatives of the background tensor '" + f.name() + "' are not sampled");
      return from_rational(f.role() == TensorRole::riemann ? geo.riemann
                           : f.role() == TensorRole::ricci ? geo.ricci
                                                           : geo.F);
    case TensorRole::field:
      break;
  }
  auto it = jets.fields.find(f.name());
  if (it == jets.fields.end()) throw OracleError("no jet sampled for '" + f.name() + "'");
  switch (f.derivs.size()) {
    case 0:
      return it->second.j0;
    case 1:
      return it->second.j1;
    case 2:
      return it->second.j2;
    default:
      throw OracleError("derivative depth > 2 on '" + f.name() + "'");
  }
}

/// Raises the positions carrying upper indices with the inverse metric.
inline std::vector<Number> apply_variance(std::vector<Number> comps, const std::vector<Index>& positions,
                                          const GeometrySample& geo) {
  const auto d = static_cast<std::size_t>(geo.d);
  const std::size_t n = positions.size();
  for (std::size_t p = 0; p < n; ++p) {
    if (positions[p].variance != Variance::upper) continue;
    std::vector<Number> next(comps.size());
    for (std::size_t pos = 0; pos < comps.size(); ++pos) {
      auto x = unflatten(pos, d, n);
      const int up = x[p];
      Number acc;
      for (int m = 0; m < geo.d; ++m) {
        const Rational& gi = geo.inverse(up, m);
        if (sgn(gi) == 0) continue;
        x[p] = m;
        const Number& c = comps[flatten(x, d)];
        if (!c.is_zero()) acc += Number(gi) * c;
      }
      next[pos] = acc;
    }
    comps = std::move(next);
  }
  return comps;
}

}  // namespace detail

/// Exact components of e. `coefficient_value` evaluates each term's scalar coefficient.
inline ComponentArray eval_expr(const Expr& e, const GeometrySample& geo, const JetSample& jets,
                                const std::function<Number(const Coefficient&)>& coefficient_value) {
  ComponentArray out;
  out.free = e.free();
  const auto d = static_cast<std::size_t>(geo.d);
  out.data.assign(detail::ipow(d, out.free.size()), Number());
  for (const auto& t : e.terms()) {
    const Number c = coefficient_value(t.coeff);
    if (c.is_zero()) continue;
    std::vector<std::string> names;
    for (const auto& i : out.free) names.push_back(i.name);
    for (const auto& n : dummy_names(t)) names.push_back(n);
    std::map<std::string, std::size_t> slot_of;
    for (std::size_t k = 0; k < names.size(); ++k) slot_of[names[k]] = k;

    struct Prepared {
      std::vector<Number> comps;
      std::vector<std::size_t> name_slots;
    };
    std::vector<Prepared> prepared;
    for (const auto& f : t.factors) {
      std::vector<Index> positions = f.derivs;
      positions.insert(positions.end(), f.slots.begin(), f.slots.end());
      Prepared p;
      p.comps = detail::apply_variance(detail::lowered_components(f, geo, jets), positions, geo);
      for (const auto& i : positions) p.name_slots.push_back(slot_of.at(i.name));
      prepared.push_back(std::move(p));
    }
    const std::size_t total = detail::ipow(d, names.size());
    const std::size_t free_count = out.free.size();
    std::vector<int> x(names.size(), 0);
    for (std::size_t pos = 0; pos < total; ++pos) {
      Number prod = c;
      for (const auto& p : prepared) {
        std::size_t flat = 0;
        for (auto s : p.name_slots) flat = flat * d + static_cast<std::size_t>(x[s]);
        const Number& v = p.comps[flat];
        if (v.is_zero()) {
          prod = Number();
          break;
        }
        prod *= v;
      }
      if (!prod.is_zero()) {
        std::size_t target = 0;
        for (std::size_t k = 0; k < free_count; ++k) target = target * d + static_cast<std::size_t>(x[k]);
        out.data[target] += prod;
      }
      for (std::size_t k = names.size(); k-- > 0;) {
        if (++x[k] < geo.d) break;
        x[k] = 0;
      }
    }
  }
  return out;
}

struct OracleReport {
  bool pass = true;
  int trials = 0;
  int failing_trial = -1;
  std::string witness;
};

/// Scalar values used in one trial: the lambda assignment first, then `fixed`,
/// then fresh nonzero rationals for every remaining symbol.
class TrialValuation {
 public:
  TrialValuation(std::uint64_t seed, const LambdaAssignment* lambdas, std::map<std::string, Coefficient> fixed)
      : rng_(detail::mix_seed(seed, "scalars")), lambdas_(lambdas), fixed_(std::move(fixed)) {}

  Number operator()(const Coefficient& c) {
    Coefficient v = lambdas_ ? lambdas_->apply(c) : c;
    if (!fixed_.empty()) v = v.substitute(fixed_);
    return v.evaluate([this](const std::string& name) { return symbol(name); });
  }

  Number symbol(const std::string& name) {
    auto it = values_.find(name);
    if (it != values_.end()) return it->second;
    return values_[name] = Number(rng_.nonzero_rational(7, 5));
  }

 private:
  RationalSource rng_;
  const LambdaAssignment* lambdas_;
  std::map<std::string, Coefficient> fixed_;
  std::map<std::string, Number> values_;
};

inline std::vector<SymbolHandle> fields_of(const Expr& e) {
  std::map<std::string, SymbolHandle> found;
  for (const auto& t : e.terms()) {
    for (const auto& f : t.factors) {
      if (f.role() == TensorRole::field) found.emplace(f.name(), f.symbol);
    }
  }
  std::vector<SymbolHandle> out;
  for (auto& [n, s] : found) out.push_back(s);
  return out;
}

inline std::string describe_component(const ComponentArray& a, std::size_t pos, int d) {
  auto x = detail::unflatten(pos, static_cast<std::size_t>(d), a.free.size());
  std::string s;
  for (std::size_t k = 0; k < a.free.size(); ++k) {
    s += (s.empty() ? "" : " ") + a.free[k].name + (a.free[k].variance == Variance::upper ? "^" : "_") +
         std::to_string(x[k]);
  }
  return "[" + s + "]";
}

/// Evaluates e over independent samples; passes iff every component is exactly zero.
inline OracleReport oracle_check(const Expr& e, int trials, std::uint64_t seed, const OracleOptions& opt = {},
                                 const LambdaAssignment* lambdas = nullptr,
                                 const std::map<std::string, Coefficient>& fixed = {}) {
  OracleReport rep;
  const auto fields = fields_of(e);
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t trial_seed = detail::mix_seed(seed, "trial" + std::to_string(t));
    try {
      TrialValuation val(trial_seed, lambdas, fixed);
      const GeometrySample geo = sample_geometry(trial_seed, opt);
      const JetSample jets = sample_jets(trial_seed, fields, geo, [&](const Coefficient& c) { return val(c); });
      const ComponentArray comps = eval_expr(e, geo, jets, [&](const Coefficient& c) { return val(c); });
      ++rep.trials;
      for (std::size_t k = 0; k < comps.data.size(); ++k) {
        if (!comps.data[k].is_zero()) {
          rep.pass = false;
          rep.failing_trial = t;
          rep.witness = "trial " + std::to_string(t) + " component " + describe_component(comps, k, opt.dimension) +
                        " = " + comps.data[k].to_string();
          return rep;
        }
      }
    } catch (const OracleError& err) {
      throw OracleError("trial " + std::to_string(t) + ": " + err.what());
    } catch (const ArithmeticError& err) {
      throw OracleError("trial " + std::to_string(t) + ": " + err.what());
    }
  }
  return rep;
}

}  // namespace spintensor
