#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "spintensor/number.hpp"

namespace spintensor {

/// Power product of scalar symbols, kept sorted by symbol name with positive exponents.
class Monomial {
 public:
  using Power = std::pair<std::string, unsigned>;

  Monomial() = default;
  explicit Monomial(std::string var, unsigned exponent = 1) {
    if (exponent > 0) powers_.emplace_back(std::move(var), exponent);
  }

  [[nodiscard]] const std::vector<Power>& powers() const { return powers_; }
  [[nodiscard]] bool is_one() const { return powers_.empty(); }

  [[nodiscard]] unsigned degree(const std::string& var) const {
    for (const auto& [v, e] : powers_) {
      if (v == var) return e;
    }
    return 0;
  }

  [[nodiscard]] Monomial without(const std::string& var) const {
    Monomial m;
    for (const auto& p : powers_) {
      if (p.first != var) m.powers_.push_back(p);
    }
    return m;
  }

  friend Monomial operator*(const Monomial& a, const Monomial& b) {
    Monomial m;
    std::size_t i = 0, j = 0;
    while (i < a.powers_.size() || j < b.powers_.size()) {
      if (j == b.powers_.size() || (i < a.powers_.size() && a.powers_[i].first < b.powers_[j].first)) {
        m.powers_.push_back(a.powers_[i++]);
      } else if (i == a.powers_.size() || b.powers_[j].first < a.powers_[i].first) {
        m.powers_.push_back(b.powers_[j++]);
      } else {
        m.powers_.emplace_back(a.powers_[i].first, a.powers_[i].second + b.powers_[j].second);
        ++i;
        ++j;
      }
    }
    return m;
  }

  /// a / b when b divides a.
  static std::optional<Monomial> divide(const Monomial& a, const Monomial& b) {
    Monomial m;
    std::size_t i = 0;
    for (const auto& [v, e] : b.powers_) {
      while (i < a.powers_.size() && a.powers_[i].first < v) m.powers_.push_back(a.powers_[i++]);
      if (i == a.powers_.size() || a.powers_[i].first != v || a.powers_[i].second < e) return std::nullopt;
      if (a.powers_[i].second > e) m.powers_.emplace_back(v, a.powers_[i].second - e);
      ++i;
    }
    while (i < a.powers_.size()) m.powers_.push_back(a.powers_[i++]);
    return m;
  }

  /// Lexicographic order, earlier symbol names most significant.
  static int compare(const Monomial& a, const Monomial& b) {
    std::size_t i = 0, j = 0;
    while (i < a.powers_.size() && j < b.powers_.size()) {
      const auto& [va, ea] = a.powers_[i];
      const auto& [vb, eb] = b.powers_[j];
      if (va == vb) {
        if (ea != eb) return ea < eb ? -1 : 1;
        ++i;
        ++j;
      } else {
        return va < vb ? 1 : -1;
      }
    }
    if (i < a.powers_.size()) return 1;
    if (j < b.powers_.size()) return -1;
    return 0;
  }

  friend bool operator==(const Monomial&, const Monomial&) = default;

 private:
  std::vector<Power> powers_;
};

struct MonomialLess {
  bool operator()(const Monomial& a, const Monomial& b) const { return Monomial::compare(a, b) < 0; }
};

/// Multivariate polynomial over Q(i, sqrt2, sqrt3) in named scalar symbols.
class Polynomial {
 public:
  using TermMap = std::map<Monomial, Number, MonomialLess>;

  Polynomial() = default;
  Polynomial(const Number& c) {  // NOLINT(google-explicit-constructor)
    if (!c.is_zero()) terms_.emplace(Monomial{}, c);
  }
  Polynomial(long c) : Polynomial(Number(c)) {}  // NOLINT(google-explicit-constructor)

  static Polynomial variable(const std::string& name) {
    Polynomial p;
    p.terms_.emplace(Monomial(name), Number(1L));
    return p;
  }
  static Polynomial monomial(const Monomial& m, const Number& c) {
    Polynomial p;
    if (!c.is_zero()) p.terms_.emplace(m, c);
    return p;
  }

  [[nodiscard]] const TermMap& terms() const { return terms_; }
  [[nodiscard]] bool is_zero() const { return terms_.empty(); }
  [[nodiscard]] bool is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one());
  }
  [[nodiscard]] Number constant_value() const {
    auto it = terms_.find(Monomial{});
    return it == terms_.end() ? Number() : it->second;
  }
  [[nodiscard]] bool is_one() const { return is_constant() && constant_value().is_one(); }

  /// Leading term in lex order. Precondition: nonzero.
  [[nodiscard]] const std::pair<const Monomial, Number>& leading() const { return *terms_.rbegin(); }

  [[nodiscard]] std::set<std::string> variables() const {
    std::set<std::string> vars;
    for (const auto& [m, c] : terms_) {
      for (const auto& p : m.powers()) vars.insert(p.first);
    }
    return vars;
  }

  [[nodiscard]] unsigned degree(const std::string& var) const {
    unsigned d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.degree(var));
    return d;
  }

  /// Coefficient of var^k, a polynomial free of var.
  [[nodiscard]] Polynomial coefficient(const std::string& var, unsigned k) const {
    Polynomial p;
    for (const auto& [m, c] : terms_) {
      if (m.degree(var) == k) p.terms_.emplace(m.without(var), c);
    }
    return p;
  }

  Polynomial operator-() const {
    Polynomial p;
    for (const auto& [m, c] : terms_) p.terms_.emplace_hint(p.terms_.end(), m, -c);
    return p;
  }

  Polynomial& operator+=(const Polynomial& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial p;
    for (const auto& [ma, ca] : a.terms_) {
      for (const auto& [mb, cb] : b.terms_) p.add_term(ma * mb, ca * cb);
    }
    return p;
  }
  Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

  [[nodiscard]] Polynomial scaled(const Number& c) const {
    if (c.is_zero()) return {};
    Polynomial p;
    for (const auto& [m, x] : terms_) p.terms_.emplace_hint(p.terms_.end(), m, x * c);
    return p;
  }

  [[nodiscard]] Polynomial times_monomial(const Monomial& mono) const {
    Polynomial p;
    for (const auto& [m, c] : terms_) p.terms_.emplace(m * mono, c);
    return p;
  }

  /// Scales so the leading coefficient is 1 (zero stays zero).
  [[nodiscard]] Polynomial monic() const {
    if (is_zero()) return {};
    return scaled(leading().second.inverse());
  }

  [[nodiscard]] Polynomial pow(unsigned e) const {
    Polynomial r(1L);
    for (unsigned k = 0; k < e; ++k) r *= *this;
    return r;
  }

  template <class Valuation>
  [[nodiscard]] Number evaluate(const Valuation& value_of) const {
    Number total;
    for (const auto& [m, c] : terms_) {
      Number t = c;
      for (const auto& [v, e] : m.powers()) {
        const Number x = value_of(v);
        for (unsigned k = 0; k < e; ++k) t *= x;
      }
      total += t;
    }
    return total;
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    if (a.terms_.size() != b.terms_.size()) return false;
    auto i = a.terms_.begin();
    auto j = b.terms_.begin();
    for (; i != a.terms_.end(); ++i, ++j) {
      if (!(i->first == j->first) || i->second != j->second) return false;
    }
    return true;
  }
  friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }

  [[nodiscard]] int compare(const Polynomial& o) const {
    auto i = terms_.rbegin();
    auto j = o.terms_.rbegin();
    for (; i != terms_.rend() && j != o.terms_.rend(); ++i, ++j) {
      if (int c = Monomial::compare(i->first, j->first); c != 0) return c;
      if (int c = i->second.compare(j->second); c != 0) return c;
    }
    if (i != terms_.rend()) return 1;
    if (j != o.terms_.rend()) return -1;
    return 0;
  }

  /// Exact quotient a / b, or nullopt when b does not divide a.
  static std::optional<Polynomial> divide(Polynomial a, const Polynomial& b) {
    if (b.is_zero()) throw ArithmeticError("polynomial division by zero");
    if (b.is_constant()) return a.scaled(b.constant_value().inverse());
    Polynomial q;
    const auto& [lm, lc] = b.leading();
    const Number lc_inv = lc.inverse();
    while (!a.is_zero()) {
      const auto& [am, ac] = a.leading();
      auto qm = Monomial::divide(am, lm);
      if (!qm) return std::nullopt;
      const Number qc = ac * lc_inv;
      q.add_term(*qm, qc);
      a -= b.times_monomial(*qm).scaled(qc);
    }
    return q;
  }

  static Polynomial gcd(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero()) return b.monic();
    if (b.is_zero()) return a.monic();
    if (a.is_constant() || b.is_constant()) return Polynomial(1L);
    const auto va = a.variables();
    const auto vb = b.variables();
    const std::string x = std::min(*va.begin(), *vb.begin());
    if (!va.contains(x)) return gcd(a, content(b, x));
    if (!vb.contains(x)) return gcd(content(a, x), b);
    const Polynomial ca = content(a, x);
    const Polynomial cb = content(b, x);
    Polynomial pa = *divide(a, ca);
    Polynomial pb = *divide(b, cb);
    const Polynomial c = gcd(ca, cb);
    if (pa.degree(x) < pb.degree(x)) std::swap(pa, pb);
    while (!pb.is_zero()) {
      Polynomial r = pseudo_remainder(pa, pb, x);
      pa = std::move(pb);
      pb = r.is_zero() ? std::move(r) : primitive_part(r, x);
    }
    return (c * primitive_part(pa, x)).monic();
  }

 private:
  void add_term(const Monomial& m, const Number& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  /// gcd of the coefficients of p viewed as a polynomial in x.
  static Polynomial content(const Polynomial& p, const std::string& x) {
    const unsigned deg = p.degree(x);
    Polynomial g;
    for (unsigned k = 0; k <= deg; ++k) {
      Polynomial c = p.coefficient(x, k);
      if (c.is_zero()) continue;
      g = g.is_zero() ? c.monic() : gcd(g, c);
      if (g.is_constant()) return Polynomial(1L);
    }
    return g;
  }

  static Polynomial primitive_part(const Polynomial& p, const std::string& x) {
    return *divide(p, content(p, x));
  }

  static Polynomial pseudo_remainder(Polynomial r, const Polynomial& b, const std::string& x) {
    const unsigned n = b.degree(x);
    const Polynomial lcb = b.coefficient(x, n);
    while (!r.is_zero() && r.degree(x) >= n) {
      const unsigned k = r.degree(x);
      const Polynomial lcr = r.coefficient(x, k);
      r = lcb * r - (lcr * b).times_monomial(Monomial(x, k - n));
    }
    return r;
  }

  TermMap terms_;
};

}  // namespace spintensor
