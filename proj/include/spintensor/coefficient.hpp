#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>

#include "spintensor/polynomial.hpp"

namespace spintensor {

/// Rational function in scalar symbols over Q(i, sqrt2, sqrt3).
///
/// Always reduced: gcd(numerator, denominator) = 1 and the denominator has
/// leading coefficient 1, so structural equality is mathematical equality.
class Coefficient {
 public:
  Coefficient() : den_(1L) {}
  Coefficient(long c) : num_(c), den_(1L) {}                  // NOLINT(google-explicit-constructor)
  Coefficient(const Number& c) : num_(c), den_(1L) {}         // NOLINT(google-explicit-constructor)
  Coefficient(const Rational& c) : num_(Number(c)), den_(1L) {}  // NOLINT(google-explicit-constructor)
  Coefficient(Polynomial p) : num_(std::move(p)), den_(1L) {}  // NOLINT(google-explicit-constructor)
  Coefficient(Polynomial num, Polynomial den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw ArithmeticError("zero denominator");
    normalize();
  }

  static Coefficient symbol(const std::string& name) { return Coefficient(Polynomial::variable(name)); }
  static Coefficient fraction(long p, long q) { return Coefficient(ratio(p, q)); }

  [[nodiscard]] const Polynomial& numerator() const { return num_; }
  [[nodiscard]] const Polynomial& denominator() const { return den_; }

  [[nodiscard]] bool is_zero() const { return num_.is_zero(); }
  [[nodiscard]] bool is_one() const { return den_.is_one() && num_.is_one(); }
  [[nodiscard]] bool is_polynomial() const { return den_.is_one(); }
  [[nodiscard]] bool is_constant() const { return den_.is_one() && num_.is_constant(); }
  [[nodiscard]] Number constant_value() const { return num_.constant_value(); }

  [[nodiscard]] std::set<std::string> variables() const {
    auto v = num_.variables();
    auto d = den_.variables();
    v.insert(d.begin(), d.end());
    return v;
  }

  Coefficient operator-() const {
    Coefficient r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }

  friend Coefficient operator+(const Coefficient& a, const Coefficient& b) {
    if (a.den_.is_one() && b.den_.is_one()) return Coefficient(a.num_ + b.num_);
    if (a.den_ == b.den_) return Coefficient(a.num_ + b.num_, a.den_);
    return Coefficient(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend Coefficient operator-(const Coefficient& a, const Coefficient& b) { return a + (-b); }

  friend Coefficient operator*(const Coefficient& a, const Coefficient& b) {
    if (a.is_zero() || b.is_zero()) return {};
    if (a.den_.is_one() && b.den_.is_one()) return Coefficient(a.num_ * b.num_);
    return Coefficient(a.num_ * b.num_, a.den_ * b.den_);
  }

  [[nodiscard]] Coefficient inverse() const {
    if (is_zero()) throw ArithmeticError("division by a zero coefficient");
    return Coefficient(den_, num_);
  }

  friend Coefficient operator/(const Coefficient& a, const Coefficient& b) { return a * b.inverse(); }

  Coefficient& operator+=(const Coefficient& o) { return *this = *this + o; }
  Coefficient& operator-=(const Coefficient& o) { return *this = *this - o; }
  Coefficient& operator*=(const Coefficient& o) { return *this = *this * o; }
  Coefficient& operator/=(const Coefficient& o) { return *this = *this / o; }

  [[nodiscard]] Coefficient pow(unsigned e) const {
    Coefficient r(1L);
    for (unsigned k = 0; k < e; ++k) r *= *this;
    return r;
  }

  friend bool operator==(const Coefficient& a, const Coefficient& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Coefficient& a, const Coefficient& b) { return !(a == b); }

  [[nodiscard]] int compare(const Coefficient& o) const {
    if (int c = den_.compare(o.den_); c != 0) return c;
    return num_.compare(o.num_);
  }

  /// Replaces scalar symbols by coefficients; symbols missing from the map stay.
  [[nodiscard]] Coefficient substitute(const std::map<std::string, Coefficient>& values) const {
    return substitute_poly(num_, values) / substitute_poly(den_, values);
  }

  /// Exact value under a valuation of every symbol; throws on a vanishing denominator.
  [[nodiscard]] Number evaluate(const std::function<Number(const std::string&)>& value_of) const {
    const Number d = den_.evaluate(value_of);
    if (d.is_zero()) throw ArithmeticError("coefficient denominator vanishes at the sample point");
    return num_.evaluate(value_of) / d;
  }

 private:
  void normalize() {
    if (num_.is_zero()) {
      den_ = Polynomial(1L);
      return;
    }
    if (!den_.is_constant()) {
      const Polynomial g = Polynomial::gcd(num_, den_);
      if (!g.is_constant()) {
        num_ = *Polynomial::divide(num_, g);
        den_ = *Polynomial::divide(den_, g);
      }
    }
    const Number lead_inv = den_.leading().second.inverse();
    if (!lead_inv.is_one()) {
      num_ = num_.scaled(lead_inv);
      den_ = den_.scaled(lead_inv);
    }
  }

  static Coefficient substitute_poly(const Polynomial& p, const std::map<std::string, Coefficient>& values) {
    Coefficient total;
    for (const auto& [m, c] : p.terms()) {
      Coefficient t(c);
      Monomial rest;
      for (const auto& [v, e] : m.powers()) {
        auto it = values.find(v);
        if (it == values.end()) {
          rest = rest * Monomial(v, e);
        } else {
          t *= it->second.pow(e);
        }
      }
      if (!rest.is_one()) t *= Coefficient(Polynomial::monomial(rest, Number(1L)));
      total += t;
    }
    return total;
  }

  Polynomial num_;
  Polynomial den_;
};

}  // namespace spintensor
