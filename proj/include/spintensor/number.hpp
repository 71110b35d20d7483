#pragma once

#include <gmpxx.h>

#include <array>
#include <bit>
#include <string>

#include "spintensor/error.hpp"

namespace spintensor {

using Rational = mpq_class;

/// p/q in lowest terms; mpq_class(p, q) alone is not canonical.
inline Rational ratio(long p, long q) {
  Rational r(p, q);
  r.canonicalize();
  return r;
}

/// Exact element of Q(i, sqrt2, sqrt3).
///
/// Stored as eight rational components over the basis
///   e_k = i^{(k>>2)&1} * sqrt2^{k&1} * sqrt3^{(k>>1)&1},   k = 0..7,
/// so component 3 is the sqrt6 part and component 4 the purely imaginary
/// rational part. Multiplication reduces with i^2 = -1, sqrt2^2 = 2, sqrt3^2 = 3.
class Number {
 public:
  static constexpr int kBasis = 8;
  static constexpr int kSqrt2 = 1;
  static constexpr int kSqrt3 = 2;
  static constexpr int kImag = 4;

  Number() = default;
  Number(long value) { c_[0] = value; }  // NOLINT(google-explicit-constructor)
  Number(const Rational& value) { c_[0] = value; }  // NOLINT(google-explicit-constructor)

  static Number basis(int k, const Rational& value = 1) {
    Number n;
    n.c_[k] = value;
    return n;
  }
  static Number imaginary_unit() { return basis(kImag); }
  static Number sqrt2() { return basis(kSqrt2); }
  static Number sqrt3() { return basis(kSqrt3); }

  [[nodiscard]] const Rational& component(int k) const { return c_[k]; }

  [[nodiscard]] bool is_zero() const {
    for (const auto& x : c_) {
      if (sgn(x) != 0) return false;
    }
    return true;
  }

  [[nodiscard]] bool is_rational() const {
    for (int k = 1; k < kBasis; ++k) {
      if (sgn(c_[k]) != 0) return false;
    }
    return true;
  }

  [[nodiscard]] bool is_one() const { return is_rational() && c_[0] == 1; }

  /// Sign of the first nonzero component (0 for zero). Used to pick a print sign.
  [[nodiscard]] int leading_sign() const {
    for (const auto& x : c_) {
      if (int s = sgn(x); s != 0) return s;
    }
    return 0;
  }

  /// Number of nonzero basis components.
  [[nodiscard]] int support_size() const {
    int n = 0;
    for (const auto& x : c_) n += sgn(x) != 0 ? 1 : 0;
    return n;
  }

  Number operator-() const {
    Number r;
    for (int k = 0; k < kBasis; ++k) r.c_[k] = -c_[k];
    return r;
  }

  Number& operator+=(const Number& o) {
    for (int k = 0; k < kBasis; ++k) c_[k] += o.c_[k];
    return *this;
  }
  Number& operator-=(const Number& o) {
    for (int k = 0; k < kBasis; ++k) c_[k] -= o.c_[k];
    return *this;
  }
  Number& operator*=(const Number& o) {
    *this = *this * o;
    return *this;
  }
  Number& operator/=(const Number& o) {
    *this = *this / o;
    return *this;
  }

  friend Number operator+(Number a, const Number& b) { return a += b; }
  friend Number operator-(Number a, const Number& b) { return a -= b; }

  friend Number operator*(const Number& a, const Number& b) {
    Number r;
    Rational t;
    for (int j = 0; j < kBasis; ++j) {
      if (sgn(a.c_[j]) == 0) continue;
      for (int k = 0; k < kBasis; ++k) {
        if (sgn(b.c_[k]) == 0) continue;
        const int common = j & k;
        long factor = 1;
        if (common & kSqrt2) factor *= 2;
        if (common & kSqrt3) factor *= 3;
        if (common & kImag) factor = -factor;
        t = a.c_[j] * b.c_[k];
        if (factor != 1) t *= factor;
        r.c_[j ^ k] += t;
      }
    }
    return r;
  }

  /// Galois conjugate flipping the sign of every generator in `mask`.
  [[nodiscard]] Number conjugate(int mask) const {
    Number r = *this;
    for (int k = 0; k < kBasis; ++k) {
      if (std::popcount(static_cast<unsigned>(k & mask)) % 2 == 1) r.c_[k] = -r.c_[k];
    }
    return r;
  }

  [[nodiscard]] Number inverse() const {
    if (is_zero()) throw ArithmeticError("division by zero in Q(i, sqrt2, sqrt3)");
    if (is_rational()) return Number(Rational(1) / c_[0]);
    Number others(1L);
    for (int mask = 1; mask < kBasis; ++mask) others *= conjugate(mask);
    const Number norm = *this * others;
    // The norm is fixed by every automorphism, hence rational.
    return others * Number(Rational(1) / norm.c_[0]);
  }

  friend Number operator/(const Number& a, const Number& b) { return a * b.inverse(); }

  friend bool operator==(const Number& a, const Number& b) {
    for (int k = 0; k < kBasis; ++k) {
      if (a.c_[k] != b.c_[k]) return false;
    }
    return true;
  }
  friend bool operator!=(const Number& a, const Number& b) { return !(a == b); }

  /// Total order: lexicographic on components.
  [[nodiscard]] int compare(const Number& o) const {
    for (int k = 0; k < kBasis; ++k) {
      if (int c = cmp(c_[k], o.c_[k]); c != 0) return c < 0 ? -1 : 1;
    }
    return 0;
  }

  /// Splits into (real, imaginary) parts, both in Q(sqrt2, sqrt3).
  [[nodiscard]] std::array<Number, 2> real_imag() const {
    Number re, im;
    for (int k = 0; k < kImag; ++k) {
      re.c_[k] = c_[k];
      im.c_[k] = c_[k + kImag];
    }
    return {re, im};
  }

  /// Debug/witness rendering, e.g. "3/2 - 1/4*sqrt6*i".
  [[nodiscard]] std::string to_string() const {
    static const char* kAtoms[kBasis] = {"",          "sqrt2",          "sqrt3",          "sqrt6",
                                         "i",         "sqrt2*i",        "sqrt3*i",        "sqrt6*i"};
    std::string out;
    for (int k = 0; k < kBasis; ++k) {
      if (sgn(c_[k]) == 0) continue;
      Rational mag = abs(c_[k]);
      const bool neg = sgn(c_[k]) < 0;
      if (out.empty()) {
        if (neg) out += "-";
      } else {
        out += neg ? " - " : " + ";
      }
      if (k == 0) {
        out += mag.get_str();
      } else if (mag == 1) {
        out += kAtoms[k];
      } else {
        out += mag.get_str() + "*" + kAtoms[k];
      }
    }
    return out.empty() ? "0" : out;
  }

 private:
  std::array<Rational, kBasis> c_{};
};

}  // namespace spintensor
