#pragma once

#include <cctype>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spintensor/calculus.hpp"
#include "spintensor/error.hpp"
#include "spintensor/tensor_ir.hpp"

namespace spintensor {

/// Parsed expression with the byte span of every top-level term.
struct SourceExpr {
  std::string text;
  Expr expr;
  std::vector<Span> term_spans;
};

/// Resolves `@name` references inside expressions; returns nullopt for unknown names.
using ExprResolver = std::function<std::optional<Expr>(const std::string&)>;

namespace detail {

inline bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
inline bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
inline bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

class ExprParser {
 public:
  ExprParser(std::string_view src, const SymbolTable& table, const ExprResolver* resolver, std::size_t offset)
      : src_(src), table_(table), resolver_(resolver), offset_(offset) {}

  SourceExpr parse() {
    SourceExpr out;
    out.text = std::string(src_);
    skip_ws();
    if (at_end()) fail("empty expression", pos_, pos_);
    out.expr = parse_sum(&out.term_spans);
    skip_ws();
    if (!at_end()) fail(std::string("unexpected '") + peek() + "'", pos_, pos_ + 1);
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& msg, std::size_t b, std::size_t e) const {
    e = std::min(std::max(e, b), src_.size());
    b = std::min(b, src_.size());
    throw ParseError(msg, Span{offset_ + b, offset_ + e});
  }

  bool at_end() const { return pos_ >= src_.size(); }
  char peek() const { return at_end() ? '\0' : src_[pos_]; }
  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }
  bool consume(char c) {
    skip_ws();
    if (peek() != c) return false;
    ++pos_;
    return true;
  }
  void expect(char c) {
    if (!consume(c)) fail(std::string("expected '") + c + "'", pos_, pos_ + 1);
  }

  Expr parse_sum(std::vector<Span>* spans) {
    skip_ws();
    std::size_t start = pos_;
    Expr total = parse_product();
    if (spans) spans->push_back({offset_ + start, offset_ + pos_});
    for (;;) {
      skip_ws();
      const char c = peek();
      if (c != '+' && c != '-') break;
      const std::size_t op = pos_++;
      skip_ws();
      start = pos_;
      Expr rhs = parse_product();
      if (spans) spans->push_back({offset_ + start, offset_ + pos_});
      try {
        total = c == '+' ? total + rhs : total - rhs;
      } catch (const IndexError& err) {
        fail(err.what(), op, pos_);
      }
    }
    return total;
  }

  bool starts_factor() {
    skip_ws();
    const char c = peek();
    return is_ident_start(c) || is_digit(c) || c == '(' || c == '@';
  }

  Expr parse_product() {
    skip_ws();
    const std::size_t start = pos_;
    Expr acc = parse_unary();
    for (;;) {
      skip_ws();
      const std::size_t op = pos_;
      if (consume('*')) {
        acc = multiply(acc, parse_unary(), start);
      } else if (peek() == '/') {
        ++pos_;
        skip_ws();
        const std::size_t dstart = pos_;
        Expr d = parse_unary();
        if (!d.is_scalar()) fail("division by a non-scalar expression", dstart, pos_);
        const Coefficient c = d.scalar_value();
        if (c.is_zero()) fail("division by zero", dstart, pos_);
        acc = scale(acc, c.inverse());
      } else if (starts_factor()) {
        acc = multiply(acc, parse_unary(), start);
      } else {
        (void)op;
        break;
      }
    }
    return acc;
  }

  Expr multiply(const Expr& a, const Expr& b, std::size_t start) {
    try {
      return a * b;
    } catch (const IndexError& err) {
      fail(err.what(), start, pos_);
    }
  }

  Expr parse_unary() {
    skip_ws();
    if (consume('-')) return -parse_unary();
    if (consume('+')) return parse_unary();
    return parse_primary();
  }

  Expr parse_primary() {
    skip_ws();
    const std::size_t start = pos_;
    const char c = peek();
    if (at_end()) fail("unexpected end of expression", pos_, pos_);
    if (is_digit(c)) {
      while (is_digit(peek())) ++pos_;
      return Expr(Coefficient(Rational(std::string(src_.substr(start, pos_ - start)))));
    }
    if (c == '(') {
      ++pos_;
      Expr inner = parse_sum(nullptr);
      expect(')');
      if (inner.is_scalar()) return Expr(inner.scalar_value());
      return inner;
    }
    if (c == '@') {
      ++pos_;
      const std::size_t b = pos_;
      while (is_ident_char(peek()) || peek() == '_' || peek() == '\'') ++pos_;
      const std::string name(src_.substr(b, pos_ - b));
      if (name.empty() || !is_ident_start(name[0])) fail("expected a name after '@'", start, pos_ + 1);
      std::optional<Expr> e = resolver_ && *resolver_ ? (*resolver_)(name) : std::nullopt;
      if (!e) fail("undefined reference '" + name + "'", start, pos_);
      return *e;
    }
    if (!is_ident_start(c)) fail(std::string("unexpected '") + c + "'", pos_, pos_ + 1);
    const std::string name = read_ident();
    if (name == "D" || name == "Nabla") return parse_derivative(start);
    if (name == "i") return Expr(Coefficient(Number::imaginary_unit()));
    if (name == "sqrt2") return Expr(Coefficient(Number::sqrt2()));
    if (name == "sqrt3") return Expr(Coefficient(Number::sqrt3()));
    if (table_.is_scalar(name)) return Expr(Coefficient::symbol(name));
    auto sym = table_.find_tensor(name);
    if (!sym) fail("unknown symbol '" + name + "'", start, pos_);
    std::vector<Index> slots;
    while (peek() == '_' || peek() == '^') {
      auto g = read_group();
      slots.insert(slots.end(), g.begin(), g.end());
    }
    if (static_cast<int>(slots.size()) != sym->rank) {
      fail("tensor '" + name + "' expects " + std::to_string(sym->rank) + " indices, got " + std::to_string(slots.size()),
           start, pos_);
    }
    try {
      return Expr(Term{Coefficient(1L), {Factor{sym, {}, slots}}});
    } catch (const IndexError& err) {
      fail(err.what(), start, pos_);
    }
  }

  Expr parse_derivative(std::size_t start) {
    if (peek() != '_' && peek() != '^') fail("derivative needs an index group", start, pos_ + 1);
    std::vector<Index> idx;
    while (peek() == '_' || peek() == '^') {
      auto g = read_group();
      idx.insert(idx.end(), g.begin(), g.end());
    }
    Expr operand = parse_unary();
    try {
      return apply_derivatives(operand, idx);
    } catch (const IndexError& err) {
      fail(err.what(), start, pos_);
    }
  }

  std::string read_ident() {
    const std::size_t b = pos_;
    if (!is_ident_start(peek())) return {};
    while (is_ident_char(peek())) ++pos_;
    return std::string(src_.substr(b, pos_ - b));
  }

  /// `_{a b}` or `^{c}`: a letter starts a new index; digits and primes extend it.
  std::vector<Index> read_group() {
    const std::size_t start = pos_;
    const Variance v = src_[pos_] == '^' ? Variance::upper : Variance::lower;
    ++pos_;
    if (peek() != '{') fail("expected '{' after index marker", start, pos_ + 1);
    ++pos_;
    std::vector<Index> out;
    for (;;) {
      skip_ws();
      if (at_end()) fail("unterminated index group", start, pos_);
      const char c = peek();
      if (c == '}') {
        ++pos_;
        break;
      }
      if (!is_ident_start(c)) fail(std::string("bad index character '") + c + "'", pos_, pos_ + 1);
      std::string name(1, c);
      ++pos_;
      while (is_digit(peek()) || peek() == '\'') name += src_[pos_++];
      out.push_back(Index{name, v});
    }
    if (out.empty()) fail("empty index group", start, pos_);
    return out;
  }

  std::string_view src_;
  const SymbolTable& table_;
  const ExprResolver* resolver_;
  std::size_t offset_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// `offset` shifts reported spans when the text is a slice of a larger file.
inline SourceExpr parse_source_expr(std::string_view text, const SymbolTable& table, const ExprResolver& resolver = {},
                                    std::size_t offset = 0) {
  return detail::ExprParser(text, table, &resolver, offset).parse();
}

inline Expr parse_expr(std::string_view text, const SymbolTable& table, const ExprResolver& resolver = {},
                       std::size_t offset = 0) {
  return parse_source_expr(text, table, resolver, offset).expr;
}

}  // namespace spintensor
