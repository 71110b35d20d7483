#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace spintensor;

namespace {

const SymbolTable& table() {
  static const SymbolTable t = [] {
    SymbolTable s = testsupport::test_table();
    s.declare_tensor("Psi", 0, {}, {}, Coefficient::symbol("e"));
    s.declare_tensor("B", 1, {}, {}, Coefficient::symbol("e"));
    s.declare_tensor("Phi", 1, {}, {}, Coefficient::symbol("e"));
    return s;
  }();
  return t;
}

Expr ex(const std::string& s) { return parse_expr(s, table()); }

Span error_span(const std::string& s) {
  try {
    (void)ex(s);
  } catch (const ParseError& e) {
    return e.span();
  }
  FAIL("no parse error for '" << s << "'");
  return {};
}

}  // namespace

TEST_CASE("parse: products, coefficients and derivatives") {
  CHECK(is_zero(ex("F_{b a} + F_{a b}"), 4));
  const Expr eq = ex("2*D^{a} B_{a} + i*M*Psi");
  REQUIRE(eq.terms().size() == 2);
  CHECK(eq.free().empty());
  CHECK(print_expr(eq) == "2*D^{a} B_{a} + i*M*Psi");
  CHECK(is_zero(ex("2 D^{a} B_{a} + i M Psi") - eq, 4));
  CHECK(print_expr(ex("-1/2 g_{ab} D^{c} Phi_{c}")) == "-(1/2)*g_{a b}*D^{c} Phi_{c}");
  CHECK(print_expr(ex("Nabla_{a} X")) == "D_{a} X");
  CHECK(print_expr(ex("sqrt2 sqrt3 X")) == "sqrt2*sqrt3*X");
  CHECK(print_expr(ex("X/(2 mu)")) == "(1/2)/(mu)*X");
}

TEST_CASE("parse: derivative binds the following factor or group") {
  CHECK(is_zero(ex("D_{a} (V_{b} U_{c}) - D_{a} V_{b} U_{c} - V_{b} D_{a} U_{c}"), 4));
  CHECK(print_expr(ex("D_{a} D_{b} X")) == "D_{a} D_{b} X");
  CHECK(ex("D_{a} mu").is_empty());
}

TEST_CASE("parse: index groups") {
  const Expr e = ex("R^{a}_{b c}^{d}");
  const auto& f = e.terms().front().factors.front();
  CHECK(f.slots == std::vector<Index>{upper("a"), lower("b"), lower("c"), upper("d")});
  CHECK(ex("V_{a1}").free() == std::vector<Index>{lower("a1")});
  CHECK(ex("V_{a'}").free() == std::vector<Index>{lower("a'")});
}

TEST_CASE("parse: errors carry spans inside the input") {
  const std::vector<std::string> bad = {
      "A_{a} B_{a}",  "V_{a} V_{a}", "F_{a}",       "Q_{a}",   "V_{a} +",  "(V_{a}",     "V_{}",
      "V_{1}",        "V_{a} + U_{b}", "D X",       "2 / 0",   "V_{a}/U_{a}", "@missing", "$",
      "",             "V_{a} )",     "F^{a b c}",   "V{a}",    "D_{a}",
  };
  for (const auto& s : bad) {
    INFO("input: '" << s << "'");
    bool threw = false;
    try {
      (void)ex(s);
    } catch (const ParseError& e) {
      threw = true;
      CHECK(e.span().begin <= e.span().end);
      CHECK(e.span().end <= s.size());
      CHECK(std::string(e.what()).find("at bytes [") != std::string::npos);
    }
    CHECK(threw);
  }
}

TEST_CASE("parse: span points at the offending token") {
  const Span s = error_span("V_{a} + Q_{b}");
  CHECK(s.begin == 8);
  CHECK(s.end == 9);
  const Span same = error_span("V_{a} U_{a}");
  CHECK(same.begin == 0);
  CHECK(same.end == 11);
}

TEST_CASE("parse: offsets shift spans") {
  try {
    (void)parse_expr("Q", table(), {}, 100);
    FAIL("expected an error");
  } catch (const ParseError& e) {
    CHECK(e.span().begin == 100);
    CHECK(e.span().end == 101);
  }
}

TEST_CASE("parse: references resolve through the resolver") {
  const Expr v = ex("V_{a}");
  ExprResolver r = [&](const std::string& n) -> std::optional<Expr> {
    if (n == "eq_1") return v;
    return std::nullopt;
  };
  CHECK(is_zero(parse_expr("2 @eq_1 - V_{a} - V_{a}", table(), r), 4));
  CHECK_THROWS_AS(parse_expr("@eq9", table(), r), ParseError);
}

TEST_CASE("print: zero and determinism") {
  CHECK(print_expr(Expr()) == "0");
  CHECK(print_expr(canonicalize(ex("F_{ab} + F_{ba}"), 4).expr) == "0");
  CHECK(print_expr(ex("(1/3 mu + 1/2) X")) == "((1/3)*mu + 1/2)*X");
  CHECK(print_coefficient(ex("(1/3 mu + 1/2)").scalar_value()) == "(1/3)*mu + 1/2");
  CHECK(print_coefficient(ex("-1/4").scalar_value()) == "-1/4");
}

TEST_CASE("property: parse after print is the identity up to canonical equality") {
  testsupport::GenOptions opt;
  opt.metric = true;
  opt.max_derivs = 2;
  testsupport::Generator gen(table(), 314159, opt);
  int n = 0;
  for (int k = 0; k < 600; ++k) {
    const Expr e = gen.expr(4);
    const std::string text = print_expr(e);
    INFO(text);
    const Expr back = ex(text);
    CHECK(canonical_equal(e, back, 4));
    CHECK(print_expr(back) == text);
    const Expr c = canonicalize(e, 4).expr;
    CHECK(print_expr(ex(print_expr(c))) == print_expr(c));
    ++n;
  }
  CHECK(n >= 500);
}

TEST_CASE("property: error spans lie within the input for random corruptions") {
  testsupport::Generator gen(table(), 8);
  std::mt19937_64 rng(8);
  int errors = 0;
  for (int k = 0; k < 300; ++k) {
    std::string text = print_expr(gen.expr());
    const std::size_t at = std::uniform_int_distribution<std::size_t>(0, text.size() - 1)(rng);
    const char junk[] = {'{', '}', '_', '^', '$', '(', ')', '@', '/'};
    text[at] = junk[std::uniform_int_distribution<int>(0, 8)(rng)];
    try {
      (void)ex(text);
    } catch (const ParseError& e) {
      ++errors;
      CHECK(e.span().begin <= e.span().end);
      CHECK(e.span().end <= text.size());
    } catch (const Error& e) {
      FAIL("non-parse error for '" << text << "': " << e.what());
    }
  }
  CHECK(errors > 100);
}
