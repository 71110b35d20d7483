#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace spintensor;
using testsupport::Generator;

namespace {

const SymbolTable& table() {
  static const SymbolTable t = [] {
    SymbolTable s = testsupport::test_table();
    s.declare_tensor("Phi", 2, {{{1, 0}, 1}}, {{0, 1}}, Coefficient::symbol("e"));
    s.declare_tensor("B", 1, {}, {}, 0);
    return s;
  }();
  return t;
}

bool zero(const std::string& s) { return is_zero(parse_expr(s, table()), table().dimension()); }

Expr canon(const std::string& s) { return canonicalize(parse_expr(s, table()), table()).expr; }

}  // namespace

TEST_CASE("canonicalize: declared symmetries") {
  CHECK(zero("R_{abcd} - R_{cdab}"));
  CHECK(zero("R_{abcd} + R_{bacd}"));
  CHECK(zero("F_{ab} + F_{ba}"));
  CHECK_FALSE(zero("F_{ab} - F_{ba}"));
  CHECK(zero("R^{a}_{acd}"));
  CHECK(zero("F^{a}_{a}"));
}

TEST_CASE("canonicalize: traceless fields and metric traces") {
  CHECK(zero("g^{ac} Phi_{ac}"));
  CHECK(zero("Phi^{m}_{m}"));
  CHECK(zero("g^{ab} g_{ab} - 4"));
  CHECK(zero("g_{ab} B^{b} - B_{a}"));
  CHECK(zero("g^{ab} F_{bc} - F^{a}_{c}"));
}

TEST_CASE("canonicalize: dummy relabelling and variance") {
  CHECK(zero("V^{m} U_{m} - V^{c} U_{c}"));
  CHECK(zero("V^{m} U_{m} - V_{n} U^{n}"));
  CHECK(zero("R_{ambn} S^{mn} - R_{apbq} S^{qp}"));
  CHECK(print_expr(canon("V^{c} U_{c}")) == "U_{m}*V^{m}");
}

TEST_CASE("canonicalize: like terms combine") {
  CHECK(print_expr(canon("2 V_{a} + 3 V_{a}")) == "5*V_{a}");
  CHECK(print_expr(canon("mu V_{a} - mu V_{a}")) == "0");
  const Expr e = parse_expr("V_{a}", table());
  CHECK(canonicalize(combine({{Coefficient(1L), e}, {Coefficient(-1L), e}}), table()).expr.is_empty());
}

TEST_CASE("canonicalize: derivative strings are ordered data") {
  CHECK_FALSE(zero("D_{a} D_{b} V_{c} - D_{b} D_{a} V_{c}"));
  CHECK(zero("D_{a} D_{b} S_{cd} - D_{a} D_{b} S_{dc}"));
  CHECK(zero("D^{m} D_{m} X - D_{n} D^{n} X"));
}

TEST_CASE("brute_equiv: basic verdicts") {
  auto term = [](const std::string& s) { return parse_expr(s, table()).terms().front(); };
  CHECK(brute_equiv(term("F_{ba}"), term("-F_{ab}")));
  CHECK_FALSE(brute_equiv(term("R_{abcd}"), term("R_{bacd}")));
  CHECK(brute_equiv(term("R_{abcd}"), term("-R_{bacd}")));
  CHECK(BruteEquiv::vanishes(term("R^{a}_{acd}")));
  CHECK(BruteEquiv::vanishes(term("S^{m}_{m}")));
  CHECK_THROWS_AS(brute_equiv(term("g_{ab}"), term("g_{ba}")), IndexError);
}

TEST_CASE("property: canonical equality agrees with brute-force enumeration") {
  Generator gen(table(), 20240601);
  int cases = 0, equal = 0, distinct = 0, vanishing = 0;
  for (int k = 0; k < 600; ++k) {
    const Term a = gen.term();
    const Term b = gen.coin(0.5) ? gen.symmetric_image(a) : gen.perturbed(a);
    const bool brute = brute_equiv(a, b);
    const bool canonical = canonical_equal(Expr(a), Expr(b), 4);
    INFO(print_term(a) << "  vs  " << print_term(b));
    CHECK(brute == canonical);
    const bool vz = BruteEquiv::vanishes(a);
    CHECK(vz == is_zero(Expr(a), 4));
    ++cases;
    (brute ? equal : distinct)++;
    vanishing += vz ? 1 : 0;
  }
  CHECK(cases >= 500);
  CHECK(equal > 100);
  CHECK(distinct > 100);
  CHECK(vanishing > 10);
}

TEST_CASE("property: symmetric images always canonicalize identically") {
  Generator gen(table(), 99);
  for (int k = 0; k < 500; ++k) {
    const Term a = gen.term();
    const Term b = gen.symmetric_image(a);
    CHECK(print_expr(canonicalize(Expr(a), 4).expr) == print_expr(canonicalize(Expr(b), 4).expr));
  }
}

TEST_CASE("property: canonicalize is idempotent") {
  testsupport::GenOptions opt;
  opt.metric = true;
  opt.max_derivs = 2;
  Generator gen(table(), 5, opt);
  for (int k = 0; k < 500; ++k) {
    const Expr e = gen.expr();
    const Expr once = canonicalize(e, 4).expr;
    const Expr twice = canonicalize(once, 4).expr;
    CHECK(print_expr(once) == print_expr(twice));
  }
}
