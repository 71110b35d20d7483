#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace spintensor;

namespace {

const SymbolTable& table() {
  static const SymbolTable t = [] {
    SymbolTable s = standard_symbols();
    const Coefficient e = Coefficient::symbol("e");
    s.declare_tensor("Phi", 0, {}, {}, e);
    s.declare_tensor("PhiV", 1, {}, {}, e);
    s.declare_tensor("PhiS", 2, {{{1, 0}, 1}}, {{0, 1}}, e);
    s.declare_tensor("A", 2, {}, {}, 0);
    s.declare_tensor("Y", 0, {}, {}, 0);
    s.declare_tensor("P", 1, {}, {}, Coefficient(2L) * e);
    return s;
  }();
  return t;
}

Expr ex(const std::string& s) { return parse_expr(s, table()); }

bool equal(const Expr& a, const Expr& b) { return canonical_equal(a, b, table().dimension()); }

Factor factor(const std::string& s) { return ex(s).terms().front().factors.front(); }

}  // namespace

TEST_CASE("derivative: metric compatibility and Leibniz") {
  CHECK(covariant_derivative(ex("g_{bc}"), lower("a")).is_empty());
  CHECK(equal(covariant_derivative(ex("PhiV_{b} PhiV_{c}"), lower("a")),
              ex("D_{a} PhiV_{b} PhiV_{c} + PhiV_{b} D_{a} PhiV_{c}")));
  CHECK(print_expr(covariant_derivative(ex("PhiS_{ba}"), upper("b"))) == "D^{b} PhiS_{b a}");
  CHECK_THROWS_AS(covariant_derivative(ex("PhiV_{a}"), lower("a")), IndexError);
}

TEST_CASE("commutator: charged scalar gives only the gauge term") {
  CHECK(equal(expand_commutator(factor("D_{c} D_{a} Phi"), "c", "a", table()), ex("i e F_{ca} Phi")));
  CHECK(expand_commutator(factor("D_{c} D_{a} Y"), "c", "a", table()).is_empty());
}

TEST_CASE("commutator: neutral rank-2 tensor matches the known rule") {
  CHECK(equal(expand_commutator(factor("D_{c} D_{a} A_{bk}"), "c", "a", table()),
              ex("-A_{nk} R^{n}_{bca} - A_{bn} R^{n}_{kca}")));
}

TEST_CASE("commutator: raised derivative on a charged symmetric tensor") {
  const Expr lhs = ex("D^{c} D_{a} PhiS_{bc} - D_{a} D^{c} PhiS_{bc}");
  const Expr expanded = rewrite_ricci(normal_order(lhs, table()), table(), 1);
  CHECK(equal(expanded, ex("i e F_{ca} PhiS_{b}^{c} + R_{cabn} PhiS^{cn} + Ric_{ac} PhiS^{c}_{b}")));
}

TEST_CASE("commutator: non-adjacent indices are rejected") {
  CHECK_THROWS_AS(expand_commutator(factor("D_{c} D_{d} D_{a} Phi"), "c", "a", table()), IndexError);
}

TEST_CASE("commutator: charges add over products") {
  // [D_c, D_a] (Phi P_b) carries i (e + 2e) F_{ca}.
  const Expr prod = ex("Phi P_{b}");
  const Expr lhs = covariant_derivative(covariant_derivative(prod, lower("a")), lower("c")) -
                   covariant_derivative(covariant_derivative(prod, lower("c")), lower("a"));
  const Expr ordered = normal_order(lhs, table());
  const Expr expected = ex("3 i e F_{ca} Phi P_{b} - Phi P_{n} R^{n}_{bca}");
  CHECK(equal(ordered, expected));
}

TEST_CASE("normal_order: symmetric combinations need no curvature") {
  const Expr e = normal_order(ex("D_{a} D_{b} Y + D_{b} D_{a} Y"), table());
  const Expr c = canonicalize(e, table()).expr;
  REQUIRE(c.terms().size() == 1);
  CHECK(c.terms().front().coeff == Coefficient(2L));
  CHECK(c.terms().front().factors.size() == 1);
}

TEST_CASE("normal_order: idempotent and zero on flat-neutral backgrounds") {
  const Expr lhs = ex("D^{c} D_{a} PhiS_{bc} - D_{a} D^{c} PhiS_{bc}");
  const Expr once = normal_order(lhs, table());
  CHECK(equal(normal_order(once, table()), once));
  CHECK(canonicalize(set_to_zero(once, {"R", "Ric", "F"}), table()).expr.is_empty());
}

TEST_CASE("ricci: contraction signs of the chosen convention") {
  CHECK(equal(rewrite_ricci(ex("R^{m}_{amb}"), table(), 1), ex("Ric_{ab}")));
  CHECK(equal(rewrite_ricci(ex("R^{m}_{abm}"), table(), 1), ex("-Ric_{ab}")));
  CHECK(equal(rewrite_ricci(ex("R^{m}_{mab}"), table(), 1), Expr()));
  CHECK(equal(rewrite_ricci(ex("R^{m}_{amb}"), table(), -1), ex("-Ric_{ab}")));
}

TEST_CASE("project: symmetrizers") {
  CHECK(equal(project(ex("F_{ab}"), ProjectMode::antisymmetrize, {"a", "b"}, table()), ex("F_{ab}")));
  CHECK(project(ex("F_{ab}"), ProjectMode::symmetrize, {"a", "b"}, table()).terms().size() > 0);
  CHECK(canonicalize(project(ex("F_{ab}"), ProjectMode::symmetrize, {"a", "b"}, table()), table()).expr.is_empty());
  CHECK(equal(project(ex("D_{a} PhiV_{b}"), ProjectMode::traceless_symmetrize, {"a", "b"}, table()),
              ex("D_{a} PhiV_{b} + D_{b} PhiV_{a} - 1/2 g_{ab} D^{c} PhiV_{c}")));
  CHECK_THROWS_AS(project(ex("F_{ab}"), ProjectMode::symmetrize, {"a", "z"}, table()), IndexError);
}

TEST_CASE("property: Leibniz rule on random products") {
  testsupport::GenOptions opt;
  opt.max_factors = 1;
  opt.max_derivs = 1;
  opt.max_indices = 3;
  const SymbolTable t = testsupport::test_table();
  testsupport::Generator gen(t, 17, opt);
  for (int k = 0; k < 100; ++k) {
    Term a = gen.term_with_free({lower("a")});
    Term b = gen.term_with_free({upper("b")});
    // Keep dummy names apart.
    std::map<std::string, std::string> ren;
    for (const auto& d : dummy_names(b)) ren[d] = d + "2";
    b = rename_indices(b, ren);
    const Expr ea(a), eb(b);
    const Index x = lower("c");
    const Expr lhs = covariant_derivative(ea * eb, x);
    const Expr rhs = covariant_derivative(ea, x) * eb + ea * covariant_derivative(eb, x);
    CHECK(canonical_equal(lhs, rhs, 4));
  }
}
