#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace spintensor;

namespace {

SymbolTable spin_table() {
  SymbolTable s = standard_symbols();
  const Coefficient e = Coefficient::symbol("e");
  s.declare_tensor("Psi", 0, {}, {}, e);
  s.declare_tensor("B", 1, {}, {}, e);
  s.declare_tensor("C", 1, {}, {}, e);
  s.declare_tensor("PsiS", 2, {{{1, 0}, 1}}, {{0, 1}}, e);
  s.declare_tensor("Q", 1, {}, {}, 0);
  return s;
}

const SymbolTable& table() {
  static const SymbolTable t = spin_table();
  return t;
}

Expr ex(const std::string& s) { return parse_expr(s, table()); }

bool equal(const Expr& a, const Expr& b) { return canonical_equal(a, b, 4); }

const std::string kHeader =
    "tensor Psi rank=0 charge=e\n"
    "tensor B rank=1 charge=e\n"
    "tensor C rank=1 charge=e\n"
    "tensor PsiS rank=2 sym=(+21) traceless=(12) charge=e\n";

Report run(const std::string& body, EngineOptions opt = {}) { return run_script(kHeader + body, standard_symbols(), opt); }

const StepRecord& step(const Report& r, const std::string& name) {
  for (const auto& s : r.steps) {
    if (s.name == name) return s;
  }
  FAIL("no step '" << name << "'");
  return r.steps.front();
}

}  // namespace

TEST_CASE("solve_for: scalar equation") {
  const Rule r = solve_for(ex("2 D^{a} B_{a} + i M Psi"), "Psi", table());
  CHECK(r.pattern.name() == "Psi");
  CHECK(equal(r.replacement, ex("2 i/M D^{a} B_{a}")));
}

TEST_CASE("solve_for: vector equation keeps its free index pattern") {
  const Rule r = solve_for(ex("M C_{a} - 3 D_{a} Psi + mu B_{a}"), "C", table());
  CHECK(r.pattern.slots == std::vector<Index>{lower("a")});
  CHECK(equal(r.replacement, ex("3/M D_{a} Psi - mu/M B_{a}")));
}

TEST_CASE("solve_for: refusals") {
  CHECK_THROWS_WITH(solve_for(ex("D^{a} B_{a}"), "Psi", table()), Catch::Matchers::ContainsSubstring("absent"));
  CHECK_THROWS_WITH(solve_for(ex("D^{a} B_{a} + M Psi"), "B", table()),
                    Catch::Matchers::ContainsSubstring("under a derivative"));
  CHECK_THROWS_WITH(solve_for(ex("B^{a} B_{a} + Psi"), "B", table()), Catch::Matchers::ContainsSubstring("multiplied"));
  CHECK_THROWS_WITH(solve_for(ex("B_{a} + Psi B_{a}"), "B", table()), Catch::Matchers::ContainsSubstring("independent terms"));
  CHECK_THROWS_WITH(solve_for(ex("M PsiS^{m}_{a} B_{m} + B_{a}"), "PsiS", table()),
                    Catch::Matchers::ContainsSubstring("multiplied"));
  CHECK_THROWS_AS(solve_for(ex("B_{a}"), "Nope", table()), DerivationError);
}

TEST_CASE("substitute: derivatives are distributed by Leibniz") {
  const Rule r = make_rule(ex("C_{a}"), ex("D_{a} Psi + mu B_{a}"));
  const Expr out = substitute(ex("D^{b} C_{b} + Psi C_{a} B^{a}"), {r}, table());
  CHECK(equal(out, ex("D^{b} D_{b} Psi + mu D^{b} B_{b} + Psi D_{a} Psi B^{a} + mu Psi B_{a} B^{a}")));
}

TEST_CASE("substitute: raised occurrences get metric factors") {
  const Rule r = make_rule(ex("C_{a}"), ex("mu B_{a}"));
  CHECK(equal(substitute(ex("C^{b}"), {r}, table()), ex("mu B^{b}")));
  const Rule s = make_rule(ex("PsiS_{ab}"), ex("D_{a} B_{b} + D_{b} B_{a} - 1/2 g_{ab} D^{c} B_{c}"));
  CHECK(equal(substitute(ex("D^{c} PsiS_{c}^{b}"), {s}, table()),
              ex("D^{c} D_{c} B^{b} + D^{c} D^{b} B_{c} - 1/2 D^{b} D^{c} B_{c}")));
}

TEST_CASE("substitute: identity rule and simultaneous rules") {
  const Rule id = make_rule(ex("B_{a}"), ex("B_{a}"));
  const Expr e = ex("D^{a} B_{a} + M Psi");
  CHECK(equal(substitute(e, {id}, table()), e));
  const Rule swap1 = make_rule(ex("B_{a}"), ex("C_{a}"));
  const Rule swap2 = make_rule(ex("C_{a}"), ex("B_{a}"));
  CHECK(equal(substitute(ex("B_{a} - 2 C_{a}"), {swap1, swap2}, table()), ex("C_{a} - 2 B_{a}")));
  CHECK_THROWS_AS(substitute(e, {id, id}, table()), DerivationError);
}

TEST_CASE("make_rule: validation") {
  CHECK_THROWS_AS(make_rule(ex("2 B_{a}"), ex("C_{a}")), DerivationError);
  CHECK_THROWS_AS(make_rule(ex("D_{a} Psi"), ex("C_{a}")), DerivationError);
  CHECK_THROWS_AS(make_rule(ex("F_{ab}"), ex("F_{ab}")), DerivationError);
  CHECK_THROWS_AS(make_rule(ex("PsiS^{m}_{m}"), ex("0")), DerivationError);
  CHECK_THROWS_AS(make_rule(ex("B_{a}"), ex("C_{b}")), DerivationError);
}

TEST_CASE("proportionality") {
  auto r = proportionality(ex("2 mu B_{a} + 4 D_{a} Psi"), ex("mu B_{a} + 2 D_{a} Psi"), table());
  REQUIRE(r);
  CHECK(*r == Coefficient(2L));
  CHECK_FALSE(proportionality(ex("B_{a} + D_{a} Psi"), ex("B_{a} - D_{a} Psi"), table()));
  CHECK_FALSE(proportionality(ex("B_{a}"), Expr(), table()));
}

TEST_CASE("property: solve_for is sound on random linear equations") {
  const SymbolTable t = testsupport::test_table();
  testsupport::GenOptions opt;
  opt.max_indices = 5;
  testsupport::Generator gen(t, 4242, opt);
  const std::vector<std::pair<std::string, int>> targets = {{"X", 0}, {"V", 1}, {"N", 2}};
  int solved = 0;
  for (int k = 0; k < 200; ++k) {
    const auto& [name, rank] = targets[static_cast<std::size_t>(k % 3)];
    std::vector<Index> free;
    const char* names[] = {"a", "b"};
    for (int j = 0; j < rank; ++j) free.push_back(Index{names[j], gen.coin() ? Variance::upper : Variance::lower});
    std::vector<Term> ts{Term{gen.coefficient(), {Factor{t.tensor(name), {}, free}}}};
    for (int j = gen.uniform(1, 3); j > 0; --j) {
      Term r = gen.term_with_free(free);
      const bool uses = std::any_of(r.factors.begin(), r.factors.end(), [&](const Factor& f) { return f.name() == name; });
      if (!uses) ts.push_back(std::move(r));
    }
    const Expr eq = Expr::from_terms(ts);
    const Rule rule = solve_for(eq, name, t);
    INFO(print_expr(eq));
    CHECK(canonicalize(substitute(eq, {rule}, t), t).expr.is_empty());
    ++solved;
  }
  CHECK(solved == 200);
}

TEST_CASE("scripts: structure and references") {
  const Script s = parse_script(kHeader +
                                "bc_b: define 2 D^{b} PsiS_{ba} + M C_{a}\n"
                                "bc_c: define D_{a} Psi - M B_{a} + 1/2 M C_{a}\n"
                                "c_rule: solve bc_b C\n");
  CHECK(s.steps.size() == 7);
  CHECK(parse_script("").steps.empty());
  CHECK(parse_script("# only a comment\n\n").steps.empty());
  CHECK_THROWS_WITH(parse_script("x: assert_zero @eq9\n"), Catch::Matchers::ContainsSubstring("eq9"));
  CHECK_THROWS_WITH(parse_script("x: assert_equal eq9, eq9\n"), Catch::Matchers::ContainsSubstring("undefined reference 'eq9'"));
  CHECK_THROWS_AS(parse_script("x: frobnicate 1\n"), ParseError);
  CHECK_THROWS_AS(parse_script("x: define 1\nx: define 2\n"), ParseError);
  CHECK_THROWS_AS(parse_script("define 1\n"), ParseError);
  CHECK_THROWS_AS(parse_script("x: solve onlyone\n"), ParseError);
}

TEST_CASE("scripts: continuation lines keep byte offsets") {
  const Report ok = run("a: define B_{a} \\\n   + C_{a}\nb: assert_equal a, C_{a} + B_{a}\n");
  CHECK(ok.passed);
  const Report bad = run_script("tensor B rank=1\na: define B_{a} \\\n   + Z_{a}\n", standard_symbols());
  REQUIRE(bad.steps.size() == 2);
  CHECK(bad.exit_code() == 2);
  CHECK(bad.parse_failure);
  CHECK(bad.steps.back().detail.find("at bytes [39, 40)") != std::string::npos);
}

TEST_CASE("engine: a small derivation passes") {
  const Report r = run(
      "L: lambdas\n"
      "ok: assert_lambdas L\n"
      "bc_scalar: define 2 D^{a} B_{a} + i M Psi\n"
      "psi: solve bc_scalar Psi\n"
      "e: define D_{b} Psi\n"
      "s: substitute e psi\n"
      "check: assert_equal s, 2 i/M D_{b} D^{a} B_{a}\n"
      "k: define (lam1 lam3 + lam2 lam5) B_{a}\n"
      "k2: constrain k with L\n"
      "quarter: assert_equal k2, -1/4 B_{a}\n"
      "same: assert_equal k, -1/4 B_{a} under L\n"
      "m: specialize k mu=0\n"
      "prop: assert_proportional k, B_{a}\n");
  INFO(r.text());
  CHECK(r.passed);
  CHECK(r.exit_code() == 0);
  CHECK(r.assertions == 5);
  CHECK(step(r, "psi").detail == "Psi -> (2*i)/(M)*D_{m} B^{m}");
  CHECK(step(r, "prop").detail == "ratio lam1*lam3 + lam2*lam5");
}

TEST_CASE("engine: failures stop the run and print the residue") {
  const Report r = run(
      "a: define D_{a} Psi\n"
      "bad: assert_zero a\n"
      "never: define B_{a}\n");
  CHECK_FALSE(r.passed);
  CHECK(r.exit_code() == 1);
  CHECK(r.failed_step == "bad");
  CHECK(r.steps.back().status == "FAIL");
  CHECK(r.steps.back().residue == "D_{a} Psi");
  CHECK(r.text(false).find("FAIL: 6 steps, 1 checks, stopped at 'bad'") != std::string::npos);
}

TEST_CASE("engine: runtime errors are reported as errors") {
  const Report r = run("a: define B_{a}\nb: solve a Psi\n");
  CHECK_FALSE(r.passed);
  CHECK(r.exit_code() == 1);
  CHECK(r.steps.back().status == "error");
  CHECK(r.steps.back().detail.find("absent") != std::string::npos);
}

TEST_CASE("engine: curvature commands and the Ricci convention") {
  const Report r = run(
      "tensor A rank=2\n"
      "lhs: define D^{c} D_{a} A_{bc} - D_{a} D^{c} A_{bc}\n"
      "ordered: normal_order lhs\n"
      "early: ricci ordered\n");
  CHECK_FALSE(r.passed);
  CHECK(r.steps.back().detail.find("no Ricci convention") != std::string::npos);

  const Report ok = run(
      "tensor A rank=2\n"
      "lhs: define D^{c} D_{a} A_{bc} - D_{a} D^{c} A_{bc}\n"
      "ordered: normal_order lhs\n"
      "sign: ricci_convention ordered, R_{cabn} A^{nc} + A_{b}^{n} Ric_{na}\n"
      "expanded: ricci ordered\n"
      "same: assert_equal expanded, R_{cabn} A^{nc} + A_{b}^{n} Ric_{na}\n"
      "orc: oracle @lhs - @expanded trials=3 seed=4\n"
      "orc_flat: oracle @lhs trials=2 flat neutral\n"
      "flat: zero ordered R Ric F\n"
      "flat_zero: assert_zero flat\n");
  INFO(ok.text());
  CHECK(ok.passed);
  CHECK(ok.ricci_convention == "R_{bd} = +g^{ac} R_{abcd}");
  CHECK(step(ok, "orc").detail == "3 exact trials, seed 4 (curved)");
}

TEST_CASE("engine: impose_trace refines a declaration") {
  const Report r = run(
      "tensor K rank=3 sym=(-132)\n"
      "tr: define M K_{b m}^{m}\n"
      "before: assert_nonzero K_{bm}^{m}\n"
      "imp: impose_trace K (2,3) by tr\n"
      "after: assert_zero K_{bm}^{m}\n");
  INFO(r.text());
  CHECK_FALSE(r.passed);  // slots 2,3 of an antisymmetric pair trace to zero already
  const Report ok = run(
      "tensor K rank=3 sym=(-132)\n"
      "tr: define M K_{m b}^{m}\n"
      "before: assert_nonzero K_{mb}^{m}\n"
      "imp: impose_trace K (1,3) by tr\n"
      "after: assert_zero K_{mb}^{m} + K_{m}^{m}_{b}\n");
  INFO(ok.text());
  CHECK(ok.passed);
}

TEST_CASE("engine: projections and relabelling") {
  const Report r = run(
      "tensor V rank=1 charge=e\n"
      "d: define D_{a} V_{b}\n"
      "t: project d traceless a b\n"
      "want: assert_equal t, D_{a} V_{b} + D_{b} V_{a} - 1/2 g_{ab} D^{c} V_{c}\n"
      "r: relabel t a->c, b->d\n"
      "want2: assert_equal r, D_{c} V_{d} + D_{d} V_{c} - 1/2 g_{cd} D^{m} V_{m}\n");
  INFO(r.text());
  CHECK(r.passed);
}

TEST_CASE("engine: lambda overrides reach every assignment") {
  EngineOptions opt;
  opt.lambda_overrides["lam1"] = Coefficient(2L);
  const Report r = run("L: lambdas\nok: assert_lambdas L\nv: assert_equal lam1 B_{a}, 2 B_{a} under L\n", opt);
  INFO(r.text());
  CHECK(r.passed);
}

TEST_CASE("canonicalize_source: declarations and expressions") {
  const auto out = canonicalize_source("tensor V rank=1\n# comment\nF_{ab}+F_{ba}\nV^{c} V_{c} - V_{d} V^{d} + 2 V_{a} V^{a}\n");
  CHECK(out == std::vector<std::string>{"0", "2*V_{m}*V^{m}"});
  CHECK_THROWS_AS(canonicalize_source("F_{ab} + Q\n"), ParseError);
}

TEST_CASE("suite: mutations") {
  const std::string base = builtin_suite_text();
  CHECK(base.find("comm_rhs: define") != std::string::npos);
  for (const auto& m : mutations()) {
    const std::string mutated = suite_text({m.name});
    CHECK(mutated != base);
    CHECK(mutated.size() == base.size() - m.from.size() + m.to.size());
  }
  CHECK_THROWS_AS(find_mutation("nope"), Error);
  Mutation missing{"x", "no_such_step", "a", "b", "", ""};
  CHECK_THROWS_AS(apply_mutation(base, missing), Error);
  Mutation nomatch{"x", "comm_rhs", "not present", "b", "", ""};
  CHECK_THROWS_AS(apply_mutation(base, nomatch), Error);
}

TEST_CASE("report: JSON layout is stable apart from timings") {
  const Report r = run("a: define D_{a} Psi\nz: assert_zero @a - D_{a} Psi\n");
  const auto j1 = report_json(r, false).dump();
  const auto j2 = report_json(run("a: define D_{a} Psi\nz: assert_zero @a - D_{a} Psi\n"), false).dump();
  CHECK(j1 == j2);
  const auto j = report_json(r);
  CHECK(j["passed"] == true);
  CHECK(j["steps"].size() == 6);
  CHECK(j["steps"][5]["status"] == "pass");
  CHECK(j["steps"][5].contains("ms"));
  CHECK_FALSE(report_json(r, false)["steps"][5].contains("ms"));
}
