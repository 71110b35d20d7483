#include <catch2/catch_amalgamated.hpp>

#include "spintensor/lambda.hpp"
#include "spintensor/parser.hpp"

using namespace spintensor;

namespace {

Coefficient c(const std::string& s) { return parse_expr(s, standard_symbols()).scalar_value(); }

}  // namespace

TEST_CASE("lambdas: default assignment satisfies every relation") {
  const LambdaAssignment a = lambda_solve();
  CHECK(failed_relations(a).empty());
  for (const auto& [name, rel] : lambda_relations()) CHECK(a.apply(rel).is_zero());
  CHECK(a.at(9) * a.at(12) == Coefficient::symbol("mu"));
  CHECK(a.composite_p() * a.composite_s() == Coefficient::fraction(-1, 12));
  CHECK(a.values.size() == 12);
}

TEST_CASE("lambdas: pinned default values") {
  const LambdaAssignment a = lambda_solve();
  CHECK(a.at(1) == c("1"));
  CHECK(a.at(2) == c("0"));
  CHECK(a.at(3) == c("-1/4"));
  CHECK(a.at(6) == c("-8/9 mu"));
  CHECK(a.at(7) == c("1/3"));
  CHECK(a.at(10) == c("mu/3 + 1/2"));
}

TEST_CASE("lambdas: constraint application") {
  const LambdaAssignment a = lambda_solve();
  CHECK(a.apply(c("lam1 lam3 + lam2 lam5")) == c("-1/4"));
  CHECK(a.apply(c("lam10 lam11 - 1/2 - mu/3")).is_zero());
  CHECK(a.apply(c("M mu")) == c("M mu"));
}

TEST_CASE("lambdas: pivot choices are honoured") {
  const LambdaAssignment a = lambda_solve({{"lam1", c("2")}, {"lam12", c("3")}});
  CHECK(failed_relations(a).empty());
  CHECK(a.at(1) == c("2"));
  CHECK(a.at(12) == c("3"));
  CHECK(a.at(9) == c("mu/3"));
}

TEST_CASE("lambdas: mu fixed to zero forces lam10 lam11 = 1/2") {
  const LambdaAssignment a = lambda_solve({{"mu", c("0")}});
  CHECK(a.at(10) * a.at(11) == c("1/2"));
  CHECK(a.apply(c("mu")) == c("mu"));  // mu itself is not a lambda
}

TEST_CASE("lambdas: rejected choices") {
  LambdaAssignment zero;
  for (int k = 1; k <= 12; ++k) zero.values["lam" + std::to_string(k)] = Coefficient();
  const auto failed = failed_relations(zero);
  CHECK(std::find(failed.begin(), failed.end(), "lam1 lam3 + lam2 lam5 + 1/4") != failed.end());
  CHECK_THROWS_AS(lambda_solve({{"lam13", c("1")}}), DerivationError);
  CHECK_THROWS_AS(lambda_solve({{"lam1", c("0")}, {"lam2", c("0")}}), DerivationError);
  CHECK_THROWS_AS(lambda_solve({{"lam1", c("1")}, {"lam2", c("0")}, {"lam3", c("1")}, {"lam5", c("0")}}),
                  DerivationError);
}
