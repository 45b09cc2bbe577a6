#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "trainplan/econ.hpp"

using namespace trainplan;
using econ::EconParams;

namespace {

EconParams base_params() {
  EconParams p;
  p.beta = 0.9;
  p.career_len = 40;
  p.study_len = 5;
  p.wage_unskilled = 1.0;
  p.wage_skilled = 2.5;
  p.tuition = 0.8;
  p.alpha_pref = 1.0;
  p.fixed_cost = 10.0;
  p.var_cost = 0.3;
  p.graduates = 100.0;
  return p;
}

// Direct summation oracle: sum_{s=0}^{terms-1} beta^s * w.
double geometric_sum(double beta, int terms, double w) {
  double acc = 0.0, pow = 1.0;
  for (int s = 0; s < terms; ++s) {
    acc += pow * w;
    pow *= beta;
  }
  return acc;
}

EconParams random_params(std::mt19937& rng) {
  std::uniform_real_distribution<double> beta(0.05, 0.95);
  std::uniform_int_distribution<int> study(2, 10);
  std::uniform_real_distribution<double> wh(0.1, 100.0);
  std::uniform_real_distribution<double> wn(0.05, 10.0);
  std::uniform_real_distribution<double> alpha(0.5, 2.0);
  std::uniform_real_distribution<double> c(0.0, 5.0);
  EconParams p = base_params();
  p.beta = beta(rng);
  p.study_len = study(rng);
  p.career_len = p.study_len + 1 + std::uniform_int_distribution<int>(
                                       0, 50)(rng);
  p.wage_skilled = wh(rng);
  p.wage_unskilled = wn(rng);
  p.alpha_pref = alpha(rng);
  p.var_cost = c(rng);
  return p;
}

}  // namespace

TEST_CASE("pv_unskilled closed form") {
  // computation does not require the full invariant set; T = 1 is a
  // legitimate degenerate input for the formula itself
  EconParams p = base_params();
  p.wage_unskilled = 1.0;
  p.beta = 0.5;
  p.career_len = 1;
  CHECK(econ::pv_unskilled(p) == doctest::Approx(1.0).epsilon(1e-15));

  p.wage_unskilled = 2.0;
  p.career_len = 2;
  CHECK(econ::pv_unskilled(p) == doctest::Approx(3.0).epsilon(1e-15));

  p.wage_unskilled = 1.0;
  p.beta = 0.9;
  p.career_len = 60;
  CHECK(econ::pv_unskilled(p) ==
        doctest::Approx(geometric_sum(0.9, 60, 1.0)).epsilon(1e-13));
}

TEST_CASE("pv_unskilled agrees with the T-term sum across the sweep") {
  EconParams p = base_params();
  p.wage_unskilled = 1.0;
  p.study_len = 1;
  for (int b = 1; b <= 9; ++b) {
    p.beta = b / 10.0;
    for (int T = 2; T <= 60; ++T) {
      p.career_len = T;
      double closed = econ::pv_unskilled(p);
      double sum = geometric_sum(p.beta, T, 1.0);
      CHECK(std::fabs(closed - sum) <= 1e-12);
    }
  }
}

TEST_CASE("pv_skilled examples") {
  EconParams p = base_params();
  // x = 1 kills the tuition term entirely
  p.tuition = 5.0;
  p.wage_skilled = 1.0;
  p.beta = 0.5;
  p.study_len = 1;
  p.career_len = 2;
  CHECK(econ::pv_skilled(p) == doctest::Approx(0.5).epsilon(1e-15));

  p.tuition = 1.0;
  p.wage_skilled = 2.0;
  p.beta = 0.5;
  p.study_len = 2;
  p.career_len = 4;
  CHECK(econ::pv_skilled(p) == doctest::Approx(-0.25).epsilon(1e-15));

  // free tuition reduces to a delayed annuity
  p.tuition = 0.0;
  double expect = std::pow(0.5, 2) * 2.0 * (1.0 - std::pow(0.5, 2)) / 0.5;
  CHECK(econ::pv_skilled(p) == doctest::Approx(expect).epsilon(1e-15));
}

TEST_CASE("pv_skilled drop-tail approximation") {
  EconParams p = base_params();
  double exact = econ::pv_skilled(p);
  double approx = econ::pv_skilled(p, true);
  double tail = std::pow(p.beta, p.career_len - p.study_len);
  // dropping beta^(T-x) replaces the annuity factor with 1/(1-beta)
  double diff = std::pow(p.beta, p.study_len) * p.wage_skilled * tail /
                (1.0 - p.beta);
  CHECK(approx - exact == doctest::Approx(diff).epsilon(1e-12));
}

TEST_CASE("tuition price") {
  EconParams p = base_params();
  p.alpha_pref = 1.0;
  p.beta = 0.5;
  p.study_len = 2;
  p.wage_skilled = 4.0;
  p.wage_unskilled = 0.5;
  CHECK(econ::tuition_price(p) == doctest::Approx(1.0).epsilon(1e-15));

  p.study_len = 1;
  CHECK_THROWS_AS(econ::tuition_price(p), ValidationError);
}

TEST_CASE("indifference identity at the posted price") {
  std::mt19937 rng(7);
  for (int i = 0; i < 500; ++i) {
    EconParams p = random_params(rng);
    double price = econ::tuition_price(p);
    double residual = p.alpha_pref * std::pow(p.beta, p.study_len) *
                          p.wage_skilled -
                      p.wage_unskilled -
                      price * (1.0 - std::pow(p.beta, p.study_len - 1));
    CHECK(std::fabs(residual) <= 1e-12);
  }
}

TEST_CASE("university profit") {
  EconParams p = base_params();
  p.study_len = 5;
  p.career_len = 40;
  p.tuition = 10.0;
  p.graduates = 100.0;
  p.wage_skilled = 20.0;
  p.fixed_cost = 10.0;
  p.var_cost = 0.3;
  CHECK(econ::university_profit(p) == doctest::Approx(1000.0).epsilon(1e-15));

  // zero margin: F = 0 and p = c * w_h
  p.fixed_cost = 0.0;
  p.tuition = p.var_cost * p.wage_skilled;
  CHECK(econ::university_profit(p) == doctest::Approx(0.0));

  // break-even enrollment
  p.fixed_cost = 7.0;
  p.tuition = 10.0;
  p.graduates = p.wage_skilled * p.fixed_cost /
                (p.tuition - p.var_cost * p.wage_skilled);
  CHECK(econ::university_profit(p) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("education viability") {
  EconParams p = base_params();
  p.wage_skilled = 4.0;
  p.alpha_pref = 1.0;
  p.beta = 0.5;
  p.study_len = 2;
  p.var_cost = 0.0;
  p.wage_unskilled = 0.5;
  CHECK(econ::education_viable(p));

  // left side cannot exceed w_N when wages are equal and alpha*beta^x <= 1
  p.wage_skilled = p.wage_unskilled = 2.0;
  CHECK_FALSE(econ::education_viable(p));

  p.study_len = 1;
  CHECK_THROWS_AS(econ::education_viable(p), ValidationError);
}

TEST_CASE("viability is equivalent to price exceeding marginal cost") {
  std::mt19937 rng(11);
  for (int i = 0; i < 500; ++i) {
    EconParams p = random_params(rng);
    bool viable = econ::education_viable(p);
    bool price_covers =
        econ::tuition_price(p) > p.var_cost * p.wage_skilled;
    CHECK(viable == price_covers);
  }
}

TEST_CASE("tuition price is monotone in the wage split") {
  EconParams p = base_params();
  double base = econ::tuition_price(p);
  EconParams up = p;
  up.wage_skilled += 0.25;
  CHECK(econ::tuition_price(up) > base);
  EconParams down = p;
  down.wage_unskilled += 0.25;
  CHECK(econ::tuition_price(down) < base);
}

TEST_CASE("required graduates") {
  econ::Population pop;
  pop.teachers = 10;
  pop.educated = 30;
  pop.students = 5;
  pop.unskilled = 55;
  pop.total = 100;
  EconParams p = base_params();
  p.career_len = 42;
  p.study_len = 2;
  CHECK(econ::required_graduates(pop, p) == doctest::Approx(1.0));

  pop.teachers = pop.educated = 0;
  CHECK(econ::required_graduates(pop, p) == 0.0);

  p.career_len = 5;
  p.study_len = 5;
  CHECK_THROWS_AS(econ::required_graduates(pop, p), ValidationError);
}

TEST_CASE("population identity") {
  econ::Population pop;
  pop.educated = 200;
  pop.teachers = 15;
  pop.students = 50;
  pop.unskilled = 300;
  pop.total = 565;
  CHECK_NOTHROW(econ::validate(pop));

  pop.total = 566;
  CHECK_THROWS_AS(econ::validate(pop), ValidationError);

  pop.total = 565.5;
  CHECK_THROWS_AS(econ::validate(pop), ValidationError);
}

TEST_CASE("market balance") {
  econ::MarketAccounts acct;
  acct.aggregate_market = 100;
  acct.satisfied_demand = 60;
  econ::MarketAccounts filled = econ::market_balance(acct);
  CHECK(filled.current_market == 40.0);
  // idempotent
  CHECK(econ::market_balance(filled).current_market == 40.0);

  acct.satisfied_demand = 100;
  CHECK(econ::market_balance(acct).current_market == 0.0);

  acct.aggregate_market = 50;
  acct.satisfied_demand = 60;
  CHECK_THROWS_AS(econ::market_balance(acct), ValidationError);
}

TEST_CASE("total need") {
  econ::NeedBreakdown n;
  n.econ_need = 120;
  n.society_need = 30;
  CHECK(econ::total_need(n) == 150.0);
  CHECK(n.total_need == 150.0);

  n.econ_need = n.society_need = 0;
  CHECK(econ::total_need(n) == 0.0);

  n.econ_need = 7;
  CHECK(econ::total_need(n) == 7.0);
}

TEST_CASE("parameter invariants") {
  EconParams p = base_params();
  p.beta = 1.5;
  CHECK_THROWS_AS(econ::validate(p), ValidationError);
  p = base_params();
  p.beta = 0.0;
  CHECK_THROWS_AS(econ::validate(p), ValidationError);
  p = base_params();
  p.study_len = p.career_len;
  CHECK_THROWS_AS(econ::validate(p), ValidationError);
  p = base_params();
  p.wage_unskilled = -1;
  CHECK_THROWS_AS(econ::validate(p), ValidationError);
  CHECK_NOTHROW(econ::validate(base_params()));
}
