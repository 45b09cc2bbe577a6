#include "trainplan/econ.hpp"

#include <cmath>
#include <string>

namespace trainplan::econ {

namespace {

bool is_integral(double v) { return std::isfinite(v) && std::floor(v) == v; }

void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

double annuity_factor(double beta, int terms) {
  // (1 - beta^terms) / (1 - beta); exact geometric-series form, terms >= 0.
  return (1.0 - std::pow(beta, terms)) / (1.0 - beta);
}

}  // namespace

void validate(const EconParams& p) {
  require(p.beta > 0.0 && p.beta < 1.0, "beta must lie in (0,1)");
  require(p.career_len >= 1, "career_len must be >= 1");
  require(p.study_len >= 1, "study_len must be >= 1");
  require(p.study_len < p.career_len, "study_len must be < career_len");
  require(p.wage_unskilled > 0.0, "wage_unskilled must be > 0");
  require(p.wage_skilled > 0.0, "wage_skilled must be > 0");
  require(p.var_cost >= 0.0, "var_cost must be >= 0");
  require(p.fixed_cost >= 0.0, "fixed_cost must be >= 0");
  require(p.graduates >= 0.0, "graduates must be >= 0");
}

void validate(const Population& p) {
  require(p.educated >= 0 && p.teachers >= 0 && p.students >= 0 &&
              p.unskilled >= 0 && p.total >= 0,
          "population groups must be non-negative");
  require(is_integral(p.educated) && is_integral(p.teachers) &&
              is_integral(p.students) && is_integral(p.unskilled) &&
              is_integral(p.total),
          "population groups must be whole persons");
  require(p.educated + p.teachers + p.students + p.unskilled == p.total,
          "population identity violated: educated + teachers + students + "
          "unskilled must equal total");
}

double pv_unskilled(const EconParams& p) {
  return p.wage_unskilled * annuity_factor(p.beta, p.career_len);
}

double pv_skilled(const EconParams& p, bool drop_discount_tail) {
  double study = -p.tuition * annuity_factor(p.beta, p.study_len - 1);
  double wage_factor = drop_discount_tail
                           ? 1.0 / (1.0 - p.beta)
                           : annuity_factor(p.beta,
                                            p.career_len - p.study_len);
  return study +
         std::pow(p.beta, p.study_len) * p.wage_skilled * wage_factor;
}

double tuition_price(const EconParams& p) {
  if (p.study_len < 2) {
    throw ValidationError(
        "tuition_price: degenerate denominator, 1 - beta^(x-1) = 0 when "
        "study_len = 1");
  }
  double denom = 1.0 - std::pow(p.beta, p.study_len - 1);
  return (p.alpha_pref * std::pow(p.beta, p.study_len) * p.wage_skilled -
          p.wage_unskilled) /
         denom;
}

double university_profit(const EconParams& p) {
  return p.study_len *
         (p.tuition * p.graduates -
          p.wage_skilled * (p.fixed_cost + p.var_cost * p.graduates));
}

bool education_viable(const EconParams& p) {
  if (p.study_len < 2) {
    throw ValidationError(
        "education_viable: degenerate denominator, 1 - beta^(x-1) = 0 when "
        "study_len = 1");
  }
  double lhs = p.wage_skilled *
               (p.alpha_pref * std::pow(p.beta, p.study_len) -
                p.var_cost * (1.0 - std::pow(p.beta, p.study_len - 1)));
  return lhs > p.wage_unskilled;
}

double required_graduates(const Population& pop, const EconParams& p) {
  if (p.career_len <= p.study_len) {
    throw ValidationError(
        "required_graduates: zero working span, career_len must exceed "
        "study_len");
  }
  return (pop.teachers + pop.educated) /
         static_cast<double>(p.career_len - p.study_len);
}

MarketAccounts market_balance(MarketAccounts acct) {
  require(acct.aggregate_market >= 0 && acct.satisfied_demand >= 0,
          "market accounts must be non-negative");
  if (acct.satisfied_demand > acct.aggregate_market) {
    throw ValidationError(
        "satisfied demand cannot exceed the aggregate labor market");
  }
  acct.current_market = acct.aggregate_market - acct.satisfied_demand;
  return acct;
}

double total_need(NeedBreakdown& need) {
  require(need.econ_need >= 0 && need.society_need >= 0,
          "needs must be non-negative");
  need.total_need = need.econ_need + need.society_need;
  return need.total_need;
}

}  // namespace trainplan::econ
