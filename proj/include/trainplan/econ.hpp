#pragma once

#include "trainplan/error.hpp"

namespace trainplan::econ {

// Education-market scalars. Money and persons are plain reals; no currency
// or rounding semantics.
struct EconParams {
  double beta = 0.0;          // yearly discount factor, in (0,1)
  int career_len = 0;         // working horizon T, years
  int study_len = 0;          // years of study x, 1 <= x < T
  double wage_unskilled = 0;  // w_N, money/year
  double wage_skilled = 0;    // w_h, money/year
  double tuition = 0;         // p, money/year
  double alpha_pref = 1.0;    // weight on the skilled-wage stream
  double fixed_cost = 0;      // F, units of skilled labour/year
  double var_cost = 0;        // c, units of skilled labour per student-year
  double graduates = 0;       // h, persons/year
};

void validate(const EconParams& p);

// Stock of people by role; the four groups must sum to the total exactly.
struct Population {
  double educated = 0;   // C
  double teachers = 0;   // E
  double students = 0;   // S
  double unskilled = 0;  // N
  double total = 0;      // L
};

void validate(const Population& p);

struct MarketAccounts {
  double aggregate_supply = 0;
  double aggregate_demand = 0;
  double satisfied_demand = 0;  // SDL
  double aggregate_market = 0;  // AM
  double current_market = 0;    // CM, computed
};

struct NeedBreakdown {
  double econ_need = 0;
  double society_need = 0;
  double total_need = 0;  // computed
  int year = 0;
  int specialty = 0;
};

// Present value of the unskilled wage stream: w_N (1 - beta^T) / (1 - beta).
double pv_unskilled(const EconParams& p);

// Present value of the educated path: tuition outflow during study, then a
// delayed skilled-wage annuity,
//   -p (1 - beta^(x-1)) / (1 - beta) + beta^x w_h (1 - beta^(T-x)) / (1 - beta).
// With drop_discount_tail the beta^(T-x) term is omitted, i.e. the annuity
// factor becomes 1 / (1 - beta) (the short-study approximation).
double pv_skilled(const EconParams& p, bool drop_discount_tail = false);

// Indifference price (alpha beta^x w_h - w_N) / (1 - beta^(x-1)).
// May be negative. Requires study_len >= 2.
double tuition_price(const EconParams& p);

// x [ p h - w_h (F + c h) ].
double university_profit(const EconParams& p);

// Strict inequality w_h (alpha beta^x - c (1 - beta^(x-1))) > w_N.
// Requires study_len >= 2.
bool education_viable(const EconParams& p);

// Yearly graduate replacement demand (E + C) / (T - x).
double required_graduates(const Population& pop, const EconParams& p);

// Fills current_market = aggregate_market - satisfied_demand. Idempotent.
MarketAccounts market_balance(MarketAccounts acct);

// Fills and returns total_need = econ_need + society_need.
double total_need(NeedBreakdown& need);

}  // namespace trainplan::econ
