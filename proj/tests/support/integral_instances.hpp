#pragma once

// Randomized solver instances whose reachable states are exactly the integer
// grid nodes: dt = 1, integer action grids, and a drift clamped so every
// transition stays inside the state window. On these the grid solver and the
// exact-state oracle must agree to machine precision at every node and
// stage.

#include <random>
#include <string>

#include "trainplan/discrete.hpp"

namespace trainplan::testsupport {

inline constexpr int kIntegralLo = -8;
inline constexpr int kIntegralHi = 8;

inline DiscreteProblem random_integral_instance(std::mt19937& rng) {
  std::uniform_int_distribution<int> stages(1, 3);
  std::uniform_int_distribution<int> grid_nodes(2, 5);
  std::uniform_int_distribution<int> bound_lo(-2, 2);
  std::uniform_int_distribution<int> coeff(-2, 2);
  std::uniform_int_distribution<int> start(-3, 3);
  std::uniform_int_distribution<int> cost_pick(0, 4);

  int c1 = coeff(rng), c2 = coeff(rng), c3 = coeff(rng);
  std::string base = "(" + std::to_string(c1) + ")*t + (" +
                     std::to_string(c2) + ")*a + (" + std::to_string(c3) +
                     ")";
  std::string f = "min(max(" + base + ", " + std::to_string(kIntegralLo) +
                  " - x), " + std::to_string(kIntegralHi) + " - x)";

  static const char* const costs[] = {
      "(t - a)^2", "x^2 + t", "abs(t - a) + x^2", "abs(x) + t + 2",
      "t + a + 4"};

  DiscreteProblem p;
  p.stages = stages(rng);
  p.dynamics.f = Expr::parse(f);
  p.dynamics.cost = Expr::parse(costs[cost_pick(rng)]);
  int t_lo = bound_lo(rng), t_n = grid_nodes(rng);
  int a_lo = bound_lo(rng), a_n = grid_nodes(rng);
  p.dynamics.control_bounds = {static_cast<double>(t_lo),
                               static_cast<double>(t_lo + t_n - 1)};
  p.dynamics.disturbance_bounds = {static_cast<double>(a_lo),
                                   static_cast<double>(a_lo + a_n - 1)};
  p.control_grid_n = t_n;
  p.disturbance_grid_n = a_n;
  p.dt = {1.0};
  p.x0 = start(rng);
  p.state_grid = {static_cast<double>(kIntegralLo),
                  static_cast<double>(kIntegralHi),
                  kIntegralHi - kIntegralLo + 1};
  p.mode = Mode::MinCost;
  return p;
}

}  // namespace trainplan::testsupport
