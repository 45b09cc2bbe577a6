#pragma once

#include <string>

#include "trainplan/discrete.hpp"

namespace trainplan {

enum class Objective { TotalCost, TimeToTerminal };

// Finite-horizon game on [0, horizon], approximated by solving the induced
// multistage problem over successively doubled uniform partitions.
struct ContinuousProblem {
  double horizon = 1.0;
  DynamicsSpec dynamics;  // time-invariant bounds
  double x0 = 0.0;
  std::optional<Interval> terminal_set;
  Objective objective = Objective::TotalCost;
  int base_partition = 2;  // cells at the coarsest level
  int levels = 4;          // number of levels solved (cells double per level)
  Grid state_grid;
  int control_grid_n = 33;
  int disturbance_grid_n = 33;
};

void validate(const ContinuousProblem& p);

struct SaddleOptions {
  long long budget = 100'000;      // candidate sequences per side
  int max_cells = 8;               // coarse cells for deviation schedules
  double epsilon_override = -1.0;  // < 0 means use 2 * epsilon_hat
};

enum class SaddleStatus { Pass, Fail, Inconclusive };

struct Deviation {
  enum class Side { Control, Disturbance };
  Side side = Side::Control;
  std::vector<double> cell_values;  // piecewise-constant schedule
  double improvement = 0.0;         // gain over the candidate saddle value
};

struct SaddleCheckResult {
  SaddleStatus status = SaddleStatus::Inconclusive;
  double epsilon = 0.0;
  double center_objective = 0.0;
  std::optional<Deviation> worst;  // most improving deviation found
  long long candidates_tried = 0;
  std::string note;
};

struct LevelResult {
  int level = 0;
  int cells = 0;
  double value = 0.0;  // total cost at x0, or guaranteed reach time (task 2)
  double cost = 0.0;   // accrued cost along the feedback saddle path
  bool grid_widened = false;
  Grid grid_used;
};

struct RefinementReport {
  std::vector<LevelResult> levels;
  double epsilon_hat = 0.0;  // |V_last - V_second_last|
  SaddleCheckResult saddle;
};

// The multistage problem a partition with `cells` cells induces: dt =
// horizon / cells and the stage cost is the Riemann term e * dt.
DiscreteProblem induced_problem(const ContinuousProblem& p, int cells,
                                const Grid& grid);

// Solves every level, widening the state grid once per level on a grid
// exit (the widened grid carries over to later levels), then runs the
// deviation check on the finest solution at epsilon = 2 * epsilon_hat
// unless overridden.
RefinementReport solve_refined(const ContinuousProblem& p,
                               const SaddleOptions& opts = {},
                               int threads = 1);

// Best-response deviation search around a solved instance: piecewise-
// constant schedules on a coarsened partition, grid-valued per cell, played
// against the candidate's opposite-side feedback. Deviation values are
// drawn from the stage-1 action grids. Fails when a deviation improves its
// side's objective by more than epsilon; an exhausted budget reports
// Inconclusive, not failure.
SaddleCheckResult saddle_check(const DiscreteProblem& induced,
                               const Solution& solution, double epsilon,
                               const SaddleOptions& opts = {});

// Objective of a played-out trajectory under the problem's mode: total cost
// for min-cost, elapsed time to the terminal set (kUnreachable if never
// reached) for min-time.
double play_objective(const DiscreteProblem& p, const Trajectory& t);

}  // namespace trainplan
