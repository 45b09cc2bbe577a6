#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "trainplan/dynamics.hpp"

namespace trainplan {

// Uniform node grid over [lo, hi] with n >= 1 nodes.
struct Grid {
  double lo = 0.0;
  double hi = 1.0;
  int n = 2;

  double step() const { return n > 1 ? (hi - lo) / (n - 1) : 0.0; }
  double value(int i) const { return n > 1 ? lo + i * step() : lo; }
  bool covers(double x) const { return x >= lo && x <= hi; }
  int nearest(double x) const;  // clamped nearest-node index
};

// Sentinel for "no guaranteed finite value": a state from which the target
// cannot be assured, or whose continuation left the observed grid window.
inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

enum class Mode { MinCost, MinTime };

// Full input for one backward-induction solve.
struct DiscreteProblem {
  int stages = 1;
  DynamicsSpec dynamics;
  std::vector<double> dt{1.0};  // one entry (uniform) or one per stage
  double x0 = 0.0;
  Grid state_grid;
  int control_grid_n = 33;
  int disturbance_grid_n = 33;
  std::optional<Interval> terminal_set;  // may extend past the grid; required
                                         // for min-time
  Mode mode = Mode::MinCost;
  // Optional per-stage overrides; empty means dynamics.*_bounds everywhere.
  std::vector<Interval> stage_control_bounds;
  std::vector<Interval> stage_disturbance_bounds;

  double stage_dt(int stage_no) const {  // stage_no is 1-based
    return dt.size() == 1 ? dt[0] : dt[stage_no - 1];
  }
  Interval control_bounds_for(int stage_no) const {
    return stage_control_bounds.empty() ? dynamics.control_bounds
                                        : stage_control_bounds[stage_no - 1];
  }
  Interval disturbance_bounds_for(int stage_no) const {
    return stage_disturbance_bounds.empty()
               ? dynamics.disturbance_bounds
               : stage_disturbance_bounds[stage_no - 1];
  }
  // Time elapsed before the given 1-based stage starts.
  double stage_tau(int stage_no) const;
  bool in_terminal(double x) const {
    return terminal_set && terminal_set->contains(x);
  }
};

void validate(const DiscreteProblem& p);

// Guaranteed values per (stages-remaining, state node). Layer 0 is the
// terminal condition. Entries may be kUnreachable.
struct ValueTable {
  int stages = 0;
  Grid grid;
  std::vector<double> values;  // (stages + 1) * grid.n, layer-major

  double at(int stages_remaining, int node) const {
    return values[static_cast<std::size_t>(stages_remaining) * grid.n + node];
  }
  double& at(int stages_remaining, int node) {
    return values[static_cast<std::size_t>(stages_remaining) * grid.n + node];
  }
  // Linear interpolation within the layer; x must lie inside the grid.
  double interpolate(int stages_remaining, double x) const;
};

// Chosen control and worst disturbance per (stages-remaining, state node),
// for stages_remaining = 1..stages.
struct Policy {
  int stages = 0;
  Grid grid;
  std::vector<double> control;      // stages * grid.n
  std::vector<double> disturbance;  // stages * grid.n

  double control_node(int stages_remaining, int node) const {
    return control[static_cast<std::size_t>(stages_remaining - 1) * grid.n +
                   node];
  }
  double disturbance_node(int stages_remaining, int node) const {
    return disturbance[static_cast<std::size_t>(stages_remaining - 1) *
                           grid.n + node];
  }
  // Nearest-node lookup; x is clamped into the grid first.
  double control_at(int stages_remaining, double x) const;
  double disturbance_at(int stages_remaining, double x) const;
};

struct Solution {
  ValueTable value;
  Policy policy;

  double value_at_x0(const DiscreteProblem& p) const {
    return value.interpolate(p.stages, p.x0);
  }
};

// Backward-induction minimax solve. Nodes whose continuation would need data
// from outside the grid degrade to kUnreachable; the solve itself fails with
// GridExitError only when the value at x0 depends on such data.
Solution solve_min_cost(const DiscreteProblem& p, int threads = 1);
Solution solve_min_time(const DiscreteProblem& p, int threads = 1);
Solution solve(const DiscreteProblem& p, int threads = 1);  // dispatch on mode

struct Trajectory {
  std::vector<double> states;        // x_0 .. x_m
  std::vector<double> controls;      // t_1 .. t_m
  std::vector<double> disturbances;  // a_1 .. a_m
  std::vector<double> stage_costs;   // e_1 .. e_m
  double total_cost = 0.0;
  // Min-time only: 1-based count of steps taken when the terminal set was
  // first entered (0 when x0 already lies in it).
  std::optional<int> reached_step;
};

// Plays the policy (nearest-node control) against the given disturbance
// sequence, one value per stage. Min-time trajectories stop on entering the
// terminal set.
Trajectory simulate(const DiscreteProblem& p, const Policy& policy,
                    std::span<const double> disturbances);

struct WorstCase {
  std::vector<double> disturbances;
  double cost = 0.0;
};

// Forward pass picking, at each stage, the disturbance node maximizing
// stage cost plus interpolated continuation given the policy's control.
// Min-cost mode only.
WorstCase worst_case_disturbance(const DiscreteProblem& p, const Solution& s);

// Plays the stored control policy against the stored worst-disturbance
// feedback. States are clamped to the nearest grid node for lookups only;
// the trajectory itself is not grid-checked.
Trajectory play_feedback(const DiscreteProblem& p, const Solution& s);

// Worst-case accrued cost of the fixed control policy: a backward
// evaluation maximizing stage cost plus continuation over the disturbance
// grid at every node, with zero cost-to-go on the terminal set (min-time)
// or at the horizon. The disturbance here maximizes cost, not steps, so
// this can exceed what playing the stored a* feedback accrues.
double policy_worst_cost(const DiscreteProblem& p, const Solution& s);

// As play_feedback, but either side may be overridden with an explicit
// per-stage schedule (stage index is 1-based).
using StageFn = std::function<double(int stage_no, double x)>;
Trajectory play(const DiscreteProblem& p, const StageFn& control,
                const StageFn& disturbance);

}  // namespace trainplan
