#include "trainplan/continuous.hpp"

#include <algorithm>
#include <cmath>

namespace trainplan {

namespace {

constexpr double kViolationSlack = 1e-12;

void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

std::vector<double> action_grid(const Interval& iv, int n) {
  Grid g{iv.lo, iv.hi, n};
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = g.value(i);
  return out;
}

Grid widened(const Grid& g, double required_lo, double required_hi) {
  // Extend by whole steps so existing nodes keep their positions.
  double h = g.step();
  long long below = 0, above = 0;
  if (required_lo < g.lo) below = static_cast<long long>(
      std::ceil((g.lo - required_lo) / h - 1e-9)) + 1;
  if (required_hi > g.hi) above = static_cast<long long>(
      std::ceil((required_hi - g.hi) / h - 1e-9)) + 1;
  Grid out;
  out.lo = g.lo - below * h;
  out.hi = g.hi + above * h;
  out.n = g.n + static_cast<int>(below + above);
  return out;
}

// Disturbance best response to the control action it observes on the cell,
// read off the solved value table. The stored per-node a* is the argmax
// against t* only; deviating controls must face this stronger feedback or
// the check would flag phantom improvements.
class ResponseFeedback {
 public:
  ResponseFeedback(const DiscreteProblem& dp, const Solution& sol)
      : dp_(dp), sol_(sol) {
    double tau = 0.0;
    for (int i = 1; i <= dp.stages; ++i) {
      Stage s;
      s.dt = dp.stage_dt(i);
      s.tau = tau;
      s.avals = action_grid(dp.disturbance_bounds_for(i),
                            dp.disturbance_grid_n);
      stages_.push_back(std::move(s));
      tau += dp.stage_dt(i);
    }
  }

  double respond(int stage_no, double x, double t) const {
    const Stage& s = stages_[stage_no - 1];
    int k = dp_.stages - stage_no + 1;
    const bool min_time = dp_.mode == Mode::MinTime;
    double best_v = -kUnreachable;
    double best_a = s.avals.front();
    bool first = true;
    for (double a : s.avals) {
      Bindings b;
      b.set(Var::X, x).set(Var::T, t).set(Var::A, a).set(Var::Tau, s.tau).set(
          Var::Stage, static_cast<double>(stage_no));
      double xp = x + s.dt * dp_.dynamics.f.eval(b);
      double v;
      if (xp < dp_.state_grid.lo || xp > dp_.state_grid.hi) {
        v = kUnreachable;  // beyond the certified window
      } else {
        double cont = sol_.value.interpolate(k - 1, xp);
        v = min_time ? cont : dp_.dynamics.cost.eval(b) + cont;
      }
      if (first || v > best_v) {
        best_v = v;
        best_a = a;
        first = false;
      }
    }
    return best_a;
  }

 private:
  struct Stage {
    double dt = 1.0;
    double tau = 0.0;
    std::vector<double> avals;
  };
  const DiscreteProblem& dp_;
  const Solution& sol_;
  std::vector<Stage> stages_;
};

// Enumerates one side's piecewise-constant deviations against the other
// side's feedback. Returns the number of candidates tried; updates the best
// (most improving) deviation in place.
long long enumerate_side(const DiscreteProblem& dp, const Solution& sol,
                         const ResponseFeedback& response,
                         Deviation::Side side, double center_objective,
                         const SaddleOptions& opts,
                         std::optional<Deviation>& best, bool& budget_ok) {
  int grid_n = side == Deviation::Side::Control ? dp.control_grid_n
                                                : dp.disturbance_grid_n;
  std::vector<double> values =
      action_grid(side == Deviation::Side::Control
                      ? dp.control_bounds_for(1)
                      : dp.disturbance_bounds_for(1),
                  grid_n);

  int cells = std::min(opts.max_cells, dp.stages);
  auto combinations = [&](int c) {
    double total = std::pow(static_cast<double>(grid_n), c);
    return total;
  };
  while (cells > 0 && combinations(cells) > static_cast<double>(opts.budget))
    --cells;
  if (cells == 0) {
    budget_ok = false;
    return 0;
  }

  const int n = dp.stages;
  std::vector<int> cell_of_stage(n);
  for (int j = 0; j < n; ++j) cell_of_stage[j] = (j * cells) / n;

  std::vector<int> digits(cells, 0);
  std::vector<double> schedule(cells, values[0]);
  long long tried = 0;

  for (;;) {
    for (int c = 0; c < cells; ++c) schedule[c] = values[digits[c]];

    Trajectory traj;
    if (side == Deviation::Side::Disturbance) {
      auto ctrl = [&](int stage_no, double x) {
        return sol.policy.control_at(n - stage_no + 1, x);
      };
      auto dist = [&](int stage_no, double) {
        return schedule[cell_of_stage[stage_no - 1]];
      };
      traj = play(dp, ctrl, dist);
    } else {
      auto ctrl = [&](int stage_no, double) {
        return schedule[cell_of_stage[stage_no - 1]];
      };
      auto dist = [&](int stage_no, double x) {
        return sol.policy.disturbance_at(n - stage_no + 1, x);
      };
      traj = play(dp, ctrl, dist);
    }
    double obj = play_objective(dp, traj);
    double improvement = side == Deviation::Side::Disturbance
                             ? obj - center_objective
                             : center_objective - obj;
    ++tried;
    if (!best || improvement > best->improvement) {
      best = Deviation{side, schedule, improvement};
    }

    int c = cells - 1;
    while (c >= 0 && ++digits[c] == grid_n) digits[c--] = 0;
    if (c < 0) break;
  }
  return tried;
}

}  // namespace

void validate(const ContinuousProblem& p) {
  require(p.horizon > 0.0, "horizon must be > 0");
  validate(p.dynamics);
  require(p.base_partition >= 2, "base_partition must be >= 2");
  require(p.levels >= 2, "levels must be >= 2");
  require(p.state_grid.n >= 2, "state grid needs at least 2 nodes");
  require(p.state_grid.lo < p.state_grid.hi,
          "state grid must satisfy lo < hi");
  require(p.control_grid_n >= 2, "control grid needs at least 2 nodes");
  require(p.disturbance_grid_n >= 2,
          "disturbance grid needs at least 2 nodes");
  require(p.x0 >= p.state_grid.lo && p.x0 <= p.state_grid.hi,
          "x0 must lie inside the state grid interval");
  if (p.objective == Objective::TimeToTerminal)
    require(p.terminal_set.has_value(),
            "time-to-terminal objective requires terminal_set");
}

DiscreteProblem induced_problem(const ContinuousProblem& p, int cells,
                                const Grid& grid) {
  DiscreteProblem dp;
  dp.stages = cells;
  dp.dynamics = p.dynamics;
  double dt = p.horizon / cells;
  dp.dynamics.cost = p.dynamics.cost.scaled(dt);
  dp.dt = {dt};
  dp.x0 = p.x0;
  dp.state_grid = grid;
  dp.control_grid_n = p.control_grid_n;
  dp.disturbance_grid_n = p.disturbance_grid_n;
  dp.terminal_set = p.terminal_set;
  dp.mode = p.objective == Objective::TotalCost ? Mode::MinCost
                                                : Mode::MinTime;
  return dp;
}

double play_objective(const DiscreteProblem& p, const Trajectory& t) {
  if (p.mode == Mode::MinCost) return t.total_cost;
  if (!t.reached_step) return kUnreachable;
  double time = 0.0;
  for (int i = 1; i <= *t.reached_step; ++i) time += p.stage_dt(i);
  return time;
}

SaddleCheckResult saddle_check(const DiscreteProblem& induced,
                               const Solution& solution, double epsilon,
                               const SaddleOptions& opts) {
  SaddleCheckResult res;
  res.epsilon = epsilon;

  Trajectory center = play_feedback(induced, solution);
  res.center_objective = play_objective(induced, center);
  if (!std::isfinite(res.center_objective)) {
    res.status = SaddleStatus::Inconclusive;
    res.note = "candidate play has no finite objective";
    return res;
  }

  bool budget_ok = true;
  res.candidates_tried += enumerate_side(induced, solution,
                                         Deviation::Side::Disturbance,
                                         res.center_objective, opts,
                                         res.worst, budget_ok);
  res.candidates_tried += enumerate_side(induced, solution,
                                         Deviation::Side::Control,
                                         res.center_objective, opts,
                                         res.worst, budget_ok);

  bool violated = res.worst &&
                  res.worst->improvement > epsilon + kViolationSlack;
  if (violated) {
    res.status = SaddleStatus::Fail;
  } else if (!budget_ok) {
    res.status = SaddleStatus::Inconclusive;
    res.note = "deviation budget exhausted before any cells fit";
  } else {
    res.status = SaddleStatus::Pass;
  }
  return res;
}

RefinementReport solve_refined(const ContinuousProblem& p,
                               const SaddleOptions& opts, int threads) {
  validate(p);
  RefinementReport rep;
  Grid grid = p.state_grid;
  DiscreteProblem finest;
  Solution finest_sol;

  for (int level = 0; level < p.levels; ++level) {
    int cells = p.base_partition << level;
    bool widened_here = false;
    DiscreteProblem dp = induced_problem(p, cells, grid);
    Solution sol;
    try {
      sol = solve(dp, threads);
    } catch (const GridExitError& e) {
      grid = widened(grid, e.required_lo, e.required_hi);
      widened_here = true;
      dp = induced_problem(p, cells, grid);
      try {
        sol = solve(dp, threads);
      } catch (const GridExitError& again) {
        throw SolveError("level " + std::to_string(level) +
                         ": grid exit persists after widening: " +
                         again.what());
      }
    }

    LevelResult lr;
    lr.level = level;
    lr.cells = cells;
    lr.grid_widened = widened_here;
    lr.grid_used = grid;
    double at_x0 = sol.value_at_x0(dp);
    if (p.objective == Objective::TotalCost) {
      lr.value = at_x0;
      lr.cost = at_x0;
    } else {
      double dt = p.horizon / cells;
      lr.value = std::isfinite(at_x0) ? at_x0 * dt : kUnreachable;
      lr.cost = policy_worst_cost(dp, sol);
    }
    rep.levels.push_back(lr);

    if (level == p.levels - 1) {
      finest = std::move(dp);
      finest_sol = std::move(sol);
    }
  }

  double v_last = rep.levels[rep.levels.size() - 1].value;
  double v_prev = rep.levels[rep.levels.size() - 2].value;
  if (std::isinf(v_last) && std::isinf(v_prev)) {
    rep.epsilon_hat = 0.0;
  } else {
    rep.epsilon_hat = std::fabs(v_last - v_prev);
  }

  double eps = opts.epsilon_override >= 0.0 ? opts.epsilon_override
                                            : 2.0 * rep.epsilon_hat;
  rep.saddle = saddle_check(finest, finest_sol, eps, opts);
  return rep;
}

}  // namespace trainplan
