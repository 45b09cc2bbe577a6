#include "trainplan/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <set>
#include <string>
#include <thread>

namespace trainplan {

namespace {

// Snap tolerance in index units: points this close to a node are treated as
// lying on it (keeps integral instances exact and avoids 0 * inf blends).
constexpr double kSnapTol = 1e-9;

// Cap on states visited by the dependency scan when it escapes the grid.
constexpr std::size_t kScanNodeCap = 1u << 20;

void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

bool contains_tol(const Interval& iv, double v) {
  double tol = 1e-12 * std::max({1.0, std::fabs(iv.lo), std::fabs(iv.hi)});
  return v >= iv.lo - tol && v <= iv.hi + tol;
}

bool in_grid(const Grid& g, double x) {
  double u = (x - g.lo) / g.step();
  return u >= -kSnapTol && u <= (g.n - 1) + kSnapTol;
}

// Per-stage context resolved once per solve.
struct StageCtx {
  int stage_no = 1;
  double dt = 1.0;
  double tau = 0.0;
  std::vector<double> tvals;
  std::vector<double> avals;
};

std::vector<double> grid_values(const Interval& iv, int n) {
  Grid g{iv.lo, iv.hi, n};
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = g.value(i);
  return out;
}

std::vector<StageCtx> stage_schedule(const DiscreteProblem& p) {
  std::vector<StageCtx> out(p.stages);
  double tau = 0.0;
  for (int i = 1; i <= p.stages; ++i) {
    StageCtx& s = out[i - 1];
    s.stage_no = i;
    s.dt = p.stage_dt(i);
    s.tau = tau;
    s.tvals = grid_values(p.control_bounds_for(i), p.control_grid_n);
    s.avals = grid_values(p.disturbance_bounds_for(i), p.disturbance_grid_n);
    tau += s.dt;
  }
  return out;
}

Bindings make_bindings(double x, double t, double a, double tau, int stage) {
  Bindings b;
  b.set(Var::X, x)
      .set(Var::T, t)
      .set(Var::A, a)
      .set(Var::Tau, tau)
      .set(Var::Stage, static_cast<double>(stage));
  return b;
}

[[noreturn]] void rethrow_with_location(const EvalError& e, int stage_no,
                                        double x) {
  throw EvalError(e.kind, e.position,
                  std::string(e.what()) + " (stage " +
                      std::to_string(stage_no) + ", x=" + std::to_string(x) +
                      ")");
}

// Distributes [0, count) over up to `threads` workers. Worker exceptions are
// collected and the first is rethrown after join.
void parallel_for(int count, int threads,
                  const std::function<void(int)>& body) {
  if (threads <= 1 || count < 2 * threads) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  int workers = std::min(threads, count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::mutex mu;
  std::exception_ptr first_error;
  int chunk = (count + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    int begin = w * chunk;
    int end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      try {
        for (int i = begin; i < end; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

// Walks the dependency closure of the value at x0: the bracketing nodes of
// x0, then the bracketing nodes of every one-step image of those, stage by
// stage. Throws GridExitError when the closure needs a state outside the
// grid; the reported interval encloses everything the closure touches, so a
// single widening makes the solve clean.
void scan_x0_dependencies(const DiscreteProblem& p,
                          const std::vector<StageCtx>& schedule) {
  const Grid& g = p.state_grid;
  const double h = g.step();
  auto state_of = [&](long long idx) { return g.lo + idx * h; };
  auto brackets = [&](double x, std::set<long long>& out) {
    double u = (x - g.lo) / h;
    double r = std::round(u);
    if (std::fabs(u - r) <= kSnapTol) {
      out.insert(static_cast<long long>(r));
    } else {
      long long i = static_cast<long long>(std::floor(u));
      out.insert(i);
      out.insert(i + 1);
    }
  };

  std::set<long long> current;
  brackets(p.x0, current);
  double need_lo = p.x0, need_hi = p.x0;
  bool exits = false;
  int exit_stage = 0;
  bool truncated = false;

  for (const StageCtx& s : schedule) {
    std::set<long long> next;
    for (long long idx : current) {
      double x = state_of(idx);
      if (p.mode == Mode::MinTime && p.in_terminal(x)) continue;
      for (double t : s.tvals) {
        for (double a : s.avals) {
          double fx;
          try {
            fx = p.dynamics.f.eval(make_bindings(x, t, a, s.tau, s.stage_no));
          } catch (const EvalError& e) {
            rethrow_with_location(e, s.stage_no, x);
          }
          double xp = x + s.dt * fx;
          need_lo = std::min(need_lo, xp);
          need_hi = std::max(need_hi, xp);
          if (!in_grid(g, xp) && !exits) {
            exits = true;
            exit_stage = s.stage_no;
          }
          brackets(xp, next);
        }
      }
      if (next.size() > kScanNodeCap) {
        truncated = true;
        break;
      }
    }
    current.swap(next);
    if (truncated) break;
  }

  if (exits) {
    std::string msg =
        "state grid [" + std::to_string(g.lo) + ", " + std::to_string(g.hi) +
        "] too small: the value at x0=" + std::to_string(p.x0) +
        " depends on states in [" + std::to_string(need_lo) + ", " +
        std::to_string(need_hi) + "] (first exit at stage " +
        std::to_string(exit_stage) + ")";
    if (truncated) msg += "; required interval estimated from a partial scan";
    throw GridExitError(need_lo, need_hi, exit_stage, msg);
  }
  if (truncated)
    throw SolveError("dependency scan exceeded the node cap; state grid or "
                     "stage count too large");
}

Solution run_induction(const DiscreteProblem& p, int threads) {
  validate(p);
  std::vector<StageCtx> schedule = stage_schedule(p);
  scan_x0_dependencies(p, schedule);

  const Grid& g = p.state_grid;
  Solution sol;
  sol.value.stages = p.stages;
  sol.value.grid = g;
  sol.value.values.assign(static_cast<std::size_t>(p.stages + 1) * g.n, 0.0);
  sol.policy.stages = p.stages;
  sol.policy.grid = g;
  sol.policy.control.assign(static_cast<std::size_t>(p.stages) * g.n, 0.0);
  sol.policy.disturbance.assign(static_cast<std::size_t>(p.stages) * g.n,
                                0.0);

  // Layer 0: terminal condition.
  if (p.mode == Mode::MinTime) {
    for (int i = 0; i < g.n; ++i)
      sol.value.at(0, i) = p.in_terminal(g.value(i)) ? 0.0 : kUnreachable;
  }

  const bool min_time = p.mode == Mode::MinTime;
  for (int k = 1; k <= p.stages; ++k) {
    const StageCtx& s = schedule[p.stages - k];  // stage no = stages - k + 1
    double* cur = &sol.value.values[static_cast<std::size_t>(k) * g.n];
    double* pol_t =
        &sol.policy.control[static_cast<std::size_t>(k - 1) * g.n];
    double* pol_a =
        &sol.policy.disturbance[static_cast<std::size_t>(k - 1) * g.n];

    auto node_body = [&](int i) {
      double x = g.value(i);
      if (min_time && p.in_terminal(x)) {
        cur[i] = 0.0;
        pol_t[i] = s.tvals.front();
        pol_a[i] = s.avals.front();
        return;
      }
      double best = kUnreachable;
      double best_t = s.tvals.front();
      double best_a = s.avals.front();
      bool best_set = false;
      for (double t : s.tvals) {
        double worst = -kUnreachable;
        double worst_a = s.avals.front();
        for (double a : s.avals) {
          double v;
          double fx;
          try {
            fx = p.dynamics.f.eval(make_bindings(x, t, a, s.tau, s.stage_no));
          } catch (const EvalError& e) {
            rethrow_with_location(e, s.stage_no, x);
          }
          double xp = x + s.dt * fx;
          if (!in_grid(g, xp)) {
            v = kUnreachable;
          } else {
            double cont = sol.value.interpolate(k - 1, xp);
            if (min_time) {
              v = cont;
            } else {
              double e_cost;
              try {
                e_cost = p.dynamics.cost.eval(
                    make_bindings(x, t, a, s.tau, s.stage_no));
              } catch (const EvalError& e) {
                rethrow_with_location(e, s.stage_no, x);
              }
              v = e_cost + cont;
            }
          }
          if (v > worst) {
            worst = v;
            worst_a = a;
          }
        }
        if (min_time && worst < kUnreachable) worst += 1.0;
        if (!best_set || worst < best) {
          best = worst;
          best_t = t;
          best_a = worst_a;
          best_set = true;
        }
      }
      cur[i] = best;
      pol_t[i] = best_t;
      pol_a[i] = best_a;
    };
    parallel_for(g.n, threads, node_body);
  }
  return sol;
}

}  // namespace

int Grid::nearest(double x) const {
  if (n <= 1) return 0;
  double u = (x - lo) / step();
  long long i = std::llround(u);
  if (i < 0) i = 0;
  if (i > n - 1) i = n - 1;
  return static_cast<int>(i);
}

double ValueTable::interpolate(int stages_remaining, double x) const {
  const double* layer =
      &values[static_cast<std::size_t>(stages_remaining) * grid.n];
  if (grid.n == 1) return layer[0];
  double u = (x - grid.lo) / grid.step();
  double r = std::round(u);
  if (std::fabs(u - r) <= kSnapTol && r >= 0.0 && r <= grid.n - 1)
    return layer[static_cast<int>(r)];
  int i = static_cast<int>(std::floor(u));
  if (i < 0) i = 0;
  if (i > grid.n - 2) i = grid.n - 2;
  double w = u - i;
  return (1.0 - w) * layer[i] + w * layer[i + 1];
}

double Policy::control_at(int stages_remaining, double x) const {
  return control_node(stages_remaining, grid.nearest(x));
}

double Policy::disturbance_at(int stages_remaining, double x) const {
  return disturbance_node(stages_remaining, grid.nearest(x));
}

void validate(const DiscreteProblem& p) {
  require(p.stages >= 1, "stages must be >= 1");
  validate(p.dynamics);
  require(!p.dt.empty() &&
              (p.dt.size() == 1 ||
               p.dt.size() == static_cast<std::size_t>(p.stages)),
          "dt must have one entry or one entry per stage");
  for (double d : p.dt) require(d > 0.0, "dt must be > 0");
  require(p.state_grid.n >= 2, "state grid needs at least 2 nodes");
  require(p.state_grid.lo < p.state_grid.hi,
          "state grid must satisfy lo < hi");
  require(p.control_grid_n >= 2, "control grid needs at least 2 nodes");
  require(p.disturbance_grid_n >= 2,
          "disturbance grid needs at least 2 nodes");
  require(p.x0 >= p.state_grid.lo && p.x0 <= p.state_grid.hi,
          "x0 must lie inside the state grid interval");
  if (p.terminal_set) {
    require(p.terminal_set->lo <= p.terminal_set->hi,
            "terminal set must satisfy lo <= hi");
    require(p.terminal_set->lo <= p.state_grid.hi &&
                p.terminal_set->hi >= p.state_grid.lo,
            "terminal set does not intersect the state grid");
  }
  if (p.mode == Mode::MinTime)
    require(p.terminal_set.has_value(), "min-time mode requires terminal_set");
  require(p.stage_control_bounds.empty() ||
              p.stage_control_bounds.size() ==
                  static_cast<std::size_t>(p.stages),
          "stage_control_bounds must have one interval per stage");
  require(p.stage_disturbance_bounds.empty() ||
              p.stage_disturbance_bounds.size() ==
                  static_cast<std::size_t>(p.stages),
          "stage_disturbance_bounds must have one interval per stage");
  for (const Interval& iv : p.stage_control_bounds)
    require(iv.lo <= iv.hi, "stage control bounds must satisfy lo <= hi");
  for (const Interval& iv : p.stage_disturbance_bounds)
    require(iv.lo <= iv.hi, "stage disturbance bounds must satisfy lo <= hi");
}

double DiscreteProblem::stage_tau(int stage_no) const {
  double tau = 0.0;
  for (int i = 1; i < stage_no; ++i) tau += stage_dt(i);
  return tau;
}

Solution solve_min_cost(const DiscreteProblem& p, int threads) {
  require(p.mode == Mode::MinCost, "solve_min_cost requires mode = min-cost");
  return run_induction(p, threads);
}

Solution solve_min_time(const DiscreteProblem& p, int threads) {
  require(p.mode == Mode::MinTime, "solve_min_time requires mode = min-time");
  return run_induction(p, threads);
}

Solution solve(const DiscreteProblem& p, int threads) {
  return p.mode == Mode::MinCost ? solve_min_cost(p, threads)
                                 : solve_min_time(p, threads);
}

Trajectory simulate(const DiscreteProblem& p, const Policy& policy,
                    std::span<const double> disturbances) {
  require(disturbances.size() == static_cast<std::size_t>(p.stages),
          "disturbance sequence must have one value per stage");
  Trajectory traj;
  traj.states.push_back(p.x0);
  double x = p.x0;
  double tau = 0.0;
  if (p.mode == Mode::MinTime && p.in_terminal(x)) {
    traj.reached_step = 0;
    return traj;
  }
  for (int i = 1; i <= p.stages; ++i) {
    double dt = p.stage_dt(i);
    double a = disturbances[i - 1];
    if (!contains_tol(p.disturbance_bounds_for(i), a)) {
      throw ValidationError("simulate: disturbance out of bounds at stage " +
                            std::to_string(i));
    }
    int k = p.stages - i + 1;
    double t = policy.control_at(k, x);
    double fx, e_cost;
    try {
      fx = p.dynamics.f.eval(make_bindings(x, t, a, tau, i));
      e_cost = p.dynamics.cost.eval(make_bindings(x, t, a, tau, i));
    } catch (const EvalError& e) {
      rethrow_with_location(e, i, x);
    }
    double xp = x + dt * fx;
    if (!in_grid(p.state_grid, xp)) {
      throw GridExitError(std::min(xp, p.state_grid.lo),
                          std::max(xp, p.state_grid.hi), i,
                          "simulate: state left the grid at stage " +
                              std::to_string(i) + " (x=" + std::to_string(xp) +
                              ")");
    }
    traj.controls.push_back(t);
    traj.disturbances.push_back(a);
    traj.stage_costs.push_back(e_cost);
    traj.total_cost += e_cost;
    traj.states.push_back(xp);
    x = xp;
    tau += dt;
    if (p.mode == Mode::MinTime && p.in_terminal(x)) {
      traj.reached_step = i;
      break;
    }
  }
  return traj;
}

WorstCase worst_case_disturbance(const DiscreteProblem& p, const Solution& s) {
  require(p.mode == Mode::MinCost,
          "worst_case_disturbance requires a solved min-cost problem");
  std::vector<StageCtx> schedule = stage_schedule(p);
  WorstCase wc;
  double x = p.x0;
  for (int i = 1; i <= p.stages; ++i) {
    const StageCtx& st = schedule[i - 1];
    int k = p.stages - i + 1;
    double t = s.policy.control_at(k, x);
    double best_v = -kUnreachable;
    double best_a = st.avals.front();
    double best_xp = x;
    double best_cost = 0.0;
    bool best_in_grid = false;
    for (double a : st.avals) {
      double fx;
      try {
        fx = p.dynamics.f.eval(make_bindings(x, t, a, st.tau, i));
      } catch (const EvalError& e) {
        rethrow_with_location(e, i, x);
      }
      double xp = x + st.dt * fx;
      double v, e_cost = 0.0;
      bool ok = in_grid(p.state_grid, xp);
      if (!ok) {
        v = kUnreachable;
      } else {
        try {
          e_cost = p.dynamics.cost.eval(make_bindings(x, t, a, st.tau, i));
        } catch (const EvalError& e) {
          rethrow_with_location(e, i, x);
        }
        v = e_cost + s.value.interpolate(k - 1, xp);
      }
      if (v > best_v) {
        best_v = v;
        best_a = a;
        best_xp = xp;
        best_cost = e_cost;
        best_in_grid = ok;
      }
    }
    if (!best_in_grid) {
      throw GridExitError(std::min(best_xp, p.state_grid.lo),
                          std::max(best_xp, p.state_grid.hi), i,
                          "worst-case disturbance pushes the state off the "
                          "grid at stage " +
                              std::to_string(i));
    }
    wc.disturbances.push_back(best_a);
    wc.cost += best_cost;
    x = best_xp;
  }
  return wc;
}

Trajectory play(const DiscreteProblem& p, const StageFn& control,
                const StageFn& disturbance) {
  Trajectory traj;
  traj.states.push_back(p.x0);
  double x = p.x0;
  double tau = 0.0;
  if (p.mode == Mode::MinTime && p.in_terminal(x)) {
    traj.reached_step = 0;
    return traj;
  }
  for (int i = 1; i <= p.stages; ++i) {
    double dt = p.stage_dt(i);
    double t = control(i, x);
    double a = disturbance(i, x);
    double fx, e_cost;
    try {
      fx = p.dynamics.f.eval(make_bindings(x, t, a, tau, i));
      e_cost = p.dynamics.cost.eval(make_bindings(x, t, a, tau, i));
    } catch (const EvalError& e) {
      rethrow_with_location(e, i, x);
    }
    double xp = x + dt * fx;
    traj.controls.push_back(t);
    traj.disturbances.push_back(a);
    traj.stage_costs.push_back(e_cost);
    traj.total_cost += e_cost;
    traj.states.push_back(xp);
    x = xp;
    tau += dt;
    if (p.mode == Mode::MinTime && p.in_terminal(x)) {
      traj.reached_step = i;
      break;
    }
  }
  return traj;
}

Trajectory play_feedback(const DiscreteProblem& p, const Solution& s) {
  auto ctrl = [&](int stage_no, double x) {
    return s.policy.control_at(p.stages - stage_no + 1, x);
  };
  auto dist = [&](int stage_no, double x) {
    return s.policy.disturbance_at(p.stages - stage_no + 1, x);
  };
  return play(p, ctrl, dist);
}

double policy_worst_cost(const DiscreteProblem& p, const Solution& s) {
  std::vector<StageCtx> schedule = stage_schedule(p);
  const Grid& g = p.state_grid;
  std::vector<double> prev(g.n, 0.0), cur(g.n, 0.0);
  ValueTable layer;  // reuse the interpolation helper
  layer.stages = 0;
  layer.grid = g;

  for (int k = 1; k <= p.stages; ++k) {
    const StageCtx& st = schedule[p.stages - k];
    layer.values = prev;
    for (int i = 0; i < g.n; ++i) {
      double x = g.value(i);
      if (p.mode == Mode::MinTime && p.in_terminal(x)) {
        cur[i] = 0.0;
        continue;
      }
      double t = s.policy.control_node(k, i);
      double worst = -kUnreachable;
      for (double a : st.avals) {
        double fx;
        try {
          fx = p.dynamics.f.eval(make_bindings(x, t, a, st.tau, st.stage_no));
        } catch (const EvalError& e) {
          rethrow_with_location(e, st.stage_no, x);
        }
        double xp = x + st.dt * fx;
        double v;
        if (!in_grid(g, xp)) {
          v = kUnreachable;
        } else {
          double e_cost;
          try {
            e_cost = p.dynamics.cost.eval(
                make_bindings(x, t, a, st.tau, st.stage_no));
          } catch (const EvalError& e) {
            rethrow_with_location(e, st.stage_no, x);
          }
          v = e_cost + layer.interpolate(0, xp);
        }
        if (v > worst) worst = v;
      }
      cur[i] = worst;
    }
    prev.swap(cur);
  }
  layer.values = prev;
  return layer.interpolate(0, p.x0);
}

}  // namespace trainplan
