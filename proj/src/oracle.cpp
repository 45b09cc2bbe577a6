#include "trainplan/oracle.hpp"

#include <string>
#include <vector>

namespace trainplan::oracle {

namespace {

struct StageActions {
  double dt = 1.0;
  double tau = 0.0;
  int stage_no = 1;
  std::vector<double> tvals;
  std::vector<double> avals;
};

struct Recursion {
  const DiscreteProblem& p;
  std::vector<StageActions> stages;
  long long max_leaves;
  long long leaves = 0;

  Bindings bind(double x, double t, double a, const StageActions& s) const {
    Bindings b;
    b.set(Var::X, x)
        .set(Var::T, t)
        .set(Var::A, a)
        .set(Var::Tau, s.tau)
        .set(Var::Stage, static_cast<double>(s.stage_no));
    return b;
  }

  // Value with `remaining` stages to go from exact state x.
  double value(double x, int remaining) {
    if (remaining == 0) return 0.0;
    const StageActions& s = stages[p.stages - remaining];
    double best = 0.0;
    bool first_t = true;
    for (double t : s.tvals) {
      double worst = 0.0;
      bool first_a = true;
      for (double a : s.avals) {
        if (remaining == 1) {
          ++leaves;
          if (leaves > max_leaves) {
            throw BudgetError(leaves,
                              "oracle budget exceeded after " +
                                  std::to_string(leaves) + " leaves (cap " +
                                  std::to_string(max_leaves) + ")");
          }
        }
        double e = p.dynamics.cost.eval(bind(x, t, a, s));
        double xp = x + s.dt * p.dynamics.f.eval(bind(x, t, a, s));
        double v = e + value(xp, remaining - 1);
        if (first_a || v > worst) {
          worst = v;
          first_a = false;
        }
      }
      if (first_t || worst < best) {
        best = worst;
        first_t = false;
      }
    }
    return best;
  }
};

std::vector<double> action_values(const Interval& iv, int n) {
  Grid g{iv.lo, iv.hi, n};
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = g.value(i);
  return out;
}

}  // namespace

OracleResult exhaustive_value(const DiscreteProblem& problem,
                              const OracleBudget& budget) {
  if (budget.max_nodes <= 0) throw ValidationError("oracle budget must be > 0");
  if (problem.stages == 0) return {0.0, 0};

  Recursion rec{problem, {}, budget.max_nodes};
  rec.stages.resize(problem.stages);
  double tau = 0.0;
  for (int i = 1; i <= problem.stages; ++i) {
    StageActions& s = rec.stages[i - 1];
    s.dt = problem.stage_dt(i);
    s.tau = tau;
    s.stage_no = i;
    s.tvals = action_values(problem.control_bounds_for(i),
                            problem.control_grid_n);
    s.avals = action_values(problem.disturbance_bounds_for(i),
                            problem.disturbance_grid_n);
    tau += s.dt;
  }

  OracleResult result;
  result.value = rec.value(problem.x0, problem.stages);
  result.leaf_count = rec.leaves;
  return result;
}

}  // namespace trainplan::oracle
