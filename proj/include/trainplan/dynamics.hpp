#pragma once

#include "trainplan/expr.hpp"

namespace trainplan {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  bool contains(double v) const { return v >= lo && v <= hi; }
};

// Controlled scalar dynamics xdot = f(x, t, a) plus the running cost
// e(t, a, x). Disturbance is scalar. Both expressions come from problem
// files; f may reference x, t, a, tau and cost additionally stage.
struct DynamicsSpec {
  Expr f;
  Expr cost;
  Interval control_bounds;
  Interval disturbance_bounds;
  Interval state_domain{0.0, 10.0};  // admissible education levels
};

void validate(const DynamicsSpec& spec);

// One explicit Euler step x + dt * f(x, t, a). The result is not clamped to
// state_domain; callers decide what leaving the window means.
double euler_step(const DynamicsSpec& spec, double x, double t, double a,
                  double dt);

// Uniform sample grid sizes per axis for the regularity estimators.
struct SamplingPlan {
  int state_samples = 33;
  int control_samples = 33;
  int disturbance_samples = 33;
};

// Largest sampled difference quotient |f(x,t,a) - f(x',t,a)| / |x - x'|.
// A lower bound on the true Lipschitz constant.
double estimate_lipschitz(const DynamicsSpec& spec,
                          const SamplingPlan& plan = {});

struct GrowthFit {
  double m = 0.0;
  double n = 0.0;
};

// Fits the smallest affine envelope |f| <= m + n*x over the sample set.
GrowthFit estimate_growth(const DynamicsSpec& spec,
                          const SamplingPlan& plan = {});

// Largest relative gap in the sampled one-parameter images f(x, T, a) and
// f(x, t, Q). Near zero for a well-posed configuration; large values flag a
// mistake (e.g. a discontinuous expression). Zero-range image returns 0.
double vectogram_diagnostic(const DynamicsSpec& spec, double x, int samples);

struct RegularityReport {
  double lipschitz_k = 0.0;
  double growth_m = 0.0;
  double growth_n = 0.0;
  double vectogram_max_gap = 0.0;
  int sample_count = 0;
};

// Runs all three estimators; the vectogram is probed at the midpoint of
// state_domain. Estimates are advisory diagnostics, taken at tau = 0.
RegularityReport assess_regularity(const DynamicsSpec& spec,
                                   const SamplingPlan& plan = {});

}  // namespace trainplan
