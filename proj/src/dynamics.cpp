#include "trainplan/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace trainplan {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

std::vector<double> linspace(const Interval& iv, int n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = iv.lo;
    return out;
  }
  double step = iv.width() / (n - 1);
  for (int i = 0; i < n; ++i) out[i] = iv.lo + i * step;
  out.back() = iv.hi;
  return out;
}

Bindings bind_fxa(double x, double t, double a) {
  Bindings b;
  b.set(Var::X, x).set(Var::T, t).set(Var::A, a).set(Var::Tau, 0.0).set(
      Var::Stage, 1.0);
  return b;
}

// Ratio of the largest gap between consecutive sorted values to the total
// range; 0 by convention when the range is empty.
double gap_ratio(std::vector<double>& values) {
  std::sort(values.begin(), values.end());
  double range = values.back() - values.front();
  if (range <= 0.0) return 0.0;
  double max_gap = 0.0;
  for (std::size_t i = 1; i < values.size(); ++i)
    max_gap = std::max(max_gap, values[i] - values[i - 1]);
  return max_gap / range;
}

}  // namespace

void validate(const DynamicsSpec& spec) {
  require(!spec.f.empty(), "dynamics: f expression missing");
  require(!spec.cost.empty(), "dynamics: cost expression missing");
  require(spec.control_bounds.lo <= spec.control_bounds.hi,
          "control bounds must satisfy lo <= hi");
  require(spec.disturbance_bounds.lo <= spec.disturbance_bounds.hi,
          "disturbance bounds must satisfy lo <= hi");
  require(spec.state_domain.lo <= spec.state_domain.hi,
          "state domain must satisfy lo <= hi");
  require(spec.state_domain.lo >= 0.0,
          "state domain lower bound must be >= 0");
  require(!spec.f.uses(Var::Stage),
          "f may not reference 'stage' (allowed: x, t, a, tau)");
}

double euler_step(const DynamicsSpec& spec, double x, double t, double a,
                  double dt) {
  require(dt > 0.0, "euler_step: dt must be > 0");
  require(spec.control_bounds.contains(t),
          "euler_step: control outside its bounds");
  require(spec.disturbance_bounds.contains(a),
          "euler_step: disturbance outside its bounds");
  return x + dt * spec.f.eval(bind_fxa(x, t, a));
}

double estimate_lipschitz(const DynamicsSpec& spec, const SamplingPlan& plan) {
  require(plan.state_samples >= 2 && spec.state_domain.width() > 0.0,
          "lipschitz estimate needs at least two distinct state samples");
  require(plan.control_samples >= 1 && plan.disturbance_samples >= 1,
          "sampling plan must cover the control and disturbance axes");

  std::vector<double> xs = linspace(spec.state_domain, plan.state_samples);
  std::vector<double> ts = linspace(spec.control_bounds, plan.control_samples);
  std::vector<double> as =
      linspace(spec.disturbance_bounds, plan.disturbance_samples);

  double k = 0.0;
  std::vector<double> fx(xs.size());
  for (double t : ts) {
    for (double a : as) {
      for (std::size_t i = 0; i < xs.size(); ++i)
        fx[i] = spec.f.eval(bind_fxa(xs[i], t, a));
      for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t j = i + 1; j < xs.size(); ++j) {
          double dx = std::fabs(xs[j] - xs[i]);
          if (dx == 0.0) continue;
          k = std::max(k, std::fabs(fx[j] - fx[i]) / dx);
        }
      }
    }
  }
  return k;
}

GrowthFit estimate_growth(const DynamicsSpec& spec, const SamplingPlan& plan) {
  require(plan.state_samples >= 2 && spec.state_domain.width() > 0.0,
          "growth estimate needs at least two distinct state samples");

  std::vector<double> xs = linspace(spec.state_domain, plan.state_samples);
  std::vector<double> ts = linspace(spec.control_bounds, plan.control_samples);
  std::vector<double> as =
      linspace(spec.disturbance_bounds, plan.disturbance_samples);

  // Sample |f| everywhere once.
  std::vector<std::vector<double>> absf(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    absf[i].reserve(ts.size() * as.size());
    for (double t : ts)
      for (double a : as)
        absf[i].push_back(std::fabs(spec.f.eval(bind_fxa(xs[i], t, a))));
  }

  // Pass 1: intercept from the sample nearest x = 0.
  std::size_t i0 = 0;
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (std::fabs(xs[i]) < std::fabs(xs[i0])) i0 = i;
  double m0 = 0.0;
  for (double v : absf[i0]) m0 = std::max(m0, v);

  // Pass 2: least slope covering all samples given that intercept.
  double n = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] <= 0.0) continue;
    for (double v : absf[i]) n = std::max(n, (v - m0) / xs[i]);
  }
  if (n < 0.0) n = 0.0;

  // Re-fit the intercept so the envelope is tight and covers every sample.
  double m = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (double v : absf[i]) m = std::max(m, v - n * xs[i]);
  if (m < 0.0) m = 0.0;

  return {m, n};
}

double vectogram_diagnostic(const DynamicsSpec& spec, double x, int samples) {
  require(samples >= 3, "vectogram diagnostic needs at least 3 samples");
  std::vector<double> ts = linspace(spec.control_bounds, samples);
  std::vector<double> as = linspace(spec.disturbance_bounds, samples);

  double worst = 0.0;
  std::vector<double> values(samples);
  for (double a : as) {
    for (int i = 0; i < samples; ++i)
      values[i] = spec.f.eval(bind_fxa(x, ts[i], a));
    worst = std::max(worst, gap_ratio(values));
  }
  for (double t : ts) {
    for (int i = 0; i < samples; ++i)
      values[i] = spec.f.eval(bind_fxa(x, t, as[i]));
    worst = std::max(worst, gap_ratio(values));
  }
  return worst;
}

RegularityReport assess_regularity(const DynamicsSpec& spec,
                                   const SamplingPlan& plan) {
  RegularityReport r;
  r.lipschitz_k = estimate_lipschitz(spec, plan);
  GrowthFit fit = estimate_growth(spec, plan);
  r.growth_m = fit.m;
  r.growth_n = fit.n;
  double mid = 0.5 * (spec.state_domain.lo + spec.state_domain.hi);
  r.vectogram_max_gap =
      vectogram_diagnostic(spec, mid, std::max(3, plan.state_samples));
  r.sample_count =
      plan.state_samples * plan.control_samples * plan.disturbance_samples;
  return r;
}

}  // namespace trainplan
