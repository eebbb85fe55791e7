#include "rcsolve/dual.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rcsolve/inner.hpp"
#include "rcsolve/util.hpp"

namespace rcsolve {

double step_size(const StepRule& rule, int iteration, double c0) {
  switch (rule.kind) {
    case StepRule::Kind::Constant:
      return c0;
    case StepRule::Kind::ConstantEpochDecay:
      return c0 * std::pow(rule.decay, iteration / std::max(1, rule.epoch_len));
    case StepRule::Kind::Diminishing:
      return c0 / std::sqrt(iteration + 1.0);
  }
  return c0;
}

DualValue dual_value(const Instance& inst, const Vector& multipliers, int threads) {
  if (multipliers.size() != inst.rows()) throw InputError("multiplier length mismatch");
  const Index ns = inst.size();
  DualValue dv;
  dv.points.resize(ns);
  std::vector<double> values(ns);
  parallel_for(ns, ns >= 64 ? threads : 1, [&](Index i) {
    const InnerSolution s = inner_solve(inst.subsystems[i], adjusted_price(inst.subsystems[i], multipliers));
    dv.points[i] = s.point;
    values[i] = s.value;
  });
  // Serial reduction in subsystem order keeps results thread-count invariant.
  double inner_sum = 0.0;
  for (Index i = 0; i < ns; ++i) inner_sum += values[i];
  Vector usage = Vector::Zero(inst.rows());
  for (Index i = 0; i < ns; ++i) usage += inst.subsystems[i].coupling * dv.points[i];
  dv.value = -multipliers.dot(inst.resource) + inner_sum;
  dv.subgradient = usage - inst.resource;
  return dv;
}

DualResult subgradient_solve(const Instance& inst, const SubgradientOptions& opt) {
  const Index m = inst.rows();
  Vector lam = opt.initial.size() ? opt.initial : Vector::Zero(m);
  if (lam.size() != m) throw InputError("initial multiplier length mismatch");
  if ((lam.array() < 0).any()) throw InputError("negative initial multiplier");

  Index total_dim = 0;
  for (const Subsystem& s : inst.subsystems) total_dim += s.dim();
  const bool record = opt.record_inner == 1 ||
                      (opt.record_inner < 0 && inst.size() * total_dim <= 50'000);

  DualResult res;
  res.best_value = -std::numeric_limits<double>::infinity();
  double c0 = opt.step.c0;
  const int iters = std::max(1, opt.stop.max_iters);
  int feasible_run = 0;  // consecutive iterates with violation within tolerance
  res.trace.value.reserve(iters);

  for (int it = 0; it < iters; ++it) {
    DualValue dv = dual_value(inst, lam, opt.threads);
    const double viol = std::max(0.0, dv.subgradient.maxCoeff());
    if (it == 0 && c0 <= 0.0) {
      const double g0 = dv.subgradient.lpNorm<Eigen::Infinity>();
      c0 = g0 > 0 ? 1.0 / g0 : 1.0;
    }
    const double step = step_size(opt.step, it, c0);

    res.trace.value.push_back(dv.value);
    res.trace.max_violation.push_back(viol);
    res.trace.step.push_back(step);
    res.trace.multipliers.push_back(lam);
    if (record) res.trace.inner_points.push_back(dv.points);
    if (dv.value > res.best_value) {
      res.best_value = dv.value;
      res.best_multipliers = lam;
      res.best_assignment = dv.points;
    }
    res.trace.best_value.push_back(res.best_value);
    if (opt.on_iterate) opt.on_iterate(it, lam, dv.value, dv.points, dv.subgradient + inst.resource);
    res.iterations = it + 1;

    feasible_run = viol <= opt.stop.tol_violation ? feasible_run + 1 : 0;
    if (feasible_run >= opt.stop.window) {
      const double then = res.trace.best_value[it - (opt.stop.window - 1)];
      if (res.best_value - then <= opt.stop.tol_improvement) break;
    }
    lam = (lam + step * dv.subgradient).cwiseMax(0.0);
  }
  res.resolved_c0 = c0;
  return res;
}

}  // namespace rcsolve
