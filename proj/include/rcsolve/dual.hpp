#pragma once

#include <functional>
#include <vector>

#include "rcsolve/model.hpp"

namespace rcsolve {

// Dual function of the coupled problem at multipliers lambda >= 0:
//   d(lambda) = -lambda . b + sum_i min_{x in X_i} (c_i + H_i^T lambda) . x
// It is concave and piecewise linear; usage - b of the inner minimizers is a
// supergradient. The solver below is plain projected subgradient ascent.

struct StepRule {
  enum class Kind { Constant, ConstantEpochDecay, Diminishing };
  Kind kind = Kind::ConstantEpochDecay;
  double c0 = 0.0;    // 0: scale to 1/||g(0)||_inf on the first iteration
  int epoch_len = 25; // iterations per decay epoch
  double decay = 0.5;
};

// Step for one iteration (0-based) given the resolved base step c0.
double step_size(const StepRule& rule, int iteration, double c0);

struct StopCriteria {
  int max_iters = 500;
  // Stop early when every one of the last `window` iterates kept the worst
  // coupling violation of its inner minimizers at most tol_violation and the
  // best dual value moved less than tol_improvement over that window.
  double tol_violation = 0.0;
  double tol_improvement = 1e-9;
  int window = 50;
};

struct DualValue {
  double value = 0.0;
  Assignment points;
  Vector subgradient;  // usage - b
};

DualValue dual_value(const Instance& inst, const Vector& multipliers, int threads = 1);

struct DualTrace {
  std::vector<double> value;
  std::vector<double> max_violation;  // positive part of the subgradient
  std::vector<double> step;
  std::vector<double> best_value;     // running maximum
  std::vector<Vector> multipliers;
  std::vector<Assignment> inner_points;  // populated only when recording is on
};

struct SubgradientOptions {
  StepRule step{};
  StopCriteria stop{};
  Vector initial;      // empty: start from zero
  int threads = 1;
  int record_inner = -1;  // -1 auto (small instances only), 0 off, 1 on
  // Observer called once per iteration with the inner minimizers and their
  // coupling usage; used by the recovery layer to watch candidates go by.
  std::function<void(int, const Vector&, double, const Assignment&, const Vector&)> on_iterate;
};

struct DualResult {
  Vector best_multipliers;
  double best_value = 0.0;
  Assignment best_assignment;  // inner minimizers at the best multipliers
  int iterations = 0;
  double resolved_c0 = 0.0;
  DualTrace trace;
};

DualResult subgradient_solve(const Instance& inst, const SubgradientOptions& opt = {});

}  // namespace rcsolve
