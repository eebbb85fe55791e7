#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rcsolve/model.hpp"

namespace rcsolve {

// Price vector seen by one subsystem after dualizing the coupling rows:
// c_i + H_i^T lambda.
using AdjustedPrice = Vector;

struct InnerSolution {
  Vector point;
  double value = 0.0;            // price . point
  bool vertex_certified = false; // point is an extreme point of conv(X_i)
};

AdjustedPrice adjusted_price(const Subsystem& sub, const Vector& multipliers);

// All points of X_i in deterministic (lexicographic / schedule-DFS) order.
// Throws TooLargeError when the set can exceed cap.
std::vector<Vector> enumerate_points(const Subsystem& sub, std::uint64_t cap = 1'000'000);

// min price . x over X_i. Ties are broken towards the lexicographically
// smallest point, which makes the selection an extreme point of conv(X_i).
// Batteries dispatch to the greedy / DP schedulers below.
InnerSolution inner_solve(const Subsystem& sub, const Vector& price);

// All minimizers within an absolute value tolerance (enumerable shapes only).
std::vector<Vector> inner_minimizer_set(const Subsystem& sub, const Vector& price,
                                        double tol = kTieTol);

// (min, max) of h . x over X_i, both attained.
std::pair<double, double> linear_range(const Subsystem& sub, const Vector& h);

// Charge-only schedule: must pick at least k_min slots (terminal target),
// may pick up to k_max (capacity); optimal choice is the k_min cheapest
// slots plus any further negative-priced ones. Ties go to earlier slots.
InnerSolution greedy_charge_solve(const PevBattery& bat, const Vector& charge_price);

// Exact schedule optimum with discharging. Dynamic program over
// (#charges, #discharges) counts, which determine the state of charge.
// Objective: sum_k charge_price[k] u[k] - discharge_price[k] v[k].
// Ties prefer no action, then charge, then discharge.
InnerSolution dp_v2g_solve(const PevBattery& bat, const Vector& charge_price,
                           const Vector& discharge_price);

// Smallest / largest admissible number of charge slots for a charge-only
// schedule; {k_min, k_max}. Throws InfeasibleError when none exists.
std::pair<int, int> charge_slot_bounds(const PevBattery& bat);

}  // namespace rcsolve
