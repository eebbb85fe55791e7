#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rcsolve/types.hpp"

namespace rcsolve {

// The coupled problem is
//   min sum_i c_i . x_i   s.t.  sum_i H_i x_i <= b,   x_i in X_i,
// where each X_i is a finite (mixed-integer-representable) set described by
// one of the subsystem shapes below. Two-sided resource limits are modelled
// as two rows with opposite signs and tracked in Instance::row_pairs.

// Integer points of {x : lower <= x <= upper, a x <= d}.
struct LatticePolytope {
  Matrix a;  // may have zero rows (pure box)
  Vector d;
  IntVector lower;
  IntVector upper;
};

// Explicit finite point list, used verbatim as the feasible set.
struct VertexList {
  std::vector<Vector> points;
};

// Battery charging schedules: binary charge u[k] (and discharge v[k] when
// v2g) per time step. State of charge follows
//   e[k+1] = e[k] + power*dt*((1-loss)*u[k] - (1+loss)*v[k])
// with e_min <= e[k] <= e_max throughout and e[steps] >= e_ref.
// Decision vector is u (charge-only) or [u; v] (v2g); u[k]+v[k] <= 1.
struct PevBattery {
  double power_kw = 0.0;
  double e_init_kwh = 0.0;
  double e_ref_kwh = 0.0;
  double e_min_kwh = 0.0;
  double e_max_kwh = 0.0;
  double loss = 0.0;
  int steps = 0;
  double dt_hours = 0.0;
  bool v2g = false;
  Vector delta_u;  // per-step price offsets already baked into the cost vector
  Vector delta_v;

  int dim() const { return v2g ? 2 * steps : steps; }
  double charge_step_kwh() const { return power_kw * dt_hours * (1.0 - loss); }
  double discharge_step_kwh() const { return power_kw * dt_hours * (1.0 + loss); }
};

struct Subsystem {
  std::variant<LatticePolytope, VertexList, PevBattery> shape;
  Vector cost;      // c_i
  Matrix coupling;  // H_i block, resource rows x dim columns

  Index dim() const;
};

struct Instance {
  std::vector<Subsystem> subsystems;
  Vector resource;  // b
  std::vector<std::pair<int, int>> row_pairs;  // (upper row, mirrored lower row)

  Index rows() const { return resource.size(); }
  Index size() const { return static_cast<Index>(subsystems.size()); }
};

// One point per subsystem, in subsystem order.
using Assignment = std::vector<Vector>;

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  bool ok() const { return errors.empty(); }
};

struct FeasibilityReport {
  bool feasible = false;     // coupling_ok and all memberships
  bool coupling_ok = false;
  Vector slack;              // b - usage
  double max_violation = 0.0;
  std::vector<std::string> membership_errors;
};

struct BruteForceResult {
  double objective = 0.0;
  Assignment minimizer;
  std::uint64_t combinations = 0;  // size of the full cross product
};

// Structural and shape checks; dimension mismatches are errors, a subsystem
// count not exceeding the number of coupling rows is only warned about.
ValidationReport validate_instance(const Instance& inst);

// sum_i c_i . x_i, accumulated in subsystem order.
double evaluate_objective(const Instance& inst, const Assignment& asg);

// sum_i H_i x_i, accumulated in subsystem order.
Vector coupling_usage(const Instance& inst, const Assignment& asg);

// Checks membership of every x_i in its X_i and the coupling rows.
FeasibilityReport check_feasibility(const Instance& inst, const Assignment& asg,
                                    double tol = kFeasibilityTol);

// Exact optimum by exhaustive search over the cross product of the subsystem
// point sets (depth-first with safe usage/objective pruning). Throws
// TooLargeError when the cross product exceeds cap.
BruteForceResult brute_force_solve(const Instance& inst, std::uint64_t cap = 10'000'000);

// Membership of a single point in a subsystem's feasible set; diagnostics
// appended to `why` when provided.
bool subsystem_contains(const Subsystem& sub, const Vector& x, double tol = kFeasibilityTol,
                        std::string* why = nullptr);

}  // namespace rcsolve
