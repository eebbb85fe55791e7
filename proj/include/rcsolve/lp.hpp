#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rcsolve/model.hpp"

namespace rcsolve {

// Convexified master program over the hull vertices of every subsystem:
//   min  sum_ij p_ij (c_i . x_ij)
//   s.t. sum_ij p_ij H_i x_ij + q = b,   q >= 0            (coupling rows)
//        sum_j  p_ij = 1 per subsystem,  p >= 0            (convexity rows)
// Its optimal value equals the best dual bound, and its row multipliers are
// exact dual optimizers.
struct ExtendedLp {
  Matrix a;      // equality system rows: coupling then convexity
  Vector rhs;    // b then ones
  Vector c;      // vertex costs then zeros for the slacks
  Index coupling_rows = 0;
  std::vector<std::vector<Vector>> vertices;  // per-subsystem hull vertices, column order
  std::vector<Index> col_offset;              // first column of each subsystem block
  Index slack_offset = 0;
};

// Raw standard-form solve: min c.x, a x = rhs, x >= 0.
struct SimplexResult {
  Vector x;
  double objective = 0.0;
  Vector duals;  // row multipliers of the equality system as given
  std::vector<Index> basis;
  int iterations = 0;
};

struct LpSolution {
  Vector p;                // vertex weights
  Vector slack;            // coupling slacks q
  double objective = 0.0;
  Vector multipliers;      // lambda >= 0 for the coupling rows
  Vector convexity_duals;  // one per subsystem
  Vector reduced_costs;    // dual slacks s_ij per vertex column
  std::vector<Index> basis;
  int iterations = 0;
};

struct ComplementarityReport {
  // vertex columns (subsystem, local vertex index) where both the weight and
  // the dual slack vanish
  std::vector<std::pair<Index, Index>> degenerate;
  bool strict = false;
};

// Two-phase dense simplex with Bland's rule; pivot tolerance kPivotTol.
// Throws InfeasibleError / UnboundedError.
SimplexResult solve_standard_form(const Matrix& a, const Vector& rhs, const Vector& c);

// True when v lies in the convex hull of points (phase-1 feasibility LP).
bool conv_membership(const Vector& v, const std::vector<Vector>& points,
                     double tol = kFeasibilityTol);

// Extreme points of the hull of a finite point set, in input order.
std::vector<Vector> extreme_points(const std::vector<Vector>& points);

// Enumerates every subsystem, filters to hull vertices, assembles the master
// program. Throws TooLargeError past the column cap (or on unenumerable
// subsystems).
ExtendedLp build_extended_lp(const Instance& inst, std::uint64_t column_cap = 20000);

LpSolution simplex_solve(const ExtendedLp& lp);

// x_i = sum_j p_ij x_ij per subsystem; generally fractional.
Assignment recover_xlp(const ExtendedLp& lp, const LpSolution& sol);

// Copy with i.i.d. uniform[-magnitude, magnitude] noise added to every cost
// coordinate; deterministic in seed.
Instance perturb_costs(const Instance& inst, double magnitude, std::uint64_t seed);

// Strict complementarity of the vertex columns: exactly one of weight and
// dual slack may vanish.
ComplementarityReport strict_complementarity_check(const ExtendedLp& lp, const LpSolution& sol,
                                                   double tol = 1e-7);

}  // namespace rcsolve
