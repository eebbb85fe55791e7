#pragma once

#include <optional>
#include <string>

#include "rcsolve/contraction.hpp"
#include "rcsolve/dual.hpp"
#include "rcsolve/model.hpp"

namespace rcsolve {

struct RecoveredSolution {
  Assignment assignment;
  bool feasible = false;  // against the original coupling and memberships
  double objective = 0.0;
  Vector usage;
  int extensions_used = 0;
  // True when the assignment is the one at the best contracted multipliers,
  // false when a feasible iterate seen along the way was better.
  bool at_best_multipliers = true;
};

struct BoundReport {
  Vector gamma;             // per-subsystem cost spread over X_i
  double gamma_max = 0.0;
  double duality_gap_bound = 0.0;   // rows * gamma_max
  double slater_zeta = 0.0;         // interior margin; <= 0 means none
  bool has_margin = false;
  double performance_bound = 0.0;   // (rows + ||rho||_inf / zeta) * gamma_max when has_margin
};

// max c_i . x - min c_i . x over X_i.
double cost_spread(const Subsystem& sub);
Vector cost_spreads(const Instance& inst);

// Number of subsystems whose points agree within tol (infinity norm).
int count_coincident(const Assignment& a, const Assignment& b, double tol = kFeasibilityTol);

// Interior margin of a candidate (one point of conv(X_i) per subsystem)
// against the instance's resource: min_k slack_k / subsystem count.
double slater_margin(const Instance& inst, const Assignment& candidate);

// Bound bundle for a contraction rho; pass the margin from slater_margin
// (anything <= 0 disables the performance bound).
BoundReport bounds(const Instance& original, const Vector& rho, double zeta);

// Re-solves the inner problems at the given multipliers and checks the
// result against the original coupling.
RecoveredSolution recover_primal(const Instance& original, const Vector& multipliers,
                                 double tol = kFeasibilityTol);

// For instances where every coupling contribution is nonnegative and zero
// points exist: zero out aggregate-heavy subsystems until the coupling
// holds. Throws RepairError if zeroing everyone does not help.
Assignment zero_contraction_repair(const Instance& inst, Assignment asg, int* zeroed = nullptr);

// Re-selection among near-optimal inner responses. A finite dual run leaves
// the selection x(lambda) slightly infeasible whenever subsystems respond
// bang-bang; switching a few of them to a response computed with the violated
// row priced up restores feasibility at near-tied cost. Each move re-solves
// one inner problem with the price c_i + H_i^T lambda + t * H_i[row,:] for an
// escalating penalty t and applies the cheapest switch that strictly shrinks
// the total violation.
struct RedispatchResult {
  Assignment assignment;
  Vector usage;
  double objective = 0.0;
  bool feasible = false;
  int moves = 0;
};

RedispatchResult redispatch_selection(const Instance& inst, const Vector& multipliers,
                                      Assignment start, double tol = kFeasibilityTol,
                                      int max_moves = 400);

// End-to-end solve: contract, run the dual ascent on the contracted
// instance, recover a primal point, and certify a gap against a dual bound
// of the *original* problem.
struct PipelineOptions {
  enum class Contraction { Basic, Block, TopK, Zero, None };
  Contraction contraction = Contraction::Basic;
  SubgradientOptions dual{};
  int max_extensions = 5;      // extra dual runs with halved steps when recovery is infeasible
  bool bound_run = true;       // dedicated subgradient pass on the original dual
  bool redispatch = true;      // re-selection pass at the original-dual multipliers
  int max_redispatch_moves = 400;
  double feasibility_tol = kFeasibilityTol;
};

struct PipelineResult {
  RecoveredSolution solution;
  double dual_bound = 0.0;            // valid lower bound for the original optimum
  double contracted_best_dual = 0.0;
  double gap_percent = 0.0;           // (objective - bound) / |bound| * 100
  Vector rho;
  Vector best_multipliers;
  int iterations_total = 0;
  int redispatch_moves = 0;
  DualTrace trace;                    // contracted run (first pass)
  std::optional<std::string> contraction_warning;
};

PipelineResult solve_pipeline(const Instance& inst, const PipelineOptions& opt = {});

}  // namespace rcsolve
