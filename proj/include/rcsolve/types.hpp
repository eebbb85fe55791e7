#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace rcsolve {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using IntVector = Eigen::VectorXi;
using Index = Eigen::Index;

// Shared numeric tolerances. Values are pinned once here so every module and
// every test agrees on what "integral", "feasible" and "tied" mean.
inline constexpr double kIntegralityTol = 1e-9;  // |x - round(x)| for lattice membership
inline constexpr double kFeasibilityTol = 1e-7;  // coupling / membership slack checks
inline constexpr double kPivotTol = 1e-9;        // simplex pivot threshold
inline constexpr double kRankTolFactor = 1e-10;  // numeric rank: tol * max|entry|
inline constexpr double kTieTol = 1e-9;          // inner-minimizer value ties
inline constexpr double kSocTol = 1e-9;          // battery state-of-charge comparisons, kWh

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Search space or LP column count exceeds the configured cap.
struct TooLargeError : SolverError {
  using SolverError::SolverError;
};

// A subsystem (or the coupled problem) admits no feasible point.
struct InfeasibleError : SolverError {
  using SolverError::SolverError;
};

// LP objective unbounded below; indicates a malformed input.
struct UnboundedError : SolverError {
  using SolverError::SolverError;
};

// Zero-contraction repair could not restore coupling feasibility.
struct RepairError : SolverError {
  using SolverError::SolverError;
};

// Malformed instance data, empty subsystems, inconsistent dimensions.
struct InputError : SolverError {
  using SolverError::SolverError;
};

}  // namespace rcsolve
