#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rcsolve/model.hpp"

namespace rcsolve {

// Shrinking the resource vector to b - rho before solving the dual makes any
// inner minimizer at the contracted dual optimum feasible for the original
// coupling. The variants below trade tightness for generality:
//   basic:  rho_k = rank(H) * max over all subsystems of range(H_i^k x)
//   block:  rho_k = rank(columns of the subsystems touching row k) * max range in that block
//   topk:   rho_k = sum of the largest ranges in the block (as many as the block rank)
// Ranges are exact per-subsystem extents of H_i^k x over X_i.

struct ContractedInstance {
  Instance instance;            // copy with resource = b - rho
  Vector rho;
  std::optional<std::string> warning;  // set when a quick interior probe fails
};

// Per-row support blocks: subsystems whose column block has a nonzero entry
// in that row.
std::vector<std::vector<int>> default_blocks(const Instance& inst);

Vector contraction_basic(const Instance& inst);
Vector contraction_block(const Instance& inst,
                         const std::vector<std::vector<int>>* blocks = nullptr);
Vector contraction_topk(const Instance& inst,
                        const std::vector<std::vector<int>>* blocks = nullptr);

// True when every subsystem contains the zero point and its coupling
// contributions are componentwise nonnegative; then rho = 0 works together
// with the zeroing repair pass.
bool detect_zero_contraction(const Instance& inst);

// Row rank by Gaussian elimination with partial pivoting; pivots below
// kRankTolFactor * max|entry| count as zero.
Index numeric_rank(const Matrix& m);

ContractedInstance contract_instance(const Instance& inst, const Vector& rho);

}  // namespace rcsolve
