#include "rcsolve/contraction.hpp"

#include <algorithm>
#include <cmath>

#include "rcsolve/inner.hpp"

namespace rcsolve {

namespace {

// ranges(i, k) = max H_i^k x - min H_i^k x over X_i, exact via inner solves.
Matrix row_ranges(const Instance& inst) {
  const Index m = inst.rows();
  Matrix r(inst.size(), m);
  for (Index i = 0; i < inst.size(); ++i) {
    const Subsystem& s = inst.subsystems[i];
    for (Index k = 0; k < m; ++k) {
      if (s.coupling.row(k).cwiseAbs().maxCoeff() == 0.0) {
        r(i, k) = 0.0;
        continue;
      }
      auto [lo, hi] = linear_range(s, s.coupling.row(k).transpose());
      r(i, k) = hi - lo;
    }
  }
  return r;
}

Matrix assemble_coupling(const Instance& inst) {
  Index cols = 0;
  for (const Subsystem& s : inst.subsystems) cols += s.dim();
  Matrix h(inst.rows(), cols);
  Index at = 0;
  for (const Subsystem& s : inst.subsystems) {
    h.middleCols(at, s.dim()) = s.coupling;
    at += s.dim();
  }
  return h;
}

Matrix block_columns(const Instance& inst, const std::vector<int>& block) {
  Index cols = 0;
  for (int i : block) cols += inst.subsystems[i].dim();
  Matrix h(inst.rows(), cols);
  Index at = 0;
  for (int i : block) {
    h.middleCols(at, inst.subsystems[i].dim()) = inst.subsystems[i].coupling;
    at += inst.subsystems[i].dim();
  }
  return h;
}

void check_blocks(const Instance& inst, const std::vector<std::vector<int>>& blocks) {
  if (static_cast<Index>(blocks.size()) != inst.rows())
    throw InputError("one block per coupling row required");
  for (Index k = 0; k < inst.rows(); ++k) {
    for (Index i = 0; i < inst.size(); ++i) {
      if (inst.subsystems[i].coupling.row(k).cwiseAbs().maxCoeff() == 0.0) continue;
      if (std::find(blocks[k].begin(), blocks[k].end(), static_cast<int>(i)) == blocks[k].end())
        throw InputError("block for row " + std::to_string(k) +
                         " misses a subsystem with a nonzero column");
    }
  }
}

}  // namespace

std::vector<std::vector<int>> default_blocks(const Instance& inst) {
  std::vector<std::vector<int>> blocks(inst.rows());
  for (Index k = 0; k < inst.rows(); ++k)
    for (Index i = 0; i < inst.size(); ++i)
      if (inst.subsystems[i].coupling.row(k).cwiseAbs().maxCoeff() != 0.0)
        blocks[k].push_back(static_cast<int>(i));
  return blocks;
}

Index numeric_rank(const Matrix& m) {
  if (m.size() == 0) return 0;
  Matrix a = m;
  const double scale = a.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0;
  const double tol = kRankTolFactor * scale;
  const Index rows = a.rows(), cols = a.cols();
  Index rank = 0;
  Index row = 0;
  for (Index col = 0; col < cols && row < rows; ++col) {
    Index piv = row;
    for (Index r = row + 1; r < rows; ++r)
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    if (std::abs(a(piv, col)) <= tol) continue;
    a.row(piv).swap(a.row(row));
    for (Index r = row + 1; r < rows; ++r) {
      const double f = a(r, col) / a(row, col);
      a.row(r).tail(cols - col) -= f * a.row(row).tail(cols - col);
    }
    ++rank;
    ++row;
  }
  return rank;
}

Vector contraction_basic(const Instance& inst) {
  const Matrix r = row_ranges(inst);
  const double factor = static_cast<double>(numeric_rank(assemble_coupling(inst)));
  Vector rho(inst.rows());
  for (Index k = 0; k < inst.rows(); ++k)
    rho[k] = factor * (inst.size() > 0 ? r.col(k).maxCoeff() : 0.0);
  return rho;
}

Vector contraction_block(const Instance& inst, const std::vector<std::vector<int>>* blocks) {
  const std::vector<std::vector<int>> own = blocks ? *blocks : default_blocks(inst);
  if (blocks) check_blocks(inst, own);
  const Matrix r = row_ranges(inst);
  Vector rho = Vector::Zero(inst.rows());
  for (Index k = 0; k < inst.rows(); ++k) {
    if (own[k].empty()) continue;
    const double factor = static_cast<double>(numeric_rank(block_columns(inst, own[k])));
    double mx = 0.0;
    for (int i : own[k]) mx = std::max(mx, r(i, k));
    rho[k] = factor * mx;
  }
  return rho;
}

Vector contraction_topk(const Instance& inst, const std::vector<std::vector<int>>* blocks) {
  const std::vector<std::vector<int>> own = blocks ? *blocks : default_blocks(inst);
  if (blocks) check_blocks(inst, own);
  const Matrix r = row_ranges(inst);
  Vector rho = Vector::Zero(inst.rows());
  for (Index k = 0; k < inst.rows(); ++k) {
    if (own[k].empty()) continue;
    const Index rank = numeric_rank(block_columns(inst, own[k]));
    const size_t take = std::min<size_t>(static_cast<size_t>(rank), own[k].size());
    std::vector<double> vals;
    vals.reserve(own[k].size());
    for (int i : own[k]) vals.push_back(r(i, k));
    std::sort(vals.begin(), vals.end(), std::greater<>());
    double s = 0.0;
    for (size_t t = 0; t < take; ++t) s += vals[t];
    rho[k] = s;
  }
  return rho;
}

bool detect_zero_contraction(const Instance& inst) {
  for (const Subsystem& s : inst.subsystems) {
    if (!subsystem_contains(s, Vector::Zero(s.dim()), kFeasibilityTol)) return false;
    for (Index k = 0; k < inst.rows(); ++k) {
      if (s.coupling.row(k).cwiseAbs().maxCoeff() == 0.0) continue;
      auto [lo, hi] = linear_range(s, s.coupling.row(k).transpose());
      (void)hi;
      if (lo < -kTieTol) return false;
    }
  }
  return true;
}

ContractedInstance contract_instance(const Instance& inst, const Vector& rho) {
  if (rho.size() != inst.rows()) throw InputError("contraction length mismatch");
  if ((rho.array() < 0).any()) throw InputError("negative contraction entry");
  ContractedInstance out{inst, rho, std::nullopt};
  out.instance.resource = inst.resource - rho;
  // Quick probe: even if each subsystem minimized every row independently,
  // row k cannot drop below the summed minima. Exceeding the shrunk resource
  // there proves the contracted coupling infeasible.
  for (Index k = 0; k < inst.rows(); ++k) {
    double floor_k = 0.0;
    for (const Subsystem& s : inst.subsystems) {
      if (s.coupling.row(k).cwiseAbs().maxCoeff() == 0.0) continue;
      floor_k += linear_range(s, s.coupling.row(k).transpose()).first;
    }
    if (floor_k > out.instance.resource[k] + kFeasibilityTol) {
      out.warning = "contracted resource unreachable on row " + std::to_string(k);
      break;
    }
  }
  return out;
}

}  // namespace rcsolve
