#include "rcsolve/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "rcsolve/inner.hpp"

namespace rcsolve {

namespace {

constexpr double kPhase1Tol = 1e-7;

// Tableau simplex core. Rows are sign-normalized so the right-hand side is
// nonnegative, one artificial per row forms the starting basis, and Bland's
// rule (lowest eligible column in, lowest basis index out on ratio ties)
// guarantees termination under degeneracy.
struct Tableau {
  Matrix t;                  // m x (n + m + 1): columns, artificials, rhs
  std::vector<Index> basis;  // basis column per row; >= n means artificial
  Index m, n;
  int iterations = 0;

  Tableau(const Matrix& a, const Vector& rhs) : m(a.rows()), n(a.cols()) {
    t.resize(m, n + m + 1);
    for (Index r = 0; r < m; ++r) {
      const double s = rhs[r] < 0 ? -1.0 : 1.0;
      t.row(r).head(n) = s * a.row(r);
      t.row(r).segment(n, m).setZero();
      t(r, n + r) = 1.0;
      t(r, n + m) = s * rhs[r];
    }
    basis.resize(m);
    for (Index r = 0; r < m; ++r) basis[r] = n + r;
  }

  // Reduced-cost row for the given full cost vector (artificials included).
  Vector reduced(const Vector& cost) const {
    Vector z = cost;
    for (Index r = 0; r < m; ++r)
      if (cost[basis[r]] != 0.0) z -= cost[basis[r]] * t.row(r).head(n + m).transpose();
    return z;
  }

  void pivot(Index row, Index col) {
    t.row(row) /= t(row, col);
    for (Index r = 0; r < m; ++r) {
      if (r == row || t(r, col) == 0.0) continue;
      t.row(r) -= t(r, col) * t.row(row);
    }
    basis[row] = col;
    ++iterations;
  }

  // Returns false when optimal, throws on unboundedness.
  bool step(const Vector& cost, bool allow_artificial) {
    const Vector z = reduced(cost);
    const Index limit = allow_artificial ? n + m : n;
    Index enter = -1;
    for (Index j = 0; j < limit; ++j) {
      if (z[j] < -kPivotTol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) return false;
    Index leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Index r = 0; r < m; ++r) {
      if (t(r, enter) <= kPivotTol) continue;
      const double ratio = t(r, n + m) / t(r, enter);
      if (leave < 0 || ratio < best - 1e-12) {
        best = ratio;
        leave = r;
      } else if (ratio <= best + 1e-12 && basis[r] < basis[leave]) {
        leave = r;
      }
    }
    if (leave < 0) throw UnboundedError("objective unbounded below");
    pivot(leave, enter);
    return true;
  }
};

}  // namespace

SimplexResult solve_standard_form(const Matrix& a, const Vector& rhs, const Vector& c) {
  const Index m = a.rows(), n = a.cols();
  if (rhs.size() != m || c.size() != n) throw InputError("simplex dimension mismatch");
  Tableau tab(a, rhs);
  const int max_pivots = 20000 + 200 * static_cast<int>(m + n);

  // Phase 1: drive the artificial sum to zero.
  Vector c1 = Vector::Zero(n + m);
  c1.tail(m).setOnes();
  while (tab.step(c1, true)) {
    if (tab.iterations > max_pivots) throw SolverError("phase-1 pivot limit exceeded");
  }
  double infeas = 0.0;
  for (Index r = 0; r < m; ++r)
    if (tab.basis[r] >= n) infeas += tab.t(r, n + m);
  if (infeas > kPhase1Tol) throw InfeasibleError("equality system has no nonnegative solution");

  // Kick remaining artificials out of the basis where possible; rows with an
  // all-zero original part are redundant and keep their artificial at level 0.
  for (Index r = 0; r < m; ++r) {
    if (tab.basis[r] < n) continue;
    for (Index j = 0; j < n; ++j) {
      if (std::abs(tab.t(r, j)) > kPivotTol) {
        tab.pivot(r, j);
        break;
      }
    }
  }

  // Phase 2 on the real costs; artificial columns are barred from re-entry.
  Vector c2 = Vector::Zero(n + m);
  c2.head(n) = c;
  while (tab.step(c2, false)) {
    if (tab.iterations > 2 * max_pivots) throw SolverError("phase-2 pivot limit exceeded");
  }

  SimplexResult res;
  res.x = Vector::Zero(n);
  for (Index r = 0; r < m; ++r)
    if (tab.basis[r] < n) res.x[tab.basis[r]] = tab.t(r, n + m);
  res.objective = c.dot(res.x);
  res.basis = tab.basis;
  res.iterations = tab.iterations;

  // Duals from the final basis against the original (unnormalized) system:
  // B^T pi = c_B, with unit columns and zero cost for residual artificials.
  Matrix bmat = Matrix::Zero(m, m);
  Vector cb = Vector::Zero(m);
  for (Index r = 0; r < m; ++r) {
    if (tab.basis[r] < n) {
      bmat.col(r) = a.col(tab.basis[r]);
      cb[r] = c[tab.basis[r]];
    } else {
      // Residual artificial of a redundant row; in original-system terms its
      // column is the signed unit vector of that row.
      const Index orig = tab.basis[r] - n;
      bmat(orig, r) = rhs[orig] < 0 ? -1.0 : 1.0;
    }
  }
  res.duals = bmat.transpose().partialPivLu().solve(cb);
  return res;
}

bool conv_membership(const Vector& v, const std::vector<Vector>& points, double tol) {
  if (points.empty()) return false;
  const Index n = v.size();
  Matrix a(n + 1, static_cast<Index>(points.size()));
  for (size_t j = 0; j < points.size(); ++j) {
    a.col(j).head(n) = points[j];
    a(n, j) = 1.0;
  }
  Vector rhs(n + 1);
  rhs.head(n) = v;
  rhs[n] = 1.0;
  try {
    const SimplexResult r = solve_standard_form(a, rhs, Vector::Zero(a.cols()));
    // Guard against a borderline phase-1 exit: re-check the residual.
    return (a * r.x - rhs).lpNorm<Eigen::Infinity>() <= tol;
  } catch (const InfeasibleError&) {
    return false;
  }
}

std::vector<Vector> extreme_points(const std::vector<Vector>& points) {
  std::vector<Vector> out;
  if (points.size() <= 1) return points;
  std::vector<Vector> others;
  others.reserve(points.size() - 1);
  for (size_t j = 0; j < points.size(); ++j) {
    others.clear();
    for (size_t k = 0; k < points.size(); ++k)
      if (k != j) others.push_back(points[k]);
    if (!conv_membership(points[j], others)) out.push_back(points[j]);
  }
  return out;
}

ExtendedLp build_extended_lp(const Instance& inst, std::uint64_t column_cap) {
  ExtendedLp lp;
  const Index m = inst.rows();
  const Index ns = inst.size();
  lp.coupling_rows = m;
  lp.vertices.resize(ns);
  lp.col_offset.resize(ns);
  Index cols = 0;
  for (Index i = 0; i < ns; ++i) {
    lp.vertices[i] = extreme_points(enumerate_points(inst.subsystems[i], column_cap));
    if (lp.vertices[i].empty())
      throw InfeasibleError("subsystem " + std::to_string(i) + " has no feasible point");
    lp.col_offset[i] = cols;
    cols += static_cast<Index>(lp.vertices[i].size());
    if (static_cast<std::uint64_t>(cols) > column_cap)
      throw TooLargeError("vertex column count exceeds the cap");
  }
  lp.slack_offset = cols;
  lp.a = Matrix::Zero(m + ns, cols + m);
  lp.rhs.resize(m + ns);
  lp.c = Vector::Zero(cols + m);
  lp.rhs.head(m) = inst.resource;
  lp.rhs.tail(ns).setOnes();
  for (Index i = 0; i < ns; ++i) {
    for (size_t j = 0; j < lp.vertices[i].size(); ++j) {
      const Index col = lp.col_offset[i] + static_cast<Index>(j);
      lp.a.col(col).head(m) = inst.subsystems[i].coupling * lp.vertices[i][j];
      lp.a(m + i, col) = 1.0;
      lp.c[col] = inst.subsystems[i].cost.dot(lp.vertices[i][j]);
    }
  }
  lp.a.block(0, cols, m, m).setIdentity();
  return lp;
}

LpSolution simplex_solve(const ExtendedLp& lp) {
  SimplexResult raw = solve_standard_form(lp.a, lp.rhs, lp.c);
  LpSolution sol;
  const Index m = lp.coupling_rows;
  sol.p = raw.x.head(lp.slack_offset);
  sol.slack = raw.x.tail(m);
  sol.objective = raw.objective;
  sol.multipliers = (-raw.duals.head(m)).cwiseMax(0.0);
  sol.convexity_duals = raw.duals.tail(raw.duals.size() - m);
  sol.reduced_costs =
      lp.c.head(lp.slack_offset) -
      lp.a.leftCols(lp.slack_offset).transpose() * raw.duals;
  sol.basis = raw.basis;
  sol.iterations = raw.iterations;
  return sol;
}

Assignment recover_xlp(const ExtendedLp& lp, const LpSolution& sol) {
  Assignment out(lp.vertices.size());
  for (size_t i = 0; i < lp.vertices.size(); ++i) {
    Vector x = Vector::Zero(lp.vertices[i].front().size());
    for (size_t j = 0; j < lp.vertices[i].size(); ++j)
      x += sol.p[lp.col_offset[i] + static_cast<Index>(j)] * lp.vertices[i][j];
    out[i] = x;
  }
  return out;
}

Instance perturb_costs(const Instance& inst, double magnitude, std::uint64_t seed) {
  Instance out = inst;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-magnitude, magnitude);
  for (Subsystem& s : out.subsystems)
    for (Index j = 0; j < s.cost.size(); ++j) s.cost[j] += dist(rng);
  return out;
}

ComplementarityReport strict_complementarity_check(const ExtendedLp& lp, const LpSolution& sol,
                                                   double tol) {
  ComplementarityReport rep;
  for (size_t i = 0; i < lp.vertices.size(); ++i) {
    for (size_t j = 0; j < lp.vertices[i].size(); ++j) {
      const Index col = lp.col_offset[i] + static_cast<Index>(j);
      const bool weight_zero = sol.p[col] <= tol;
      const bool slack_zero = std::abs(sol.reduced_costs[col]) <= tol;
      if (weight_zero && slack_zero)
        rep.degenerate.emplace_back(static_cast<Index>(i), static_cast<Index>(j));
    }
  }
  rep.strict = rep.degenerate.empty();
  return rep;
}

}  // namespace rcsolve
