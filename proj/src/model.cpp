#include "rcsolve/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rcsolve/inner.hpp"

namespace rcsolve {

namespace {

struct DimVisitor {
  Index operator()(const LatticePolytope& p) const { return p.lower.size(); }
  Index operator()(const VertexList& v) const {
    return v.points.empty() ? 0 : v.points.front().size();
  }
  Index operator()(const PevBattery& b) const { return b.dim(); }
};

bool nearly_integral(double v) { return std::abs(v - std::round(v)) <= kIntegralityTol; }

bool nearly_binary(double v) {
  return std::abs(v) <= kIntegralityTol || std::abs(v - 1.0) <= kIntegralityTol;
}

void check_lattice_member(const LatticePolytope& p, const Vector& x, double tol,
                          std::vector<std::string>& errs, int idx) {
  for (Index j = 0; j < x.size(); ++j) {
    if (!nearly_integral(x[j])) {
      errs.push_back("subsystem " + std::to_string(idx) + ": coordinate " + std::to_string(j) +
                     " not integral");
      return;
    }
    const double r = std::round(x[j]);
    if (r < p.lower[j] - 0.5 || r > p.upper[j] + 0.5) {
      errs.push_back("subsystem " + std::to_string(idx) + ": coordinate " + std::to_string(j) +
                     " outside bounds");
      return;
    }
  }
  if (p.a.rows() > 0) {
    Vector slack = p.d - p.a * x;
    for (Index r = 0; r < slack.size(); ++r) {
      if (slack[r] < -tol) {
        errs.push_back("subsystem " + std::to_string(idx) + ": inequality row " +
                       std::to_string(r) + " violated by " + std::to_string(-slack[r]));
        return;
      }
    }
  }
}

void check_vertexlist_member(const VertexList& v, const Vector& x, double tol,
                             std::vector<std::string>& errs, int idx) {
  for (const Vector& p : v.points) {
    if ((p - x).lpNorm<Eigen::Infinity>() <= tol) return;
  }
  errs.push_back("subsystem " + std::to_string(idx) + ": point not in the declared list");
}

void check_battery_member(const PevBattery& b, const Vector& x, double tol,
                          std::vector<std::string>& errs, int idx) {
  const int n = b.steps;
  const std::string tag = "subsystem " + std::to_string(idx);
  for (Index j = 0; j < x.size(); ++j) {
    if (!nearly_binary(x[j])) {
      errs.push_back(tag + ": schedule entry " + std::to_string(j) + " not binary");
      return;
    }
  }
  double e = b.e_init_kwh;
  for (int k = 0; k < n; ++k) {
    const double u = std::round(x[k]);
    const double v = b.v2g ? std::round(x[n + k]) : 0.0;
    if (u + v > 1.0 + kIntegralityTol) {
      errs.push_back(tag + ": charge and discharge overlap at step " + std::to_string(k));
      return;
    }
    e += b.charge_step_kwh() * u - b.discharge_step_kwh() * v;
    if (e < b.e_min_kwh - tol || e > b.e_max_kwh + tol) {
      errs.push_back(tag + ": state of charge out of bounds after step " + std::to_string(k));
      return;
    }
  }
  if (e < b.e_ref_kwh - tol) {
    errs.push_back(tag + ": terminal state of charge below target");
  }
}

}  // namespace

Index Subsystem::dim() const { return std::visit(DimVisitor{}, shape); }

ValidationReport validate_instance(const Instance& inst) {
  ValidationReport rep;
  const Index m = inst.rows();
  if (inst.subsystems.empty()) rep.errors.push_back("no subsystems");
  if (m == 0) rep.errors.push_back("no coupling rows");
  for (Index i = 0; i < inst.size(); ++i) {
    const Subsystem& s = inst.subsystems[i];
    const std::string tag = "subsystem " + std::to_string(i);
    const Index n = s.dim();
    if (n == 0) rep.errors.push_back(tag + ": empty decision vector");
    if (s.cost.size() != n) rep.errors.push_back(tag + ": cost length mismatch");
    if (s.coupling.rows() != m || s.coupling.cols() != n)
      rep.errors.push_back(tag + ": coupling block shape mismatch");
    if (const auto* p = std::get_if<LatticePolytope>(&s.shape)) {
      if (p->upper.size() != p->lower.size())
        rep.errors.push_back(tag + ": bound length mismatch");
      else
        for (Index j = 0; j < p->lower.size(); ++j)
          if (p->lower[j] > p->upper[j]) {
            rep.errors.push_back(tag + ": empty bound box");
            break;
          }
      if (p->a.rows() != p->d.size() || (p->a.rows() > 0 && p->a.cols() != n))
        rep.errors.push_back(tag + ": inequality system shape mismatch");
    } else if (const auto* v = std::get_if<VertexList>(&s.shape)) {
      if (v->points.empty()) rep.errors.push_back(tag + ": empty point list");
      for (const Vector& q : v->points)
        if (q.size() != n) {
          rep.errors.push_back(tag + ": inconsistent point dimensions");
          break;
        }
      for (size_t a = 0; a + 1 < v->points.size(); ++a)
        for (size_t b2 = a + 1; b2 < v->points.size(); ++b2)
          if ((v->points[a] - v->points[b2]).lpNorm<Eigen::Infinity>() <= kIntegralityTol) {
            rep.errors.push_back(tag + ": duplicate points");
            a = v->points.size();
            break;
          }
    } else if (const auto* b = std::get_if<PevBattery>(&s.shape)) {
      if (b->steps <= 0) rep.errors.push_back(tag + ": nonpositive step count");
      if (b->dt_hours <= 0) rep.errors.push_back(tag + ": nonpositive step length");
      if (b->power_kw <= 0) rep.errors.push_back(tag + ": nonpositive power rating");
      if (b->loss < 0 || b->loss >= 1) rep.errors.push_back(tag + ": loss outside [0,1)");
      if (!(b->e_min_kwh <= b->e_init_kwh && b->e_init_kwh <= b->e_max_kwh))
        rep.errors.push_back(tag + ": initial state of charge outside limits");
      if (!(b->e_min_kwh <= b->e_ref_kwh && b->e_ref_kwh <= b->e_max_kwh))
        rep.errors.push_back(tag + ": target state of charge outside limits");
      if ((b->delta_u.size() != 0 && b->delta_u.size() != b->steps) ||
          (b->delta_v.size() != 0 && b->delta_v.size() != b->steps))
        rep.errors.push_back(tag + ": price offset length mismatch");
    }
  }
  for (auto [hi, lo] : inst.row_pairs) {
    if (hi < 0 || lo < 0 || hi >= m || lo >= m || hi == lo)
      rep.errors.push_back("row pair (" + std::to_string(hi) + "," + std::to_string(lo) +
                           ") out of range");
  }
  if (!inst.subsystems.empty() && inst.size() <= m)
    rep.warnings.push_back("subsystem count does not exceed the coupling row count; "
                           "recovery guarantees are weak in this regime");
  // Lattice sets must actually contain a point; checked last so shape errors
  // surface first.
  if (rep.errors.empty()) {
    for (Index i = 0; i < inst.size(); ++i) {
      if (std::holds_alternative<LatticePolytope>(inst.subsystems[i].shape)) {
        bool any = false;
        try {
          any = !enumerate_points(inst.subsystems[i]).empty();
        } catch (const TooLargeError&) {
          any = true;  // too big to scan; not a structural defect
        }
        if (!any)
          rep.errors.push_back("subsystem " + std::to_string(i) +
                               ": no lattice point satisfies the inequalities");
      }
    }
  }
  return rep;
}

double evaluate_objective(const Instance& inst, const Assignment& asg) {
  if (asg.size() != inst.subsystems.size())
    throw InputError("assignment length does not match subsystem count");
  double total = 0.0;
  for (Index i = 0; i < inst.size(); ++i) total += inst.subsystems[i].cost.dot(asg[i]);
  return total;
}

Vector coupling_usage(const Instance& inst, const Assignment& asg) {
  if (asg.size() != inst.subsystems.size())
    throw InputError("assignment length does not match subsystem count");
  Vector usage = Vector::Zero(inst.rows());
  for (Index i = 0; i < inst.size(); ++i) usage += inst.subsystems[i].coupling * asg[i];
  return usage;
}

bool subsystem_contains(const Subsystem& sub, const Vector& x, double tol, std::string* why) {
  if (x.size() != sub.dim()) {
    if (why) *why = "dimension mismatch";
    return false;
  }
  std::vector<std::string> errs;
  if (const auto* p = std::get_if<LatticePolytope>(&sub.shape))
    check_lattice_member(*p, x, tol, errs, 0);
  else if (const auto* v = std::get_if<VertexList>(&sub.shape))
    check_vertexlist_member(*v, x, tol, errs, 0);
  else
    check_battery_member(std::get<PevBattery>(sub.shape), x, tol, errs, 0);
  if (!errs.empty() && why) *why = errs.front();
  return errs.empty();
}

FeasibilityReport check_feasibility(const Instance& inst, const Assignment& asg, double tol) {
  FeasibilityReport rep;
  for (Index i = 0; i < inst.size(); ++i) {
    const Subsystem& s = inst.subsystems[i];
    if (asg[i].size() != s.dim()) {
      rep.membership_errors.push_back("subsystem " + std::to_string(i) + ": dimension mismatch");
      continue;
    }
    if (const auto* p = std::get_if<LatticePolytope>(&s.shape))
      check_lattice_member(*p, asg[i], tol, rep.membership_errors, static_cast<int>(i));
    else if (const auto* v = std::get_if<VertexList>(&s.shape))
      check_vertexlist_member(*v, asg[i], tol, rep.membership_errors, static_cast<int>(i));
    else
      check_battery_member(std::get<PevBattery>(s.shape), asg[i], tol, rep.membership_errors,
                           static_cast<int>(i));
  }
  rep.slack = inst.resource - coupling_usage(inst, asg);
  rep.max_violation = std::max(0.0, -rep.slack.minCoeff());
  rep.coupling_ok = rep.max_violation <= tol;
  rep.feasible = rep.coupling_ok && rep.membership_errors.empty();
  return rep;
}

BruteForceResult brute_force_solve(const Instance& inst, std::uint64_t cap) {
  const Index n = inst.size();
  std::vector<std::vector<Vector>> points(n);
  std::uint64_t product = 1;
  for (Index i = 0; i < n; ++i) {
    points[i] = enumerate_points(inst.subsystems[i], cap);
    if (points[i].empty())
      throw InfeasibleError("subsystem " + std::to_string(i) + " has no feasible point");
    if (product > cap / points[i].size())
      throw TooLargeError("cross product exceeds the search cap");
    product *= points[i].size();
  }

  // Safe pruning bounds: from subsystem i on, usage can decrease at most to
  // the sum of per-row minima and the objective at most to the summed minima.
  const Index m = inst.rows();
  std::vector<Vector> usage_floor(n + 1, Vector::Zero(m));
  std::vector<double> cost_floor(n + 1, 0.0);
  for (Index i = n - 1; i >= 0; --i) {
    Vector row_min = Vector::Constant(m, std::numeric_limits<double>::infinity());
    double c_min = std::numeric_limits<double>::infinity();
    for (const Vector& p : points[i]) {
      row_min = row_min.cwiseMin(inst.subsystems[i].coupling * p);
      c_min = std::min(c_min, inst.subsystems[i].cost.dot(p));
    }
    usage_floor[i] = usage_floor[i + 1] + row_min;
    cost_floor[i] = cost_floor[i + 1] + c_min;
  }

  BruteForceResult best;
  best.combinations = product;
  best.objective = std::numeric_limits<double>::infinity();
  Assignment current(n);
  Vector usage = Vector::Zero(m);

  auto dfs = [&](auto&& self, Index i, double cost) -> void {
    if (((usage + usage_floor[i]).array() > inst.resource.array() + kFeasibilityTol).any())
      return;
    if (cost + cost_floor[i] >= best.objective) return;
    if (i == n) {
      best.objective = cost;
      best.minimizer = current;
      return;
    }
    for (const Vector& p : points[i]) {
      current[i] = p;
      usage += inst.subsystems[i].coupling * p;
      self(self, i + 1, cost + inst.subsystems[i].cost.dot(p));
      usage -= inst.subsystems[i].coupling * p;
    }
  };
  dfs(dfs, 0, 0.0);

  if (!std::isfinite(best.objective))
    throw InfeasibleError("no combination satisfies the coupling constraints");
  return best;
}

}  // namespace rcsolve
