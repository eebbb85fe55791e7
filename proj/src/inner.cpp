#include "rcsolve/inner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace rcsolve {

namespace {

// Lexicographic order with a small equality band, so exact integer data and
// fp copies of it compare identically.
bool lex_less(const Vector& a, const Vector& b) {
  for (Index j = 0; j < a.size(); ++j) {
    if (std::abs(a[j] - b[j]) <= kIntegralityTol) continue;
    return a[j] < b[j];
  }
  return false;
}

std::vector<Vector> enumerate_lattice(const LatticePolytope& p, std::uint64_t cap) {
  const Index n = p.lower.size();
  std::uint64_t box = 1;
  for (Index j = 0; j < n; ++j) {
    const std::uint64_t w = static_cast<std::uint64_t>(p.upper[j] - p.lower[j]) + 1;
    if (box > cap / w) throw TooLargeError("lattice box exceeds the enumeration cap");
    box *= w;
  }
  std::vector<Vector> out;
  IntVector x = p.lower;
  Vector xd(n);
  while (true) {
    for (Index j = 0; j < n; ++j) xd[j] = x[j];
    bool ok = true;
    if (p.a.rows() > 0) {
      Vector slack = p.d - p.a * xd;
      ok = (slack.array() >= -kIntegralityTol).all();
    }
    if (ok) out.push_back(xd);
    // odometer, last coordinate fastest -> lexicographic output order
    Index j = n - 1;
    while (j >= 0 && x[j] == p.upper[j]) {
      x[j] = p.lower[j];
      --j;
    }
    if (j < 0) break;
    ++x[j];
  }
  return out;
}

std::vector<Vector> enumerate_schedules(const PevBattery& b, std::uint64_t cap) {
  const int n = b.steps;
  const double actions = b.v2g ? 3.0 : 2.0;
  if (std::pow(actions, n) > static_cast<double>(cap))
    throw TooLargeError("schedule set can exceed the enumeration cap");
  std::vector<Vector> out;
  Vector sched = Vector::Zero(b.dim());
  // Depth-first over steps; per step try idle, charge, discharge.
  auto dfs = [&](auto&& self, int k, double e) -> void {
    if (k == n) {
      if (e >= b.e_ref_kwh - kSocTol) out.push_back(sched);
      return;
    }
    self(self, k + 1, e);
    const double ec = e + b.charge_step_kwh();
    if (ec <= b.e_max_kwh + kSocTol && ec >= b.e_min_kwh - kSocTol) {
      sched[k] = 1.0;
      self(self, k + 1, ec);
      sched[k] = 0.0;
    }
    if (b.v2g) {
      const double ed = e - b.discharge_step_kwh();
      if (ed >= b.e_min_kwh - kSocTol && ed <= b.e_max_kwh + kSocTol) {
        sched[n + k] = 1.0;
        self(self, k + 1, ed);
        sched[n + k] = 0.0;
      }
    }
  };
  dfs(dfs, 0, b.e_init_kwh);
  return out;
}

InnerSolution pick_min(const std::vector<Vector>& points, const Vector& price,
                       const std::string& what) {
  if (points.empty()) throw InfeasibleError(what + ": empty feasible set");
  double best = std::numeric_limits<double>::infinity();
  for (const Vector& p : points) best = std::min(best, price.dot(p));
  const double tol = kTieTol * std::max(1.0, std::abs(best));
  const Vector* sel = nullptr;
  for (const Vector& p : points) {
    if (price.dot(p) > best + tol) continue;
    if (sel == nullptr || lex_less(p, *sel)) sel = &p;
  }
  InnerSolution sol;
  sol.point = *sel;
  sol.value = price.dot(*sel);
  // The lexicographically smallest minimizer is an extreme point of the hull.
  sol.vertex_certified = true;
  return sol;
}

}  // namespace

AdjustedPrice adjusted_price(const Subsystem& sub, const Vector& multipliers) {
  return sub.cost + sub.coupling.transpose() * multipliers;
}

std::vector<Vector> enumerate_points(const Subsystem& sub, std::uint64_t cap) {
  if (const auto* p = std::get_if<LatticePolytope>(&sub.shape)) return enumerate_lattice(*p, cap);
  if (const auto* v = std::get_if<VertexList>(&sub.shape)) {
    if (v->points.empty()) throw InputError("empty point list");
    return v->points;
  }
  return enumerate_schedules(std::get<PevBattery>(sub.shape), cap);
}

std::pair<int, int> charge_slot_bounds(const PevBattery& bat) {
  const double step = bat.charge_step_kwh();
  if (step <= 0) throw InputError("nonpositive charge step");
  int k_min = -1;
  for (int k = 0; k <= bat.steps; ++k) {
    if (bat.e_init_kwh + k * step >= bat.e_ref_kwh - kSocTol) {
      k_min = k;
      break;
    }
  }
  if (k_min < 0) throw InfeasibleError("terminal charge target unreachable");
  int k_max = k_min - 1;
  for (int k = bat.steps; k >= 0; --k) {
    if (bat.e_init_kwh + k * step <= bat.e_max_kwh + kSocTol) {
      k_max = k;
      break;
    }
  }
  if (k_max < k_min)
    throw InfeasibleError("charge granularity cannot land between target and capacity");
  return {k_min, k_max};
}

InnerSolution greedy_charge_solve(const PevBattery& bat, const Vector& charge_price) {
  if (charge_price.size() != bat.steps) throw InputError("charge price length mismatch");
  auto [k_min, k_max] = charge_slot_bounds(bat);
  std::vector<int> order(bat.steps);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return charge_price[a] < charge_price[b]; });
  InnerSolution sol;
  sol.point = Vector::Zero(bat.steps);
  int chosen = 0;
  for (int idx : order) {
    const bool mandatory = chosen < k_min;
    if (!mandatory && (charge_price[idx] >= 0.0 || chosen >= k_max)) break;
    sol.point[idx] = 1.0;
    ++chosen;
  }
  sol.value = charge_price.dot(sol.point);
  sol.vertex_certified = true;  // 0/1 points are extreme in any subset of the cube
  return sol;
}

InnerSolution dp_v2g_solve(const PevBattery& bat, const Vector& charge_price,
                           const Vector& discharge_price) {
  const int n = bat.steps;
  if (charge_price.size() != n || discharge_price.size() != n)
    throw InputError("price length mismatch");
  const double su = bat.charge_step_kwh();
  const double sv = bat.discharge_step_kwh();
  const int w = n + 1;
  const double inf = std::numeric_limits<double>::infinity();
  // value[k][a*w+b]: cheapest cost of the first k steps with a charges and
  // b discharges; the pair determines the state of charge exactly.
  std::vector<std::vector<double>> value(n + 1, std::vector<double>(w * w, inf));
  std::vector<std::vector<signed char>> action(n + 1, std::vector<signed char>(w * w, -1));
  value[0][0] = 0.0;

  auto soc = [&](int a, int b) { return bat.e_init_kwh + a * su - b * sv; };
  auto in_bounds = [&](double e) {
    return e >= bat.e_min_kwh - kSocTol && e <= bat.e_max_kwh + kSocTol;
  };

  for (int k = 0; k < n; ++k) {
    // Action priority on ties: idle, then charge, then discharge.
    for (int act = 0; act < (bat.v2g ? 3 : 2); ++act) {
      const int da = act == 1 ? 1 : 0;
      const int db = act == 2 ? 1 : 0;
      const double cost = act == 0 ? 0.0 : (act == 1 ? charge_price[k] : -discharge_price[k]);
      for (int a = 0; a + da <= k + 1 && a <= k; ++a) {
        for (int b = 0; a + b <= k && b + db <= k + 1; ++b) {
          const double v = value[k][a * w + b];
          if (v == inf) continue;
          if (act != 0 && !in_bounds(soc(a + da, b + db))) continue;
          double& tgt = value[k + 1][(a + da) * w + (b + db)];
          if (v + cost < tgt) {
            tgt = v + cost;
            action[k + 1][(a + da) * w + (b + db)] = static_cast<signed char>(act);
          }
        }
      }
    }
  }

  int best_a = -1, best_b = -1;
  double best = inf;
  for (int a = 0; a <= n; ++a) {
    for (int b = 0; a + b <= n; ++b) {
      if (value[n][a * w + b] == inf) continue;
      if (soc(a, b) < bat.e_ref_kwh - kSocTol) continue;
      if (value[n][a * w + b] < best) {
        best = value[n][a * w + b];
        best_a = a;
        best_b = b;
      }
    }
  }
  if (best_a < 0) throw InfeasibleError("no schedule reaches the terminal charge target");

  InnerSolution sol;
  sol.point = Vector::Zero(bat.dim());
  int a = best_a, b = best_b;
  for (int k = n; k > 0; --k) {
    const int act = action[k][a * w + b];
    if (act == 1) {
      sol.point[k - 1] = 1.0;
      --a;
    } else if (act == 2) {
      sol.point[n + k - 1] = 1.0;
      --b;
    }
  }
  Vector u = sol.point.head(n);
  sol.value = charge_price.dot(u);
  if (bat.v2g) sol.value -= discharge_price.dot(sol.point.tail(n));
  sol.vertex_certified = true;
  return sol;
}

InnerSolution inner_solve(const Subsystem& sub, const Vector& price) {
  if (price.size() != sub.dim()) throw InputError("price length mismatch");
  if (const auto* b = std::get_if<PevBattery>(&sub.shape)) {
    if (!b->v2g) return greedy_charge_solve(*b, price);
    return dp_v2g_solve(*b, price.head(b->steps), -price.tail(b->steps));
  }
  return pick_min(enumerate_points(sub), price, "inner solve");
}

std::vector<Vector> inner_minimizer_set(const Subsystem& sub, const Vector& price, double tol) {
  const std::vector<Vector> points = enumerate_points(sub);
  if (points.empty()) throw InfeasibleError("empty feasible set");
  double best = std::numeric_limits<double>::infinity();
  for (const Vector& p : points) best = std::min(best, price.dot(p));
  std::vector<Vector> out;
  for (const Vector& p : points)
    if (price.dot(p) <= best + tol * std::max(1.0, std::abs(best))) out.push_back(p);
  return out;
}

std::pair<double, double> linear_range(const Subsystem& sub, const Vector& h) {
  const double lo = inner_solve(sub, h).value;
  const double hi = -inner_solve(sub, -h).value;
  return {lo, hi};
}

}  // namespace rcsolve
