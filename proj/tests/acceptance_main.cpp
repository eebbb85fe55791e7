// End-to-end acceptance checks. Each check prints exactly one line:
//   [PASS|FAIL] <k>/9 <name>: <key numbers> (<wall>s)
// and the process exits with the number of failed checks.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "rcsolve/contraction.hpp"
#include "rcsolve/dual.hpp"
#include "rcsolve/inner.hpp"
#include "rcsolve/io.hpp"
#include "rcsolve/lp.hpp"
#include "rcsolve/pev.hpp"
#include "rcsolve/recover.hpp"
#include "support/fixtures.hpp"
#include "support/random_instances.hpp"

using namespace rcsolve;
using namespace rcsolve::testing;

namespace {

// Pinned tolerances and limits.
constexpr double kLamSubTol = 1e-2;        // subgradient multiplier accuracy
constexpr double kLamLpTol = 1e-8;         // simplex multiplier accuracy
constexpr double kDualValueTol = 1e-6;     // dual optimum accuracy
constexpr double kPrimalExactTol = 1e-12;  // integer optimum is exact
constexpr double kCoincideTol = 1e-7;      // vertex agreement tolerance
constexpr double kBoundSlack = 1e-9;       // slack on certified inequalities
constexpr double kMatchTol = 1e-6;         // relaxation vs scalar dual search
constexpr double kOracleTol = 1e-9;        // scheduling oracle agreement
constexpr double kGapAvg200 = 4.5;         // % mean gap, 200-vehicle fleets
constexpr double kGapAvg1000 = 1.0;        // % mean gap, 1000-vehicle fleets
constexpr double kGapV2g = 15.0;           // % per-fleet gap, two-sided fleets
constexpr double kWallExample = 1.0;       // s
constexpr double kWallSuite = 30.0;        // s, 100-instance agreement suite
constexpr double kWall200 = 10.0;          // s per 200-vehicle solve
constexpr double kWall1000 = 60.0;         // s per 1000-vehicle solve
constexpr double kWallV2gTotal = 600.0;    // s for all two-sided solves
constexpr int kTrendInversionsAllowed = 1;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int g_index = 0;
int g_failures = 0;

void run_check(const char* name, const std::function<bool(std::string&)>& body) {
  ++g_index;
  std::string detail;
  bool ok = false;
  const auto t0 = Clock::now();
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  if (!ok) ++g_failures;
  std::printf("[%s] %d/9 %s: %s (%.1fs)\n", ok ? "PASS" : "FAIL", g_index, name, detail.c_str(),
              seconds_since(t0));
  std::fflush(stdout);
}

Assignment inner_at(const Instance& inst, const Vector& lam) {
  Assignment a;
  for (const auto& sub : inst.subsystems)
    a.push_back(inner_solve(sub, adjusted_price(sub, lam)).point);
  return a;
}

bool same_point(const Vector& a, const Vector& b) {
  return a.size() == b.size() && (a - b).cwiseAbs().maxCoeff() <= kCoincideTol;
}

// Maximum of a one-row dual by bracketing plus ternary search; independent
// of the simplex code path.
double scalar_dual_max(const Instance& inst) {
  auto d = [&](double lam) { return dual_value(inst, Vector::Constant(1, lam)).value; };
  double hi = 1.0;
  while (dual_value(inst, Vector::Constant(1, hi)).subgradient[0] > 0 && hi < 1e6) hi *= 2.0;
  double lo = 0.0;
  for (int it = 0; it < 300; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (d(m1) < d(m2))
      lo = m1;
    else
      hi = m2;
  }
  return std::max(d(lo), d(hi));
}

FleetParams fleet_params(int n, std::uint64_t seed, bool v2g) {
  FleetParams p;
  p.n_pevs = n;
  p.seed = seed;
  p.v2g = v2g;
  return p;
}

char buf[512];

}  // namespace

int main() {
  // 1. Reference instance: every layer reproduces the hand-worked numbers.
  run_check("reference instance golden numbers", [](std::string& detail) {
    const auto t0 = Clock::now();
    const Instance inst = load_instance(std::string(RCSOLVE_DATA_DIR) + "/example1.json");

    const DualResult sub = subgradient_solve(inst, {});
    const bool lam_sub_ok = std::abs(sub.best_multipliers[0] - 0.4) <= kLamSubTol;

    const ExtendedLp lp = build_extended_lp(inst);
    const LpSolution sol = simplex_solve(lp);
    const bool lam_lp_ok = std::abs(sol.multipliers[0] - 0.4) <= kLamLpTol;
    const bool dual_ok = std::abs(sol.objective - (-7.64)) <= kDualValueTol;

    const BruteForceResult exact = brute_force_solve(inst);
    const bool primal_ok = std::abs(exact.objective - (-7.0)) <= kPrimalExactTol;

    // Inner minimizer sets at the optimal multipliers; the middle point of
    // the tied second subsystem is not a hull vertex and must drop out.
    const Vector lam = Vector::Constant(1, 0.4);
    bool sets_ok = true;
    const std::vector<std::vector<Vector>> expect = {
        {vec2(0, 0)}, {vec2(0, 0), vec2(2, 0)}, {vec2(0, 1)}, {vec2(1, 0)}};
    for (int i = 0; i < 4; ++i) {
      auto tied = inner_minimizer_set(inst.subsystems[i], adjusted_price(inst.subsystems[i], lam));
      tied = extreme_points(tied);
      sets_ok = sets_ok && tied.size() == expect[i].size();
      if (!sets_ok) break;
      for (std::size_t j = 0; j < tied.size(); ++j)
        sets_ok = sets_ok && same_point(tied[j], expect[i][j]);
    }

    const int coincide = count_coincident(recover_xlp(lp, sol), inner_at(inst, sol.multipliers),
                                          kCoincideTol);
    const bool coincide_ok = coincide >= static_cast<int>(inst.size() - inst.rows());
    const bool wall_ok = seconds_since(t0) <= kWallExample;

    std::snprintf(buf, sizeof buf,
                  "lam_sub=%.4f lam_lp=%.10f dual=%.8f primal=%g sets=%s coincide=%d/4",
                  sub.best_multipliers[0], sol.multipliers[0], sol.objective, exact.objective,
                  sets_ok ? "ok" : "BAD", coincide);
    detail = buf;
    return lam_sub_ok && lam_lp_ok && dual_ok && primal_ok && sets_ok && coincide_ok && wall_ok;
  });

  // 2. Fully symmetric twin: degeneracy is detected and a tiny perturbation
  //    restores vertex agreement.
  run_check("degenerate twin detection and repair", [](std::string& detail) {
    const Instance tie = symmetric_tie_instance();
    const ExtendedLp lp = build_extended_lp(tie);
    const LpSolution sol = simplex_solve(lp);
    const bool lam_ok = std::abs(sol.multipliers[0] - 1.0) <= kLamLpTol;

    const ComplementarityReport comp = strict_complementarity_check(lp, sol);
    const bool degen_ok = !comp.strict && !comp.degenerate.empty();

    const Instance nudged = perturb_costs(tie, 1e-6, 7);
    const ExtendedLp lp2 = build_extended_lp(nudged);
    const LpSolution sol2 = simplex_solve(lp2);
    const int coincide =
        count_coincident(recover_xlp(lp2, sol2), inner_at(nudged, sol2.multipliers), kCoincideTol);
    const bool coincide_ok = coincide >= static_cast<int>(tie.size() - tie.rows());

    std::snprintf(buf, sizeof buf, "lam_lp=%.10f degenerate_cols=%d coincide=%d/4",
                  sol.multipliers[0], static_cast<int>(comp.degenerate.size()), coincide);
    detail = buf;
    return lam_ok && degen_ok && coincide_ok;
  });

  // 3. Vertex agreement across 100 seeded instances with perturbed costs:
  //    the relaxation and the priced inner problems may disagree on at most
  //    as many subsystems as there are coupling rows.
  run_check("vertex agreement suite", [](std::string& detail) {
    const auto t0 = Clock::now();
    int pass = 0;
    const int total = 100;
    for (int s = 0; s < total; ++s) {
      const Instance inst = perturb_costs(random_vertex_instance(2000 + s), 1e-6, 2000 + s);
      const ExtendedLp lp = build_extended_lp(inst);
      const LpSolution sol = simplex_solve(lp);
      const int agree =
          count_coincident(recover_xlp(lp, sol), inner_at(inst, sol.multipliers), kCoincideTol);
      if (agree >= static_cast<int>(inst.size() - inst.rows())) ++pass;
    }
    const double wall = seconds_since(t0);
    std::snprintf(buf, sizeof buf, "%d/%d within rows of agreement, wall=%.1fs", pass, total,
                  wall);
    detail = buf;
    return pass == total && wall <= kWallSuite;
  });

  // 4. Recovery after contraction: at the exact contracted dual optimum the
  //    re-solved inner selection is feasible for the original coupling.
  run_check("contracted recovery suite", [](std::string& detail) {
    int feasible = 0, skipped = 0;
    const int total = 100;
    for (int s = 0; s < total; ++s) {
      const Instance inst = random_vertex_instance(2100 + s);
      const ContractedInstance c = contract_instance(inst, contraction_basic(inst));
      LpSolution sol;
      try {
        sol = simplex_solve(build_extended_lp(c.instance));
      } catch (const InfeasibleError&) {
        ++skipped;  // contraction exhausted the resource on this seed
        continue;
      }
      if (recover_primal(inst, sol.multipliers).feasible) ++feasible;
    }
    std::snprintf(buf, sizeof buf, "%d/%d recovered feasible, %d skipped as over-contracted",
                  feasible, total - skipped, skipped);
    detail = buf;
    return feasible == total - skipped;
  });

  // 5. Certified inequalities: the duality gap stays within rows * max cost
  //    spread, and recovered objectives stay within the interior-margin
  //    performance bound.
  run_check("duality gap and performance bounds", [](std::string& detail) {
    int gap_ok = 0;
    const int total = 100;
    for (int s = 0; s < total; ++s) {
      const Instance inst = random_vertex_instance(2200 + s, Profile::Monotone);
      const double dual = simplex_solve(build_extended_lp(inst)).objective;
      const double primal = brute_force_solve(inst).objective;
      const BoundReport rep = bounds(inst, Vector::Zero(inst.rows()), 0.0);
      if (primal - dual <= rep.duality_gap_bound + kBoundSlack) ++gap_ok;
    }

    int perf_ok = 0;
    for (int s = 0; s < total; ++s) {
      Instance inst = random_vertex_instance(2300 + s, Profile::Monotone);
      const Vector rho = contraction_basic(inst);
      inst.resource += rho;  // keep the declared zero point strictly interior

      const ContractedInstance c = contract_instance(inst, rho);
      Assignment zeros;
      for (const auto& sub : inst.subsystems) zeros.push_back(Vector::Zero(sub.dim()));
      const double zeta = slater_margin(c.instance, zeros);
      const LpSolution sol = simplex_solve(build_extended_lp(c.instance));
      const RecoveredSolution rec = recover_primal(inst, sol.multipliers);
      const double optimum = brute_force_solve(inst).objective;
      const BoundReport rep = bounds(inst, rho, zeta);
      if (zeta > 0 && rec.feasible &&
          rec.objective - optimum <= rep.performance_bound + kBoundSlack)
        ++perf_ok;
    }
    std::snprintf(buf, sizeof buf, "gap bound %d/%d, performance bound %d/%d", gap_ok, total,
                  perf_ok, total);
    detail = buf;
    return gap_ok == total && perf_ok == total;
  });

  // 6. The convexified master program equals the maximized dual function,
  //    checked against an independent scalar search on one-row instances.
  run_check("relaxation equals maximized dual", [](std::string& detail) {
    int pass = 0, found = 0;
    double worst = 0.0;
    for (int s = 2400; found < 50; ++s) {
      const Instance inst = random_vertex_instance(s);
      if (inst.rows() != 1) continue;
      ++found;
      const double lp = simplex_solve(build_extended_lp(inst)).objective;
      const double grid = scalar_dual_max(inst);
      worst = std::max(worst, std::abs(lp - grid));
      if (std::abs(lp - grid) <= kMatchTol) ++pass;
    }
    std::snprintf(buf, sizeof buf, "%d/50 matched, worst |diff|=%.2e", pass, worst);
    detail = buf;
    return pass == 50;
  });

  // 7. Fleet benchmarks: one-sided fleets close the gap quickly; two-sided
  //    fleets stay feasible with a certified gap.
  run_check("fleet benchmark gaps and deadlines", [](std::string& detail) {
    double sum200 = 0, sum1000 = 0, worst_wall200 = 0, worst_wall1000 = 0;
    bool feasible = true;
    for (int seed = 1; seed <= 10; ++seed) {
      for (int size : {200, 1000}) {
        const Fleet fleet = generate_fleet(fleet_params(size, seed, false));
        const auto t0 = Clock::now();
        const PipelineResult res = solve_pipeline(fleet.instance, {});
        const double wall = seconds_since(t0);
        feasible = feasible && res.solution.feasible &&
                   check_feasibility(fleet.instance, res.solution.assignment).feasible;
        if (size == 200) {
          sum200 += res.gap_percent;
          worst_wall200 = std::max(worst_wall200, wall);
        } else {
          sum1000 += res.gap_percent;
          worst_wall1000 = std::max(worst_wall1000, wall);
        }
      }
    }
    const double avg200 = sum200 / 10, avg1000 = sum1000 / 10;

    double worst_v2g = 0.0;
    const auto tv = Clock::now();
    for (int seed = 1; seed <= 3; ++seed) {
      const Fleet fleet = generate_fleet(fleet_params(200, seed, true));
      PipelineOptions popt;
      popt.dual.step.kind = StepRule::Kind::Constant;
      popt.dual.stop.max_iters = 2000;
      const PipelineResult res = solve_pipeline(fleet.instance, popt);
      feasible = feasible && res.solution.feasible &&
                 check_feasibility(fleet.instance, res.solution.assignment).feasible;
      worst_v2g = std::max(worst_v2g, res.gap_percent);
    }
    const double wall_v2g = seconds_since(tv);

    std::snprintf(buf, sizeof buf,
                  "avg gap %.3f%%@200 %.3f%%@1000, walls %.1fs/%.1fs, "
                  "two-sided worst %.2f%% in %.0fs, feasible=%s",
                  avg200, avg1000, worst_wall200, worst_wall1000, worst_v2g, wall_v2g,
                  feasible ? "all" : "NOT ALL");
    detail = buf;
    return feasible && avg200 <= kGapAvg200 && avg1000 <= kGapAvg1000 &&
           worst_wall200 <= kWall200 && worst_wall1000 <= kWall1000 && worst_v2g <= kGapV2g &&
           wall_v2g <= kWallV2gTotal;
  });

  // 8. The mean relative gap shrinks as fleets grow (at most one inversion).
  run_check("vanishing gap trend", [](std::string& detail) {
    const std::vector<int> sizes = {50, 100, 200, 400};
    std::vector<double> mean(sizes.size(), 0.0);
    bool feasible = true;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      for (int seed = 1; seed <= 5; ++seed) {
        const Fleet fleet = generate_fleet(fleet_params(sizes[k], seed, false));
        const PipelineResult res = solve_pipeline(fleet.instance, {});
        feasible = feasible && res.solution.feasible;
        mean[k] += res.gap_percent / 5.0;
      }
    }
    int inversions = 0;
    for (std::size_t k = 0; k + 1 < sizes.size(); ++k)
      if (!(mean[k + 1] < mean[k])) ++inversions;
    std::snprintf(buf, sizeof buf, "means %.3f%% %.3f%% %.3f%% %.3f%%, inversions=%d", mean[0],
                  mean[1], mean[2], mean[3], inversions);
    detail = buf;
    return feasible && inversions <= kTrendInversionsAllowed;
  });

  // 9. Scheduling oracles agree with each other and with brute force.
  run_check("oracle equivalences", [](std::string& detail) {
    // Greedy one-sided scheduler against the dynamic program.
    int greedy_ok = 0;
    for (int s = 0; s < 200; ++s) {
      const PevBattery bat = random_battery(2500 + s, 24, false);
      std::mt19937_64 rng(9000 + s);
      const Vector price = random_prices(rng, 24);
      const InnerSolution g = greedy_charge_solve(bat, price);
      PevBattery twin = bat;
      twin.v2g = true;
      const InnerSolution d = dp_v2g_solve(twin, price, Vector::Constant(24, -1e9));
      if (std::abs(g.value - d.value) <= kOracleTol &&
          (g.point - d.point.head(24)).cwiseAbs().maxCoeff() <= kOracleTol)
        ++greedy_ok;
    }

    // Dynamic program against exhaustive schedule enumeration.
    int dp_ok = 0;
    for (int s = 0; s < 100; ++s) {
      const int steps = 4 + s % 3;
      const PevBattery bat = random_battery(2600 + s, steps, true);
      std::mt19937_64 rng(9100 + s);
      const Vector cp = random_prices(rng, steps);
      const Vector dpv = random_prices(rng, steps);
      const InnerSolution got = dp_v2g_solve(bat, cp, dpv);
      Subsystem sub;
      sub.shape = bat;
      sub.cost = Vector::Zero(bat.dim());
      sub.coupling = Matrix::Zero(1, bat.dim());
      double best = std::numeric_limits<double>::infinity();
      for (const Vector& p : enumerate_points(sub))
        best = std::min(best, cp.dot(p.head(steps)) - dpv.dot(p.tail(steps)));
      if (std::abs(got.value - best) <= kOracleTol) ++dp_ok;
    }

    // Generic inner solver against an enumeration scan on lattice suites.
    int inner_ok = 0, inner_total = 0;
    for (int s = 0; s < 100; ++s) {
      const Instance inst = random_vertex_instance(2700 + s);
      std::mt19937_64 rng(9200 + s);
      std::uniform_real_distribution<double> unif(0.0, 2.0);
      Vector lam(inst.rows());
      for (Index k = 0; k < inst.rows(); ++k) lam[k] = unif(rng);
      for (const auto& sub : inst.subsystems) {
        ++inner_total;
        const Vector price = adjusted_price(sub, lam);
        const InnerSolution got = inner_solve(sub, price);
        double best = std::numeric_limits<double>::infinity();
        for (const Vector& p : enumerate_points(sub)) best = std::min(best, price.dot(p));
        if (std::abs(got.value - best) <= kOracleTol &&
            std::abs(price.dot(got.point) - best) <= kOracleTol)
          ++inner_ok;
      }
    }

    std::snprintf(buf, sizeof buf, "greedy=dp %d/200, dp=exhaustive %d/100, inner=scan %d/%d",
                  greedy_ok, dp_ok, inner_ok, inner_total);
    detail = buf;
    return greedy_ok == 200 && dp_ok == 100 && inner_ok == inner_total;
  });

  std::printf("%d/9 checks passed\n", 9 - g_failures);
  return g_failures;
}
