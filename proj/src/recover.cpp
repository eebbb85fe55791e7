#include "rcsolve/recover.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rcsolve/inner.hpp"

namespace rcsolve {

double cost_spread(const Subsystem& sub) {
  auto [lo, hi] = linear_range(sub, sub.cost);
  return hi - lo;
}

Vector cost_spreads(const Instance& inst) {
  Vector g(inst.size());
  for (Index i = 0; i < inst.size(); ++i) g[i] = cost_spread(inst.subsystems[i]);
  return g;
}

int count_coincident(const Assignment& a, const Assignment& b, double tol) {
  if (a.size() != b.size()) throw InputError("assignment length mismatch");
  int n = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != b[i].size()) continue;
    if ((a[i] - b[i]).lpNorm<Eigen::Infinity>() <= tol) ++n;
  }
  return n;
}

double slater_margin(const Instance& inst, const Assignment& candidate) {
  const Vector slack = inst.resource - coupling_usage(inst, candidate);
  return slack.minCoeff() / static_cast<double>(inst.size());
}

BoundReport bounds(const Instance& original, const Vector& rho, double zeta) {
  BoundReport rep;
  rep.gamma = cost_spreads(original);
  rep.gamma_max = rep.gamma.size() ? rep.gamma.maxCoeff() : 0.0;
  rep.duality_gap_bound = static_cast<double>(original.rows()) * rep.gamma_max;
  rep.slater_zeta = zeta;
  rep.has_margin = zeta > 0.0;
  rep.performance_bound =
      rep.has_margin ? (static_cast<double>(original.rows()) +
                        rho.lpNorm<Eigen::Infinity>() / zeta) *
                           rep.gamma_max
                     : std::numeric_limits<double>::infinity();
  return rep;
}

RecoveredSolution recover_primal(const Instance& original, const Vector& multipliers,
                                 double tol) {
  RecoveredSolution rec;
  rec.assignment.resize(original.size());
  for (Index i = 0; i < original.size(); ++i)
    rec.assignment[i] =
        inner_solve(original.subsystems[i], adjusted_price(original.subsystems[i], multipliers))
            .point;
  rec.usage = coupling_usage(original, rec.assignment);
  rec.objective = evaluate_objective(original, rec.assignment);
  rec.feasible = check_feasibility(original, rec.assignment, tol).feasible;
  return rec;
}

Assignment zero_contraction_repair(const Instance& inst, Assignment asg, int* zeroed) {
  if (zeroed) *zeroed = 0;
  std::vector<bool> cleared(asg.size(), false);
  for (Index pass = 0; pass <= inst.size(); ++pass) {
    const Vector slack = inst.resource - coupling_usage(inst, asg);
    Index worst;
    if (slack.minCoeff(&worst) >= -kFeasibilityTol) return asg;
    // Drop the subsystem contributing most to the worst row; contributions
    // are nonnegative in this regime, so usage only shrinks.
    Index pick = -1;
    double most = 0.0;
    for (Index i = 0; i < inst.size(); ++i) {
      if (cleared[i]) continue;
      const double load = inst.subsystems[i].coupling.row(worst).dot(asg[i]);
      if (pick < 0 || load > most) {
        pick = i;
        most = load;
      }
    }
    if (pick < 0 || most <= 0.0)
      throw RepairError("no positive contribution left on the violated row");
    asg[pick] = Vector::Zero(inst.subsystems[pick].dim());
    cleared[pick] = true;
    if (zeroed) ++*zeroed;
  }
  throw RepairError("coupling still violated after zeroing every subsystem");
}

RedispatchResult redispatch_selection(const Instance& inst, const Vector& multipliers,
                                      Assignment start, double tol, int max_moves) {
  RedispatchResult out;
  out.assignment = std::move(start);
  out.usage = coupling_usage(inst, out.assignment);

  std::vector<Vector> base(inst.size());
  for (Index i = 0; i < inst.size(); ++i)
    base[i] = adjusted_price(inst.subsystems[i], multipliers);

  const double scale = std::max(1.0, multipliers.lpNorm<Eigen::Infinity>());
  constexpr double kLadder[] = {0.01, 0.03, 0.1, 0.3, 1.0, 3.0, 10.0};

  while (out.usage.size() > 0 && out.moves < max_moves) {
    const Vector viol = (out.usage - inst.resource).cwiseMax(0.0);
    const double total = viol.sum();
    Index worst = 0;
    if (viol.maxCoeff(&worst) <= tol) break;

    // Cheapest single-subsystem switch that strictly shrinks the total
    // violation, searched with an escalating penalty on the worst row.
    Index pick = -1;
    Vector pick_point, pick_usage;
    double pick_rate = std::numeric_limits<double>::infinity();
    double pick_total = total;
    for (double eta : kLadder) {
      const double t = eta * scale;
      for (Index i = 0; i < inst.size(); ++i) {
        const Subsystem& sub = inst.subsystems[i];
        const Vector price = base[i] + t * sub.coupling.row(worst).transpose();
        Vector alt = inner_solve(sub, price).point;
        if ((alt - out.assignment[i]).lpNorm<Eigen::Infinity>() <= kTieTol) continue;
        Vector usage = out.usage + sub.coupling * (alt - out.assignment[i]);
        const double new_total = (usage - inst.resource).cwiseMax(0.0).sum();
        if (new_total >= total - 1e-9) continue;
        const double rate = sub.cost.dot(alt - out.assignment[i]) / (total - new_total);
        if (pick < 0 || rate < pick_rate - 1e-12 ||
            (std::abs(rate - pick_rate) <= 1e-12 && new_total < pick_total)) {
          pick = i;
          pick_point = std::move(alt);
          pick_usage = std::move(usage);
          pick_rate = rate;
          pick_total = new_total;
        }
      }
      if (pick >= 0) break;
    }
    if (pick < 0) break;  // penalty ladder exhausted
    out.assignment[pick] = std::move(pick_point);
    out.usage = std::move(pick_usage);
    ++out.moves;
  }

  out.objective = evaluate_objective(inst, out.assignment);
  out.feasible = check_feasibility(inst, out.assignment, tol).feasible;
  return out;
}

namespace {

Vector pipeline_rho(const Instance& inst, PipelineOptions::Contraction kind) {
  using C = PipelineOptions::Contraction;
  switch (kind) {
    case C::Basic:
      return contraction_basic(inst);
    case C::Block:
      return contraction_block(inst);
    case C::TopK:
      return contraction_topk(inst);
    case C::Zero:
      if (!detect_zero_contraction(inst))
        throw InputError("zero contraction requires nonnegative couplings and zero points");
      return Vector::Zero(inst.rows());
    case C::None:
      return Vector::Zero(inst.rows());
  }
  return Vector::Zero(inst.rows());
}

}  // namespace

PipelineResult solve_pipeline(const Instance& inst, const PipelineOptions& opt) {
  PipelineResult out;
  out.rho = pipeline_rho(inst, opt.contraction);
  ContractedInstance contracted = contract_instance(inst, out.rho);
  out.contraction_warning = contracted.warning;

  // Track, across every contracted iteration, the cheapest inner assignment
  // that already satisfies the *original* coupling, plus the best valid
  // original dual value d(lambda) = d_contracted(lambda) - lambda . rho.
  double best_feas_obj = std::numeric_limits<double>::infinity();
  Assignment best_feas_asg;
  Vector best_feas_usage;
  double free_bound = -std::numeric_limits<double>::infinity();
  auto consider = [&](const Assignment& pts, const Vector& usage) {
    if ((usage.array() <= inst.resource.array() + opt.feasibility_tol).all()) {
      const double obj = evaluate_objective(inst, pts);
      if (obj < best_feas_obj) {
        best_feas_obj = obj;
        best_feas_asg = pts;
        best_feas_usage = usage;
      }
    }
  };
  const auto user_hook = opt.dual.on_iterate;
  auto track = [&](int it, const Vector& lam, double value, const Assignment& pts,
                   const Vector& usage) {
    free_bound = std::max(free_bound, value - lam.dot(out.rho));
    consider(pts, usage);
    if (user_hook) user_hook(it, lam, value, pts, usage);
  };

  SubgradientOptions dopt = opt.dual;
  dopt.on_iterate = track;
  DualResult run = subgradient_solve(contracted.instance, dopt);
  out.trace = run.trace;
  out.iterations_total = run.iterations;
  out.contracted_best_dual = run.best_value;
  out.best_multipliers = run.best_multipliers;

  RecoveredSolution cand = recover_primal(inst, run.best_multipliers, opt.feasibility_tol);
  double c0 = run.resolved_c0;
  while (!cand.feasible && cand.extensions_used < opt.max_extensions) {
    c0 *= 0.5;
    SubgradientOptions ext = dopt;
    ext.initial = out.best_multipliers;
    ext.step.c0 = c0;
    DualResult more = subgradient_solve(contracted.instance, ext);
    out.iterations_total += more.iterations;
    if (more.best_value > out.contracted_best_dual) {
      out.contracted_best_dual = more.best_value;
      out.best_multipliers = more.best_multipliers;
    }
    const int used = cand.extensions_used + 1;
    cand = recover_primal(inst, out.best_multipliers, opt.feasibility_tol);
    cand.extensions_used = used;
  }

  // Zero-contraction instances get the dedicated repair pass as a fallback.
  if (!cand.feasible && opt.contraction == PipelineOptions::Contraction::Zero) {
    try {
      Assignment fixed = zero_contraction_repair(inst, cand.assignment);
      cand.assignment = std::move(fixed);
      cand.usage = coupling_usage(inst, cand.assignment);
      cand.objective = evaluate_objective(inst, cand.assignment);
      cand.feasible = check_feasibility(inst, cand.assignment, opt.feasibility_tol).feasible;
    } catch (const RepairError&) {
      // fall through; the tracked iterate may still save the run
    }
  }

  // Dedicated bound run on the original dual; its iterates are watched for
  // feasible selections and its best multipliers seed the re-selection pass.
  double bound = free_bound;
  Vector redispatch_lam = out.best_multipliers;
  if (opt.bound_run && out.rho.lpNorm<Eigen::Infinity>() > 0) {
    SubgradientOptions bopt = opt.dual;
    bopt.on_iterate = [&](int, const Vector&, double, const Assignment& pts,
                          const Vector& usage) { consider(pts, usage); };
    DualResult orig = subgradient_solve(inst, bopt);
    out.iterations_total += orig.iterations;
    bound = std::max(bound, orig.best_value);
    redispatch_lam = orig.best_multipliers;
  }

  if (std::isfinite(best_feas_obj) && (!cand.feasible || best_feas_obj < cand.objective)) {
    cand.assignment = best_feas_asg;
    cand.objective = best_feas_obj;
    cand.usage = best_feas_usage;
    cand.feasible = true;
    cand.at_best_multipliers = false;
  }

  if (opt.redispatch) {
    const RecoveredSolution at_lam = recover_primal(inst, redispatch_lam, opt.feasibility_tol);
    RedispatchResult rd = redispatch_selection(inst, redispatch_lam, at_lam.assignment,
                                               opt.feasibility_tol, opt.max_redispatch_moves);
    out.redispatch_moves = rd.moves;
    if (rd.feasible && (!cand.feasible || rd.objective < cand.objective)) {
      cand.assignment = std::move(rd.assignment);
      cand.usage = std::move(rd.usage);
      cand.objective = rd.objective;
      cand.feasible = true;
      cand.at_best_multipliers = false;
    }
  }
  out.solution = cand;
  out.dual_bound = bound;
  out.gap_percent = std::abs(bound) > 0
                        ? (cand.objective - bound) / std::abs(bound) * 100.0
                        : std::numeric_limits<double>::quiet_NaN();
  return out;
}

}  // namespace rcsolve
