#include "rcsolve/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>

#include "rcsolve/contraction.hpp"
#include "rcsolve/inner.hpp"
#include "rcsolve/io.hpp"
#include "rcsolve/lp.hpp"
#include "rcsolve/pev.hpp"
#include "rcsolve/recover.hpp"
#include "rcsolve/util.hpp"

namespace rcsolve {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const InputError& e) {
    std::cerr << error_json("input", e.what()).dump() << "\n";
    return kExitBadInput;
  } catch (const TooLargeError& e) {
    std::cerr << error_json("too_large", e.what()).dump() << "\n";
    return kExitBadInput;
  } catch (const InfeasibleError& e) {
    std::cerr << error_json("infeasible", e.what()).dump() << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << error_json("internal", e.what()).dump() << "\n";
    return kExitInternal;
  }
}

Instance load_checked(const std::string& path) {
  Instance inst = load_instance(path);
  const ValidationReport rep = validate_instance(inst);
  for (const std::string& w : rep.warnings) std::cerr << "warning: " << w << "\n";
  if (!rep.ok()) {
    std::string joined;
    for (const std::string& e : rep.errors) {
      if (!joined.empty()) joined += "; ";
      joined += e;
    }
    throw InputError(path + ": " + joined);
  }
  return inst;
}

PipelineOptions::Contraction parse_contraction(const std::string& s) {
  using C = PipelineOptions::Contraction;
  if (s == "basic") return C::Basic;
  if (s == "block") return C::Block;
  if (s == "topk") return C::TopK;
  if (s == "zero") return C::Zero;
  if (s == "none") return C::None;
  throw InputError("unknown contraction \"" + s + "\"");
}

StepRule::Kind parse_step_rule(const std::string& s) {
  using K = StepRule::Kind;
  if (s == "constant") return K::Constant;
  if (s == "epoch") return K::ConstantEpochDecay;
  if (s == "diminishing") return K::Diminishing;
  throw InputError("unknown step rule \"" + s + "\"");
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
  if (!dir.empty()) fs::create_directories(dir);
}

int resolve_threads(int flag) { return flag > 0 ? flag : default_threads(); }

std::string csv_row(const std::vector<std::string>& cells) {
  std::string row;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) row += ',';
    row += cells[i];
  }
  row += '\n';
  return row;
}

// One-row flat rendering of the solve report; column order is part of the
// CLI contract.
std::string report_csv(const Json& report) {
  const Json& cfg = report["config"];
  std::vector<std::string> header = {"instance",   "contraction", "step_rule",
                                     "step_c0",    "epoch_len",   "max_iters",
                                     "tol_violation", "threads",  "dual_bound",
                                     "objective",  "gap_percent", "feasible",
                                     "wall_time_s", "iterations"};
  std::vector<std::string> cells = {
      report["instance"].get<std::string>(),
      cfg["contraction"].get<std::string>(),
      cfg["step_rule"].get<std::string>(),
      format_full(cfg["step_c0"].get<double>()),
      std::to_string(cfg["epoch_len"].get<int>()),
      std::to_string(cfg["max_iters"].get<int>()),
      format_full(cfg["tol_violation"].get<double>()),
      std::to_string(cfg["threads"].get<int>()),
      format_full(report["dual_bound"].get<double>()),
      format_full(report["objective"].get<double>()),
      report["gap_percent"].is_null() ? "nan"
                                      : format_full(report["gap_percent"].get<double>()),
      report["feasible"].get<bool>() ? "1" : "0",
      format_full(report["wall_time_s"].get<double>()),
      std::to_string(report["iterations"].get<int>()),
  };
  return csv_row(header) + csv_row(cells);
}

struct BenchRun {
  int size = 0;
  std::uint64_t seed = 0;
  double gap = 0.0;
  double time_s = 0.0;
  bool feasible = false;
  double bound = 0.0;
  double objective = 0.0;
};

}  // namespace

int default_threads() {
  if (const char* env = std::getenv("RCSOLVE_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

int cmd_gen(const GenOptions& opt) {
  return guarded([&]() -> int {
    if (opt.pevs <= 0) throw InputError("--pevs must be a positive fleet size");
    FleetParams params;
    params.n_pevs = opt.pevs;
    params.seed = opt.seed;
    params.v2g = opt.v2g;
    const Fleet fleet = generate_fleet(params);

    char name[64];
    std::snprintf(name, sizeof name, "pev%d_seed%llu%s", opt.pevs,
                  static_cast<unsigned long long>(opt.seed), opt.v2g ? "_v2g" : "");
    ensure_dir(opt.out_dir);
    const std::string instance_path = join_path(opt.out_dir, std::string(name) + ".json");
    const std::string sidecar_path = join_path(opt.out_dir, std::string(name) + ".params.json");
    save_instance(fleet.instance, instance_path);
    write_text_file(sidecar_path, fleet_sidecar_json(fleet.info).dump(2) + "\n");

    if (!fleet.info.spread_schedulable)
      std::cerr << "warning: mandatory charging demand may not fit under the contracted cap\n";
    Json out{{"instance", instance_path},
             {"sidecar", sidecar_path},
             {"digest", instance_digest(fleet.instance)},
             {"resampled", fleet.info.resampled},
             {"spread_schedulable", fleet.info.spread_schedulable}};
    std::cout << out.dump(2) << "\n";
    return kExitOk;
  });
}

int cmd_solve(const SolveOptions& opt) {
  return guarded([&]() -> int {
    const Instance inst = load_checked(opt.instance_path);

    PipelineOptions popt;
    popt.contraction = parse_contraction(opt.contraction);
    popt.dual.step.kind = parse_step_rule(opt.step_rule);
    popt.dual.step.c0 = opt.step_c0;
    popt.dual.step.epoch_len = opt.epoch;
    popt.dual.stop.max_iters = opt.max_iters;
    popt.dual.stop.tol_violation = opt.tol_viol;
    popt.dual.threads = resolve_threads(opt.threads);
    popt.feasibility_tol = opt.feas_tol;

    const auto t0 = Clock::now();
    const PipelineResult res = solve_pipeline(inst, popt);
    const double wall = seconds_since(t0);

    Json report{
        {"instance", instance_digest(inst)},
        {"config",
         {{"contraction", opt.contraction},
          {"step_rule", opt.step_rule},
          {"step_c0", opt.step_c0},
          {"epoch_len", opt.epoch},
          {"max_iters", opt.max_iters},
          {"tol_violation", opt.tol_viol},
          {"feasibility_tol", opt.feas_tol},
          {"threads", popt.dual.threads}}},
        {"dual_bound", res.dual_bound},
        {"objective", res.solution.objective},
        {"gap_percent", res.gap_percent},
        {"feasible", res.solution.feasible},
        {"wall_time_s", wall},
        {"iterations", res.iterations_total},
        {"contracted_best_dual", res.contracted_best_dual},
        {"rho_inf", res.rho.size() ? res.rho.lpNorm<Eigen::Infinity>() : 0.0},
        {"extensions_used", res.solution.extensions_used},
        {"at_best_multipliers", res.solution.at_best_multipliers},
        {"redispatch_moves", res.redispatch_moves},
    };
    if (res.contraction_warning) report["warning"] = *res.contraction_warning;
    validate_run_report(report);

    ensure_dir(opt.out_dir);
    const std::string stem = fs::path(opt.instance_path).stem().string();
    std::ostringstream trace;
    write_trace_csv(res.trace, trace);
    write_text_file(join_path(opt.out_dir, stem + ".trace.csv"), trace.str());

    if (res.contraction_warning)
      std::cerr << "warning: " << *res.contraction_warning << "\n";
    if (opt.format == "csv") {
      const std::string csv = report_csv(report);
      write_text_file(join_path(opt.out_dir, stem + ".report.csv"), csv);
      std::cout << csv;
    } else if (opt.format == "json") {
      write_text_file(join_path(opt.out_dir, stem + ".report.json"), report.dump(2) + "\n");
      std::cout << report.dump(2) << "\n";
    } else {
      throw InputError("unknown report format \"" + opt.format + "\"");
    }
    return res.solution.feasible ? kExitOk : kExitInfeasible;
  });
}

int cmd_verify(const VerifyOptions& opt) {
  return guarded([&]() -> int {
    Instance inst = load_checked(opt.instance_path);
    if (opt.perturb > 0.0) inst = perturb_costs(inst, opt.perturb, opt.perturb_seed);

    const BruteForceResult exact = brute_force_solve(inst);
    const ExtendedLp lp = build_extended_lp(inst);
    const LpSolution sol = simplex_solve(lp);
    const Assignment xlp = recover_xlp(lp, sol);
    const RecoveredSolution inner = recover_primal(inst, sol.multipliers);
    const ComplementarityReport comp = strict_complementarity_check(lp, sol);

    // Certified upper bound on the duality gap plus the Slater-based
    // performance bound under the basic contraction.
    const Vector rho = contraction_basic(inst);
    const ContractedInstance contracted = contract_instance(inst, rho);
    Assignment interior(inst.subsystems.size());
    for (Index i = 0; i < inst.size(); ++i) {
      const Subsystem& sub = inst.subsystems[i];
      interior[i] = inner_solve(sub, sub.coupling.colwise().sum().transpose()).point;
    }
    const double zeta = slater_margin(contracted.instance, interior);
    const BoundReport br = bounds(inst, rho, zeta);

    const double gap = exact.objective - sol.objective;
    const bool weak_ok = sol.objective <= exact.objective + 1e-7;
    const bool gap_bound_ok = gap <= br.duality_gap_bound + 1e-7;
    const int coincide = count_coincident(xlp, inner.assignment, 1e-7);
    const Index threshold = inst.size() - inst.rows();

    Json cert{
        {"dual_bound", sol.objective},
        {"objective", exact.objective},
        {"gap", gap},
        {"bounds",
         {{"gamma_max", br.gamma_max},
          {"duality_gap_bound", br.duality_gap_bound},
          {"slater_zeta", br.slater_zeta},
          {"performance_bound", br.performance_bound},
          {"gap_within_bound", gap_bound_ok}}},
        {"coincidence",
         {{"count", coincide},
          {"subsystems", inst.size()},
          {"rows", inst.rows()},
          {"threshold", threshold},
          {"meets_threshold", coincide >= threshold}}},
        {"strict_complementarity",
         {{"strict", comp.strict},
          {"degenerate_columns", static_cast<int>(comp.degenerate.size())}}},
        {"checks", {{"weak_duality", weak_ok}, {"gap_within_bound", gap_bound_ok}}},
        {"combinations", exact.combinations},
        {"lp_iterations", sol.iterations},
    };
    {
      Json lam = Json::array();
      for (Index k = 0; k < sol.multipliers.size(); ++k) lam.push_back(sol.multipliers[k]);
      cert["multipliers"] = std::move(lam);
    }
    validate_certificate(cert);

    ensure_dir(opt.out_dir);
    const std::string stem = fs::path(opt.instance_path).stem().string();
    write_text_file(join_path(opt.out_dir, stem + ".certificate.json"), cert.dump(2) + "\n");
    std::cout << cert.dump(2) << "\n";

    // Weak duality and the gap bound hold unconditionally; a violation means
    // the machinery itself is broken. Coincidence needs a uniqueness
    // assumption, so it stays informational.
    return (weak_ok && gap_bound_ok) ? kExitOk : kExitInternal;
  });
}

int cmd_bench(const BenchOptions& opt) {
  return guarded([&]() -> int {
    if (opt.sizes.empty()) throw InputError("--sizes requires at least one fleet size");
    if (opt.seeds <= 0) throw InputError("--seeds must be positive");
    for (int s : opt.sizes)
      if (s <= 0) throw InputError("fleet sizes must be positive");

    const int threads = resolve_threads(opt.threads);
    const Index total = static_cast<Index>(opt.sizes.size()) * opt.seeds;
    std::vector<BenchRun> runs(total);
    parallel_for(total, threads, [&](Index idx) {
      BenchRun& run = runs[idx];
      run.size = opt.sizes[idx / opt.seeds];
      run.seed = opt.seed0 + static_cast<std::uint64_t>(idx % opt.seeds);
      FleetParams params;
      params.n_pevs = run.size;
      params.seed = run.seed;
      params.v2g = opt.v2g;
      const Fleet fleet = generate_fleet(params);
      PipelineOptions popt;
      popt.dual.step.kind = parse_step_rule(opt.step_rule);
      popt.dual.stop.max_iters = opt.max_iters;
      const auto t0 = Clock::now();
      const PipelineResult res = solve_pipeline(fleet.instance, popt);
      run.time_s = seconds_since(t0);
      run.gap = res.gap_percent;
      run.feasible = res.solution.feasible;
      run.bound = res.dual_bound;
      run.objective = res.solution.objective;
    });

    std::string csv = csv_row({"row_type", "size", "seed", "gap_percent", "time_s", "feasible",
                               "dual_bound", "objective", "gap_min", "gap_avg", "gap_max",
                               "time_min", "time_avg", "time_max", "trend_ok"});
    bool all_feasible = true;
    double prev_avg = std::numeric_limits<double>::infinity();
    for (std::size_t si = 0; si < opt.sizes.size(); ++si) {
      // Gap statistics cover feasible runs only: an infeasible run has no
      // meaningful gap and must not drag the averages or the trend flag.
      double gap_min = std::numeric_limits<double>::infinity(), gap_max = -gap_min, gap_sum = 0;
      double t_min = std::numeric_limits<double>::infinity(), t_max = -t_min, t_sum = 0;
      int n_gap = 0;
      for (int j = 0; j < opt.seeds; ++j) {
        const BenchRun& r = runs[static_cast<Index>(si) * opt.seeds + j];
        all_feasible = all_feasible && r.feasible;
        if (r.feasible && std::isfinite(r.gap)) {
          gap_min = std::min(gap_min, r.gap);
          gap_max = std::max(gap_max, r.gap);
          gap_sum += r.gap;
          ++n_gap;
        }
        t_min = std::min(t_min, r.time_s);
        t_max = std::max(t_max, r.time_s);
        t_sum += r.time_s;
        csv += csv_row({"run", std::to_string(r.size), std::to_string(r.seed),
                        format_full(r.gap), format_full(r.time_s), r.feasible ? "1" : "0",
                        format_full(r.bound), format_full(r.objective), "", "", "", "", "", "",
                        ""});
      }
      const double nan = std::numeric_limits<double>::quiet_NaN();
      const double gap_avg = n_gap ? gap_sum / n_gap : nan;
      if (!n_gap) gap_min = gap_max = nan;
      const double t_avg = t_sum / opt.seeds;
      const bool trend_ok = n_gap > 0 && gap_avg <= prev_avg + 1e-12;
      if (n_gap) prev_avg = gap_avg;
      csv += csv_row({"size", std::to_string(opt.sizes[si]), "", "", "", "", "", "",
                      format_full(gap_min), format_full(gap_avg), format_full(gap_max),
                      format_full(t_min), format_full(t_avg), format_full(t_max),
                      trend_ok ? "1" : "0"});
      std::printf("size %d: gap avg %.3f%% [%.3f, %.3f], time avg %.2fs, trend %s\n",
                  opt.sizes[si], gap_avg, gap_min, gap_max, t_avg, trend_ok ? "ok" : "UP");
    }

    ensure_dir(opt.out_dir);
    const std::string path = join_path(opt.out_dir, "bench.csv");
    write_text_file(path, csv);
    std::cout << "wrote " << path << "\n";
    return all_feasible ? kExitOk : kExitInfeasible;
  });
}

}  // namespace rcsolve
