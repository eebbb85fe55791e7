#include <iostream>

#include <CLI11.hpp>

#include "rcsolve/cli.hpp"
#include "rcsolve/io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Block-coupled integer programs: dual ascent with guaranteed-feasible recovery"};
  app.require_subcommand(1);

  rcsolve::GenOptions gen;
  CLI::App* g = app.add_subcommand("gen", "Generate a fleet-charging instance");
  g->add_option("--pevs", gen.pevs, "Fleet size")->required();
  g->add_option("--seed", gen.seed, "Random seed");
  g->add_flag("--v2g", gen.v2g, "Allow discharging into the grid");
  g->add_option("--out", gen.out_dir, "Output directory");

  rcsolve::SolveOptions solve;
  CLI::App* s = app.add_subcommand("solve", "Contract, run the dual ascent, recover a solution");
  s->add_option("instance", solve.instance_path, "Instance JSON file")->required();
  s->add_option("--contraction", solve.contraction, "Contraction rule")
      ->check(CLI::IsMember({"basic", "block", "topk", "zero", "none"}));
  s->add_option("--step-rule", solve.step_rule, "Step size rule")
      ->check(CLI::IsMember({"constant", "epoch", "diminishing"}));
  s->add_option("--step-c0", solve.step_c0, "Base step size (0: auto-scale)");
  s->add_option("--epoch", solve.epoch, "Iterations per decay epoch");
  s->add_option("--max-iters", solve.max_iters, "Subgradient iteration cap");
  s->add_option("--tol-viol", solve.tol_viol, "Violation tolerance for early stopping");
  s->add_option("--feas-tol", solve.feas_tol, "Feasibility check tolerance");
  s->add_option("--threads", solve.threads, "Inner solves in parallel (0: RCSOLVE_THREADS)");
  s->add_option("--out", solve.out_dir, "Output directory");
  s->add_option("--format", solve.format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}));

  rcsolve::VerifyOptions verify;
  CLI::App* v = app.add_subcommand("verify", "Cross-check an enumerable instance");
  v->add_option("instance", verify.instance_path, "Instance JSON file")->required();
  v->add_option("--out", verify.out_dir, "Output directory");
  v->add_option("--perturb", verify.perturb, "Cost perturbation magnitude");
  v->add_option("--perturb-seed", verify.perturb_seed, "Perturbation seed");

  rcsolve::BenchOptions bench;
  CLI::App* b = app.add_subcommand("bench", "Sweep fleet sizes x seeds and summarize gaps");
  b->add_option("--sizes", bench.sizes, "Fleet sizes")->required()->delimiter(',');
  b->add_option("--seeds", bench.seeds, "Runs per size");
  b->add_option("--seed0", bench.seed0, "Seed of the first run");
  CLI::Option* v2g_flag = b->add_flag("--v2g", bench.v2g, "Allow discharging");
  b->add_flag("--charge-only", "Charging only (the default)")->excludes(v2g_flag);
  b->add_option("--step-rule", bench.step_rule, "Step schedule")
      ->check(CLI::IsMember({"constant", "epoch", "diminishing"}));
  b->add_option("--max-iters", bench.max_iters, "Subgradient iteration cap per run");
  b->add_option("--threads", bench.threads, "Concurrent runs (0: RCSOLVE_THREADS)");
  b->add_option("--out", bench.out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << rcsolve::error_json("usage", e.what()).dump() << "\n";
    return rcsolve::kExitBadInput;
  }

  if (g->parsed()) return rcsolve::cmd_gen(gen);
  if (s->parsed()) return rcsolve::cmd_solve(solve);
  if (v->parsed()) return rcsolve::cmd_verify(verify);
  if (b->parsed()) return rcsolve::cmd_bench(bench);
  return rcsolve::kExitBadInput;
}
