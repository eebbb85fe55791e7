#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rcsolve/types.hpp"

namespace rcsolve {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInfeasible = 2;
inline constexpr int kExitBadInput = 3;
inline constexpr int kExitInternal = 4;

struct GenOptions {
  int pevs = 0;
  std::uint64_t seed = 0;
  bool v2g = false;
  std::string out_dir = ".";
};

struct SolveOptions {
  std::string instance_path;
  std::string contraction = "basic";  // basic|block|topk|zero|none
  std::string step_rule = "epoch";    // constant|epoch|diminishing
  double step_c0 = 0.0;               // 0: auto-scale on the first subgradient
  int epoch = 25;
  int max_iters = 500;
  double tol_viol = 0.0;
  double feas_tol = kFeasibilityTol;
  int threads = 0;  // 0: RCSOLVE_THREADS or 1
  std::string out_dir = ".";
  std::string format = "json";  // report format: json|csv
};

struct VerifyOptions {
  std::string instance_path;
  std::string out_dir = ".";
  double perturb = 0.0;  // cost perturbation magnitude applied before checking
  std::uint64_t perturb_seed = 0;
};

struct BenchOptions {
  std::vector<int> sizes;
  int seeds = 10;
  std::uint64_t seed0 = 1;  // run j of any size uses seed seed0 + j
  bool v2g = false;
  std::string step_rule = "epoch";  // constant|epoch|diminishing
  int max_iters = 500;
  int threads = 0;
  std::string out_dir = ".";
};

// Each command returns a process exit code and never throws; failures are
// reported as machine-readable error JSON on stderr.
int cmd_gen(const GenOptions& opt);
int cmd_solve(const SolveOptions& opt);
int cmd_verify(const VerifyOptions& opt);
int cmd_bench(const BenchOptions& opt);

int default_threads();  // RCSOLVE_THREADS when set, else 1

}  // namespace rcsolve
