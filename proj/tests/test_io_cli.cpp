#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "rcsolve/cli.hpp"
#include "rcsolve/dual.hpp"
#include "rcsolve/io.hpp"
#include "rcsolve/pev.hpp"
#include "support/fixtures.hpp"

using namespace rcsolve;
using namespace rcsolve::testing;
namespace fs = std::filesystem;

namespace {

// Scratch directory removed at scope exit.
struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("rcsolve_test_" + std::to_string(::getpid()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("instances survive the JSON round trip byte for byte") {
  const Instance inst = small_coupled_instance();
  const Json j1 = instance_to_json(inst);
  const Instance back = instance_from_json(j1);
  CHECK(instance_to_json(back).dump() == j1.dump());
  CHECK(instance_digest(back) == instance_digest(inst));
  CHECK(dual_value(back, Vector::Constant(1, 0.4)).value == doctest::Approx(-7.64));

  TempDir tmp;
  save_instance(inst, tmp.file("inst.json"));
  const Instance loaded = load_instance(tmp.file("inst.json"));
  CHECK(instance_digest(loaded) == instance_digest(inst));
}

TEST_CASE("fleets round trip with canonical coupling blocks left implicit") {
  FleetParams params;
  params.n_pevs = 5;
  params.steps = 12;
  params.v2g = true;
  params.seed = 31;
  const Fleet fleet = generate_fleet(params);

  const Json j = instance_to_json(fleet.instance);
  for (const Json& sub : j["subsystems"]) {
    CHECK(sub["kind"] == "pev");
    CHECK(!sub.contains("H"));  // rebuilt from the battery parameters on load
  }
  const Instance back = instance_from_json(j);
  CHECK(instance_digest(back) == instance_digest(fleet.instance));
  REQUIRE(back.row_pairs.size() == 12);
  for (Index i = 0; i < back.size(); ++i) {
    CHECK(back.subsystems[i].cost == fleet.instance.subsystems[i].cost);
    CHECK(back.subsystems[i].coupling == fleet.instance.subsystems[i].coupling);
  }

  // A hand-edited coupling block must be written out explicitly.
  Instance custom = fleet.instance;
  custom.subsystems[0].coupling(0, 0) *= 2.0;
  CHECK(instance_to_json(custom)["subsystems"][0].contains("H"));
  const Instance custom_back = instance_from_json(instance_to_json(custom));
  CHECK(custom_back.subsystems[0].coupling == custom.subsystems[0].coupling);
}

TEST_CASE("digest tracks content, not identity") {
  const Instance a = small_coupled_instance();
  Instance b = small_coupled_instance();
  CHECK(instance_digest(a) == instance_digest(b));
  b.subsystems[0].cost[0] += 1e-9;
  CHECK(instance_digest(a) != instance_digest(b));
}

TEST_CASE("malformed documents raise input errors with locations") {
  Json j = instance_to_json(small_coupled_instance());
  j.erase("resource");
  CHECK_THROWS_AS(instance_from_json(j), InputError);

  Json j2 = instance_to_json(small_coupled_instance());
  j2["subsystems"][1]["kind"] = "mystery";
  CHECK_THROWS_AS(instance_from_json(j2), InputError);

  Json j3 = instance_to_json(small_coupled_instance());
  j3["subsystems"][0].erase("H");
  try {
    instance_from_json(j3);
    FAIL("expected a parse failure");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("subsystems[0]") != std::string::npos);
  }

  TempDir tmp;
  write_text_file(tmp.file("broken.json"), "{ not json");
  CHECK_THROWS_AS(load_instance(tmp.file("broken.json")), InputError);
  CHECK_THROWS_AS(load_instance(tmp.file("missing.json")), InputError);
  CHECK_THROWS_AS(read_text_file(tmp.file("missing.txt")), InputError);
}

TEST_CASE("the bundled example parses to the reference fixture") {
  const Instance disk = load_instance(std::string(RCSOLVE_DATA_DIR) + "/example1.json");
  CHECK(instance_digest(disk) == instance_digest(small_coupled_instance()));
}

TEST_CASE("trace files carry one row per iteration under a fixed header") {
  Instance inst = small_coupled_instance();
  SubgradientOptions opt;
  opt.stop.max_iters = 7;
  opt.stop.window = 100;
  const DualResult res = subgradient_solve(inst, opt);

  std::ostringstream out;
  write_trace_csv(res.trace, out);
  std::istringstream in(out.str());
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "iteration,dual_value,max_violation,step");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == res.iterations);
}

TEST_CASE("report and certificate schemas are enforced") {
  Json report{{"instance", "deadbeef"},
              {"config", Json::object()},
              {"dual_bound", -7.64},
              {"objective", -7.0},
              {"gap_percent", 8.4},
              {"feasible", true},
              {"wall_time_s", 0.1},
              {"iterations", 42}};
  CHECK_NOTHROW(validate_run_report(report));
  report.erase("dual_bound");
  CHECK_THROWS_AS(validate_run_report(report), SolverError);

  const Json err = error_json("input", "bad things");
  CHECK(err["error"]["kind"] == "input");
  CHECK(err["error"]["message"] == "bad things");
}

TEST_CASE("generation writes a loadable instance plus sidecar") {
  TempDir tmp;
  GenOptions opt;
  opt.pevs = 4;
  opt.seed = 9;
  opt.v2g = true;
  opt.out_dir = tmp.str();
  REQUIRE(cmd_gen(opt) == kExitOk);

  const Instance inst = load_instance(tmp.file("pev4_seed9_v2g.json"));
  CHECK(inst.size() == 4);
  CHECK(inst.rows() == 48);
  const Json sidecar = Json::parse(read_text_file(tmp.file("pev4_seed9_v2g.params.json")));
  CHECK(sidecar["n_pevs"] == 4);
  CHECK(sidecar["v2g"] == true);
  CHECK(sidecar["price_u"].size() == 24);

  GenOptions bad;
  bad.pevs = 0;
  bad.out_dir = tmp.str();
  CHECK(cmd_gen(bad) == kExitBadInput);
}

TEST_CASE("solving from the command line writes report and trace") {
  TempDir tmp;
  SolveOptions opt;
  opt.instance_path = std::string(RCSOLVE_DATA_DIR) + "/example1.json";
  opt.out_dir = tmp.str();
  REQUIRE(cmd_solve(opt) == kExitOk);

  const Json report = Json::parse(read_text_file(tmp.file("example1.report.json")));
  CHECK_NOTHROW(validate_run_report(report));
  CHECK(report["feasible"] == true);
  CHECK(report["dual_bound"].get<double>() <= -7.63);
  CHECK(fs::exists(tmp.file("example1.trace.csv")));

  SolveOptions csv = opt;
  csv.format = "csv";
  REQUIRE(cmd_solve(csv) == kExitOk);
  const std::string flat = read_text_file(tmp.file("example1.report.csv"));
  CHECK(flat.rfind("instance,contraction,step_rule,", 0) == 0);

  SolveOptions bad = opt;
  bad.contraction = "sideways";
  CHECK(cmd_solve(bad) == kExitBadInput);
  SolveOptions missing = opt;
  missing.instance_path = tmp.file("nope.json");
  CHECK(cmd_solve(missing) == kExitBadInput);
}

TEST_CASE("verification certifies the reference instance") {
  TempDir tmp;
  VerifyOptions opt;
  opt.instance_path = std::string(RCSOLVE_DATA_DIR) + "/example1.json";
  opt.out_dir = tmp.str();
  REQUIRE(cmd_verify(opt) == kExitOk);

  const Json cert = Json::parse(read_text_file(tmp.file("example1.certificate.json")));
  CHECK_NOTHROW(validate_certificate(cert));
  CHECK(cert["dual_bound"].get<double>() == doctest::Approx(-7.64));
  CHECK(cert["objective"].get<double>() == doctest::Approx(-7.0));
  CHECK(cert["multipliers"][0].get<double>() == doctest::Approx(0.4));
  CHECK(cert["coincidence"]["meets_threshold"] == true);
  CHECK(cert["checks"]["weak_duality"] == true);
  CHECK(cert["strict_complementarity"]["strict"] == true);
}

TEST_CASE("benchmarking writes aggregated rows and exits by feasibility") {
  TempDir tmp;
  BenchOptions opt;
  opt.sizes = {4};
  opt.seeds = 1;
  opt.max_iters = 120;
  opt.out_dir = tmp.str();
  REQUIRE(cmd_bench(opt) == kExitOk);

  std::istringstream csv(read_text_file(tmp.file("bench.csv")));
  std::string line;
  REQUIRE(std::getline(csv, line));
  CHECK(line ==
        "row_type,size,seed,gap_percent,time_s,feasible,dual_bound,objective,"
        "gap_min,gap_avg,gap_max,time_min,time_avg,time_max,trend_ok");
  int runs = 0, sizes = 0;
  while (std::getline(csv, line)) {
    if (line.rfind("run,", 0) == 0) ++runs;
    if (line.rfind("size,", 0) == 0) ++sizes;
  }
  CHECK(runs == 1);
  CHECK(sizes == 1);

  BenchOptions bad;
  bad.sizes = {};
  CHECK(cmd_bench(bad) == kExitBadInput);
}
