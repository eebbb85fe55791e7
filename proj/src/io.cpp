#include "rcsolve/io.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "rcsolve/util.hpp"

namespace rcsolve {

namespace {

[[noreturn]] void bad(const std::string& what) { throw InputError("instance json: " + what); }

Json vec_to_json(const Vector& v) {
  Json a = Json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json ivec_to_json(const IntVector& v) {
  Json a = Json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json mat_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

const Json& field(const Json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) bad(where + ": missing \"" + key + "\"");
  return *it;
}

double num_from_json(const Json& j, const std::string& where) {
  if (!j.is_number()) bad(where + ": expected a number");
  return j.get<double>();
}

Vector vec_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) bad(where + ": expected an array");
  Vector v(j.size());
  Index i = 0;
  for (const Json& e : j) v[i++] = num_from_json(e, where);
  return v;
}

IntVector ivec_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) bad(where + ": expected an array");
  IntVector v(j.size());
  Index i = 0;
  for (const Json& e : j) {
    if (!e.is_number_integer()) bad(where + ": expected an integer");
    v[i++] = e.get<int>();
  }
  return v;
}

Matrix mat_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) bad(where + ": expected an array of rows");
  const Index rows = static_cast<Index>(j.size());
  Index cols = -1;
  Matrix m;
  Index r = 0;
  for (const Json& row : j) {
    Vector v = vec_from_json(row, where);
    if (cols < 0) {
      cols = v.size();
      m.resize(rows, cols);
    } else if (v.size() != cols) {
      bad(where + ": ragged rows");
    }
    m.row(r++) = v.transpose();
  }
  if (rows == 0) m.resize(0, 0);
  return m;
}

Json subsystem_to_json(const Subsystem& s) {
  Json js;
  js["cost"] = vec_to_json(s.cost);
  if (const auto* lp = std::get_if<LatticePolytope>(&s.shape)) {
    js["kind"] = "lattice";
    js["H"] = mat_to_json(s.coupling);
    js["lower"] = ivec_to_json(lp->lower);
    js["upper"] = ivec_to_json(lp->upper);
    if (lp->a.rows() > 0) {
      js["A"] = mat_to_json(lp->a);
      js["d"] = vec_to_json(lp->d);
    }
  } else if (const auto* vl = std::get_if<VertexList>(&s.shape)) {
    js["kind"] = "vertices";
    js["H"] = mat_to_json(s.coupling);
    Json pts = Json::array();
    for (const Vector& p : vl->points) pts.push_back(vec_to_json(p));
    js["points"] = pts;
  } else {
    const auto& b = std::get<PevBattery>(s.shape);
    js["kind"] = "pev";
    js["power_kw"] = b.power_kw;
    js["e_init_kwh"] = b.e_init_kwh;
    js["e_ref_kwh"] = b.e_ref_kwh;
    js["e_min_kwh"] = b.e_min_kwh;
    js["e_max_kwh"] = b.e_max_kwh;
    js["loss"] = b.loss;
    js["steps"] = b.steps;
    js["dt_hours"] = b.dt_hours;
    js["v2g"] = b.v2g;
    if (b.delta_u.size() > 0) js["delta_u"] = vec_to_json(b.delta_u);
    if (b.delta_v.size() > 0) js["delta_v"] = vec_to_json(b.delta_v);
    if (s.coupling != pev_coupling_block(b)) js["H"] = mat_to_json(s.coupling);
  }
  return js;
}

Subsystem subsystem_from_json(const Json& js, const std::string& where) {
  if (!js.is_object()) bad(where + ": expected an object");
  Subsystem s;
  s.cost = vec_from_json(field(js, "cost", where), where + ".cost");
  const Json& jk = field(js, "kind", where);
  if (!jk.is_string()) bad(where + ".kind: expected a string");
  const std::string kind = jk.get<std::string>();
  if (kind == "lattice") {
    LatticePolytope lp;
    lp.lower = ivec_from_json(field(js, "lower", where), where + ".lower");
    lp.upper = ivec_from_json(field(js, "upper", where), where + ".upper");
    if (js.contains("A") || js.contains("d")) {
      lp.a = mat_from_json(field(js, "A", where), where + ".A");
      lp.d = vec_from_json(field(js, "d", where), where + ".d");
    }
    s.coupling = mat_from_json(field(js, "H", where), where + ".H");
    s.shape = std::move(lp);
  } else if (kind == "vertices") {
    VertexList vl;
    for (const Json& p : field(js, "points", where))
      vl.points.push_back(vec_from_json(p, where + ".points"));
    s.coupling = mat_from_json(field(js, "H", where), where + ".H");
    s.shape = std::move(vl);
  } else if (kind == "pev") {
    PevBattery b;
    b.power_kw = num_from_json(field(js, "power_kw", where), where + ".power_kw");
    b.e_init_kwh = num_from_json(field(js, "e_init_kwh", where), where + ".e_init_kwh");
    b.e_ref_kwh = num_from_json(field(js, "e_ref_kwh", where), where + ".e_ref_kwh");
    b.e_min_kwh = num_from_json(field(js, "e_min_kwh", where), where + ".e_min_kwh");
    b.e_max_kwh = num_from_json(field(js, "e_max_kwh", where), where + ".e_max_kwh");
    b.loss = num_from_json(field(js, "loss", where), where + ".loss");
    const Json& steps = field(js, "steps", where);
    if (!steps.is_number_integer()) bad(where + ".steps: expected an integer");
    b.steps = steps.get<int>();
    b.dt_hours = num_from_json(field(js, "dt_hours", where), where + ".dt_hours");
    const Json& v2g = field(js, "v2g", where);
    if (!v2g.is_boolean()) bad(where + ".v2g: expected a boolean");
    b.v2g = v2g.get<bool>();
    if (js.contains("delta_u")) b.delta_u = vec_from_json(js["delta_u"], where + ".delta_u");
    if (js.contains("delta_v")) b.delta_v = vec_from_json(js["delta_v"], where + ".delta_v");
    s.coupling = js.contains("H") ? mat_from_json(js["H"], where + ".H")
                                  : pev_coupling_block(b);
    s.shape = std::move(b);
  } else {
    bad(where + ".kind: unknown kind \"" + kind + "\"");
  }
  return s;
}

void expect(bool ok, const char* what) {
  if (!ok) throw SolverError(std::string("report schema violation: ") + what);
}

}  // namespace

Json instance_to_json(const Instance& inst) {
  Json j;
  j["resource"] = vec_to_json(inst.resource);
  if (!inst.row_pairs.empty()) {
    Json rp = Json::array();
    for (const auto& [u, l] : inst.row_pairs) rp.push_back(Json::array({u, l}));
    j["row_pairs"] = rp;
  }
  Json subs = Json::array();
  for (const Subsystem& s : inst.subsystems) subs.push_back(subsystem_to_json(s));
  j["subsystems"] = std::move(subs);
  return j;
}

Instance instance_from_json(const Json& j) {
  if (!j.is_object()) bad("top level must be an object");
  Instance inst;
  inst.resource = vec_from_json(field(j, "resource", "top level"), "resource");
  if (j.contains("row_pairs")) {
    const Json& rp = j["row_pairs"];
    if (!rp.is_array()) bad("row_pairs: expected an array of pairs");
    for (const Json& p : rp) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() ||
          !p[1].is_number_integer())
        bad("row_pairs: each entry must be [upper, lower]");
      inst.row_pairs.emplace_back(p[0].get<int>(), p[1].get<int>());
    }
  }
  const Json& subs = field(j, "subsystems", "top level");
  if (!subs.is_array()) bad("subsystems: expected an array");
  int i = 0;
  for (const Json& js : subs)
    inst.subsystems.push_back(subsystem_from_json(js, "subsystems[" + std::to_string(i++) + "]"));
  return inst;
}

Instance load_instance(const std::string& path) {
  const std::string text = read_text_file(path);
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
  try {
    return instance_from_json(j);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

void save_instance(const Instance& inst, const std::string& path) {
  write_text_file(path, instance_to_json(inst).dump(2) + "\n");
}

std::string instance_digest(const Instance& inst) {
  return hex64(fnv1a64(instance_to_json(inst).dump()));
}

void write_trace_csv(const DualTrace& trace, std::ostream& out) {
  out << "iteration,dual_value,max_violation,step\n";
  for (std::size_t i = 0; i < trace.value.size(); ++i) {
    out << i << ',' << format_full(trace.value[i]) << ',' << format_full(trace.max_violation[i])
        << ',' << format_full(trace.step[i]) << '\n';
  }
}

Json fleet_sidecar_json(const FleetInfo& info) {
  const FleetParams& p = info.params;
  Json j;
  j["n_pevs"] = p.n_pevs;
  j["seed"] = p.seed;
  j["v2g"] = p.v2g;
  j["steps"] = p.steps;
  j["dt_hours"] = p.dt_hours;
  j["power_kw"] = Json::array({p.power_lo_kw, p.power_hi_kw});
  j["e_max_kwh"] = Json::array({p.e_max_lo_kwh, p.e_max_hi_kwh});
  j["e_min_kwh"] = p.e_min_kwh;
  j["e_init_frac"] = Json::array({p.e_init_frac_lo, p.e_init_frac_hi});
  j["e_ref_frac"] = Json::array({p.e_ref_frac_lo, p.e_ref_frac_hi});
  j["loss"] = Json::array({p.loss_lo, p.loss_hi});
  j["price"] = Json::array({p.price_lo, p.price_hi});
  j["discharge_price_factor"] = p.discharge_price_factor;
  j["delta_mag"] = p.delta_mag;
  j["cap_per_pev_kw"] = p.cap_per_pev_kw;
  j["price_u"] = vec_to_json(info.price_u);
  j["price_v"] = vec_to_json(info.price_v);
  j["resampled"] = info.resampled;
  j["spread_schedulable"] = info.spread_schedulable;
  return j;
}

void validate_run_report(const Json& j) {
  expect(j.is_object(), "report must be an object");
  expect(j.contains("instance") && j["instance"].is_string(), "instance digest string");
  expect(j.contains("config") && j["config"].is_object(), "config object");
  expect(j.contains("dual_bound") && j["dual_bound"].is_number(), "dual_bound number");
  expect(j.contains("objective") && (j["objective"].is_number() || j["objective"].is_null()),
         "objective number or null");
  expect(j.contains("gap_percent") && (j["gap_percent"].is_number() || j["gap_percent"].is_null()),
         "gap_percent number or null");
  expect(j.contains("feasible") && j["feasible"].is_boolean(), "feasible flag");
  expect(j.contains("wall_time_s") && j["wall_time_s"].is_number(), "wall_time_s number");
  expect(j.contains("iterations") && j["iterations"].is_number_integer(), "iterations count");
}

void validate_certificate(const Json& j) {
  expect(j.is_object(), "certificate must be an object");
  expect(j.contains("dual_bound") && j["dual_bound"].is_number(), "dual_bound number");
  expect(j.contains("objective") && j["objective"].is_number(), "objective number");
  expect(j.contains("gap") && j["gap"].is_number(), "gap number");
  expect(j.contains("bounds") && j["bounds"].is_object(), "bounds object");
  expect(j.contains("coincidence") && j["coincidence"].is_object(), "coincidence object");
}

Json error_json(const std::string& kind, const std::string& message) {
  return Json{{"error", Json{{"kind", kind}, {"message", message}}}};
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw SolverError("cannot write " + path);
  out << text;
  if (!out) throw SolverError("short write to " + path);
}

}  // namespace rcsolve
