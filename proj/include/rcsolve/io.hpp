#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "rcsolve/dual.hpp"
#include "rcsolve/model.hpp"
#include "rcsolve/pev.hpp"

namespace rcsolve {

using Json = nlohmann::json;

// Instance documents:
//   {"resource": [...],
//    "row_pairs": [[upper, lower], ...],           // optional
//    "subsystems": [{"kind": "lattice"|"vertices"|"pev", "cost": [...], ...}]}
// Lattice subsystems carry "H", "lower", "upper" and optionally "A"/"d";
// vertex subsystems carry "H" and "points"; battery subsystems carry the
// physical parameters and their coupling block is rebuilt on load ("H" is
// written only when it differs from the canonical block).
Json instance_to_json(const Instance& inst);
Instance instance_from_json(const Json& j);  // throws InputError on bad structure

Instance load_instance(const std::string& path);  // parse errors -> InputError
void save_instance(const Instance& inst, const std::string& path);

// FNV-1a hash of the canonical serialization; stable across save/load.
std::string instance_digest(const Instance& inst);

// Columns: iteration,dual_value,max_violation,step
void write_trace_csv(const DualTrace& trace, std::ostream& out);

Json fleet_sidecar_json(const FleetInfo& info);

// Shape checks for the documents the CLI emits; throw SolverError so a
// malformed report can never be written silently.
void validate_run_report(const Json& j);
void validate_certificate(const Json& j);

Json error_json(const std::string& kind, const std::string& message);

std::string read_text_file(const std::string& path);  // throws InputError
void write_text_file(const std::string& path, const std::string& text);

}  // namespace rcsolve
