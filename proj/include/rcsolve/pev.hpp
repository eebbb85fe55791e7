#pragma once

#include <cstdint>

#include "rcsolve/model.hpp"

namespace rcsolve {

// Fleet-charging benchmark family. Every vehicle is one battery subsystem;
// the coupling limits aggregate charging power per time step from both
// sides, stored as N upper rows followed by N mirrored lower rows.

struct FleetParams {
  int n_pevs = 0;
  std::uint64_t seed = 0;
  bool v2g = false;
  int steps = 24;
  double dt_hours = 1.0 / 3.0;
  double power_lo_kw = 3.0, power_hi_kw = 5.0;
  double e_max_lo_kwh = 8.0, e_max_hi_kwh = 16.0;
  double e_min_kwh = 1.0;
  double e_init_frac_lo = 0.2, e_init_frac_hi = 0.5;
  double e_ref_frac_lo = 0.55, e_ref_frac_hi = 0.8;
  double loss_lo = 0.015, loss_hi = 0.075;
  double price_lo = 19.0, price_hi = 35.0;      // EUR/MWh
  double discharge_price_factor = 1.1;          // sell price = factor * buy price
  double delta_mag = 0.3;                       // per-vehicle per-step price noise
  double cap_per_pev_kw = 3.0;                  // aggregate limit = cap * fleet size
};

struct FleetInfo {
  FleetParams params;
  Vector price_u;  // instance-level buy price profile
  Vector price_v;  // sell price profile
  int resampled = 0;          // batteries redrawn because no schedule existed
  bool spread_schedulable = true;  // mandatory demand fits under the contracted cap
};

struct Fleet {
  Instance instance;
  FleetInfo info;
};

// Deterministic in params.seed; costs carry the per-vehicle noise already.
Fleet generate_fleet(const FleetParams& params);

// Canonical coupling block of one battery: rows 0..steps-1 cap the
// aggregate draw from above, rows steps..2*steps-1 are their negatives.
Matrix pev_coupling_block(const PevBattery& bat);

// Closed-form contraction for fleet instances: every row gets
// steps * max power (charge-only) or 2 * steps * max power (v2g).
Vector pev_contraction(const Instance& inst);

// Interior candidate: every vehicle charges its minimum slot count, slots
// assigned round-robin to the currently least-loaded steps.
Assignment pev_slater_point(const Instance& inst);

}  // namespace rcsolve
