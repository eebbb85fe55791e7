#include "rcsolve/pev.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "rcsolve/inner.hpp"

namespace rcsolve {

namespace {

const PevBattery& battery_of(const Subsystem& s) {
  const auto* b = std::get_if<PevBattery>(&s.shape);
  if (!b) throw InputError("fleet operation on a non-battery subsystem");
  return *b;
}

}  // namespace

Matrix pev_coupling_block(const PevBattery& b) {
  const int n = b.steps;
  Matrix h = Matrix::Zero(2 * n, b.dim());
  for (int k = 0; k < n; ++k) {
    h(k, k) = b.power_kw;       // aggregate charging draw, upper cap row
    h(n + k, k) = -b.power_kw;  // mirrored lower cap row
    if (b.v2g) {
      h(k, n + k) = -b.power_kw;
      h(n + k, n + k) = b.power_kw;
    }
  }
  return h;
}

Fleet generate_fleet(const FleetParams& params) {
  if (params.n_pevs <= 0 || params.steps <= 0) throw InputError("empty fleet");
  Fleet fleet;
  fleet.info.params = params;
  std::mt19937_64 rng(params.seed);
  auto uni = [&rng](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };

  const int n = params.steps;
  fleet.info.price_u.resize(n);
  for (int k = 0; k < n; ++k) fleet.info.price_u[k] = uni(params.price_lo, params.price_hi);
  fleet.info.price_v = params.discharge_price_factor * fleet.info.price_u;

  Instance& inst = fleet.instance;
  inst.subsystems.reserve(params.n_pevs);
  for (int i = 0; i < params.n_pevs; ++i) {
    PevBattery b;
    b.steps = n;
    b.dt_hours = params.dt_hours;
    b.v2g = params.v2g;
    b.e_min_kwh = params.e_min_kwh;
    while (true) {
      b.power_kw = uni(params.power_lo_kw, params.power_hi_kw);
      b.e_max_kwh = uni(params.e_max_lo_kwh, params.e_max_hi_kwh);
      b.e_init_kwh = uni(params.e_init_frac_lo, params.e_init_frac_hi) * b.e_max_kwh;
      b.e_ref_kwh = uni(params.e_ref_frac_lo, params.e_ref_frac_hi) * b.e_max_kwh;
      b.loss = uni(params.loss_lo, params.loss_hi);
      try {
        charge_slot_bounds(b);
        break;
      } catch (const InfeasibleError&) {
        ++fleet.info.resampled;  // battery cannot reach its target; redraw
      }
    }
    b.delta_u.resize(n);
    for (int k = 0; k < n; ++k) b.delta_u[k] = uni(-params.delta_mag, params.delta_mag);
    if (params.v2g) {
      b.delta_v.resize(n);
      for (int k = 0; k < n; ++k) b.delta_v[k] = uni(-params.delta_mag, params.delta_mag);
    }

    Subsystem s;
    s.cost.resize(b.dim());
    for (int k = 0; k < n; ++k) {
      s.cost[k] = b.power_kw * (fleet.info.price_u[k] + b.delta_u[k]);
      if (params.v2g) s.cost[n + k] = -b.power_kw * (fleet.info.price_v[k] + b.delta_v[k]);
    }
    s.coupling = pev_coupling_block(b);
    s.shape = std::move(b);
    inst.subsystems.push_back(std::move(s));
  }

  const double cap = params.cap_per_pev_kw * params.n_pevs;
  inst.resource.resize(2 * n);
  inst.resource.head(n).setConstant(cap);   // sum P_i (u - v) <= cap
  inst.resource.tail(n).setConstant(cap);   // -(sum P_i (u - v)) <= cap, i.e. >= -cap
  inst.row_pairs.reserve(n);
  for (int k = 0; k < n; ++k) inst.row_pairs.emplace_back(k, n + k);

  // Generation-time probe: does the mandatory demand fit under the
  // contracted cap when spread evenly?
  const Vector rho = pev_contraction(inst);
  const double contracted_cap = cap - rho[0];
  Vector load = Vector::Zero(n);
  for (const Subsystem& s : inst.subsystems) {
    const PevBattery& b = battery_of(s);
    const int k_min = charge_slot_bounds(b).first;
    for (int c = 0; c < k_min; ++c) {
      Index slot;
      load.minCoeff(&slot);
      load[slot] += b.power_kw;
    }
  }
  fleet.info.spread_schedulable = load.maxCoeff() <= contracted_cap + kFeasibilityTol;
  return fleet;
}

Vector pev_contraction(const Instance& inst) {
  if (inst.subsystems.empty()) throw InputError("empty fleet");
  double max_p = 0.0;
  bool v2g = false;
  for (const Subsystem& s : inst.subsystems) {
    const PevBattery& b = battery_of(s);
    max_p = std::max(max_p, b.power_kw);
    v2g = v2g || b.v2g;
  }
  const int n = battery_of(inst.subsystems.front()).steps;
  const double rho = (v2g ? 2.0 : 1.0) * n * max_p;
  return Vector::Constant(inst.rows(), rho);
}

Assignment pev_slater_point(const Instance& inst) {
  const int n = battery_of(inst.subsystems.front()).steps;
  Vector load = Vector::Zero(n);
  Assignment asg(inst.subsystems.size());
  for (Index i = 0; i < inst.size(); ++i) {
    const PevBattery& b = battery_of(inst.subsystems[i]);
    asg[i] = Vector::Zero(b.dim());
    const int k_min = charge_slot_bounds(b).first;
    for (int c = 0; c < k_min; ++c) {
      // Cheapest-loaded step not already used by this vehicle.
      Index slot = -1;
      for (Index k = 0; k < n; ++k)
        if (asg[i][k] == 0.0 && (slot < 0 || load[k] < load[slot])) slot = k;
      asg[i][slot] = 1.0;
      load[slot] += b.power_kw;
    }
  }
  return asg;
}

}  // namespace rcsolve
