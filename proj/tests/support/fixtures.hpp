#pragma once

// Shared hand-checkable instances. All golden numbers below were derived by
// direct enumeration of the subsystem point sets.

#include <utility>
#include <vector>

#include "rcsolve/model.hpp"

namespace rcsolve::testing {

inline Subsystem lattice_sub(Matrix a, Vector d, IntVector lower, IntVector upper, Vector cost,
                             Matrix coupling) {
  Subsystem s;
  LatticePolytope p;
  p.a = std::move(a);
  p.d = std::move(d);
  p.lower = std::move(lower);
  p.upper = std::move(upper);
  s.shape = std::move(p);
  s.cost = std::move(cost);
  s.coupling = std::move(coupling);
  return s;
}

inline Matrix mat2(double a00, double a01, double a10, double a11) {
  Matrix m(2, 2);
  m << a00, a01, a10, a11;
  return m;
}

inline Vector vec2(double x, double y) {
  Vector v(2);
  v << x, y;
  return v;
}

inline IntVector ivec2(int x, int y) {
  IntVector v(2);
  v << x, y;
  return v;
}

inline Matrix row2(double x, double y) {
  Matrix m(1, 2);
  m << x, y;
  return m;
}

// Four integer subsystems coupled by one row, b = 11.1.
//   point counts 5 / 3 / 7 / 6, optimum -7 at ((0,0),(2,0),(0,0),(1,0)),
//   dual optimum lambda* = 0.4 with value -7.64,
//   inner sets at lambda*: {(0,0)}, {(0,0),(2,0)}, {(0,1)}, {(1,0)},
//   cost spreads gamma = (2,4,2,4).
inline Instance small_coupled_instance() {
  Instance inst;
  inst.resource = Vector::Constant(1, 11.1);
  inst.subsystems.push_back(lattice_sub(mat2(0, 1, 1, 1), vec2(1.2, 2.1), ivec2(0, 0),
                                        ivec2(2, 1), vec2(1, 1), row2(1, 1)));
  inst.subsystems.push_back(lattice_sub(mat2(0, 1, 1, 0), vec2(0.6, 2.1), ivec2(0, 0),
                                        ivec2(2, 0), vec2(-2, 1), row2(5, 1)));
  inst.subsystems.push_back(lattice_sub(mat2(1, 0, -0.5, 1), vec2(2.2, 1.1), ivec2(0, 0),
                                        ivec2(2, 2), vec2(0.5, -1), row2(1, 1)));
  inst.subsystems.push_back(lattice_sub(mat2(1, 0, 0, 1), vec2(1.2, 2.0), ivec2(0, 0),
                                        ivec2(1, 2), vec2(-3, 0.5), row2(1, 1)));
  return inst;
}

// Four identical box subsystems {0..3} x {0,1}, one row, b = 6. The convex
// relaxation has many optima, so the vertex-agreement property fails without
// a cost perturbation: inner sets at lambda* = 1 are {(0,0),(3,0)} for every
// subsystem while the relaxation can sit anywhere on the segment.
inline Instance symmetric_tie_instance() {
  Instance inst;
  inst.resource = Vector::Constant(1, 6.0);
  for (int i = 0; i < 4; ++i)
    inst.subsystems.push_back(lattice_sub(mat2(1, 0, 0, 1), vec2(3.2, 1.4), ivec2(0, 0),
                                          ivec2(3, 1), vec2(-1, 1), row2(1, 1)));
  return inst;
}

inline PevBattery test_battery(int steps, bool v2g) {
  PevBattery b;
  b.power_kw = 4.0;
  b.e_init_kwh = 4.0;
  b.e_ref_kwh = 8.0;
  b.e_min_kwh = 1.0;
  b.e_max_kwh = 16.0;
  b.loss = 0.04;  // charge step 1.28 kWh, discharge step 1.3867 kWh
  b.steps = steps;
  b.dt_hours = 1.0 / 3.0;
  b.v2g = v2g;
  return b;
}

inline Subsystem battery_sub(const PevBattery& b, Vector cost, Matrix coupling) {
  Subsystem s;
  s.shape = b;
  s.cost = std::move(cost);
  s.coupling = std::move(coupling);
  return s;
}

}  // namespace rcsolve::testing
