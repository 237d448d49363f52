// SPDX-License-Identifier: Apache-2.0
//
// Telemetry of the three measured instances of the factory trial, per WAT,
// with the LB and SD target outcomes. Delays reported as ">100" use the
// 100 ms reporting cap.
#pragma once

#include <array>

#include <atsss/steering.hpp>

namespace atsss::testdata {

struct Telemetry {
  double sinr_db;
  double buffer_pct;
  double delay_ms;
};

struct Instance {
  PerWat<int> cell_id;
  PerWat<double> rsrp_dbm;
  PerWat<Telemetry> lb;
  PerWat<Telemetry> sd;
  PerWat<double> lb_weights;   ///< measured, percent
  PerWat<bool> sd_selection;   ///< measured
};

inline constexpr double kCappedDelay = 100.0;

template <typename T>
PerWat<T> per_wat(T five_g, T wifi, T lifi) {
  return PerWat<T>{{five_g, wifi, lifi}};
}

inline const std::array<Instance, 3>& table1() {
  using T = Telemetry;
  static const std::array<Instance, 3> data{{
      {per_wat(1, 1, 4),
       per_wat(-77.0, -101.0, -100.0),
       per_wat(T{29, 8, 14}, T{9, 27, 6}, T{9, 8, 2}),
       per_wat(T{29, 17, 18}, T{9, 64, 9}, T{9, 8, 2}),
       per_wat(49.0, 22.0, 29.0),
       per_wat(true, true, true)},
      {per_wat(3, 2, 15),
       per_wat(-102.0, -99.0, -102.0),
       per_wat(T{4, 9, kCappedDelay}, T{10, 51, 3}, T{5, 7, kCappedDelay}),
       per_wat(T{4, 14, 89}, T{10, 65, 10}, T{5, 8, kCappedDelay}),
       per_wat(50.0, 0.0, 50.0),
       per_wat(false, true, false)},
      {per_wat(6, 4, 37),
       per_wat(-90.0, -79.0, -100.0),
       per_wat(T{16, 10, 41}, T{30, 68, 3}, T{10, 10, 3}),
       per_wat(T{16, 21, 26}, T{30, 100, 4}, T{10, 7, 2}),
       per_wat(23.0, 48.0, 28.0),
       per_wat(false, true, true)},
  }};
  return data;
}

inline PerWat<steering::TelemetrySample> samples(const Instance& inst, bool sd) {
  PerWat<steering::TelemetrySample> out;
  for (Wat w : kAllWats) {
    const auto& t = sd ? inst.sd[w] : inst.lb[w];
    out[w] = steering::TelemetrySample{w, inst.cell_id[w], inst.rsrp_dbm[w], t.sinr_db, t.buffer_pct, t.delay_ms, 0.0};
  }
  return out;
}

}  // namespace atsss::testdata
