#pragma once

#include "levelk/core/types.hpp"
#include "levelk/sim/config.hpp"
#include "levelk/sim/vehicle.hpp"

#include <array>
#include <limits>
#include <span>

namespace levelk::sim {

inline constexpr int kObservationSize = 9;

/// A neighbouring vehicle as seen from the observer: bumper-to-bumper gap
/// (m, non-negative) and relative velocity v_other - v_self (m/s).
struct Neighbor {
  double gap = std::numeric_limits<double>::infinity();
  double rel_v = 0.0;
  bool present = false;
};

/// Metric view of a vehicle's neighbourhood. Gaps are not clipped, absent
/// vehicles carry an infinite gap. Absent front vehicles report
/// rel_v = +v_max and an absent rear vehicle rel_v = -v_max, so they read
/// as "no threat" to the rule-based policies.
struct Surroundings {
  Neighbor front_center;
  Neighbor front_side;
  Neighbor rear_side;
  double dist_to_merge_end = 0.0;  // merge_end_x - x, m, may be negative
  double speed = 0.0;
  Lane lane = Lane::Main;
  bool in_merge_region = false;
};

/// Normalized observation fed to the Q-networks.
struct Observation {
  double fc_v = 1.0;
  double fc_d = 1.0;
  double fs_v = 1.0;
  double fs_d = 1.0;
  double rs_v = -1.0;
  double rs_d = 1.0;
  double d_e = 0.0;
  double v_x = 0.0;
  double l = 1.0;

  std::array<double, kObservationSize> to_array() const {
    return {fc_v, fc_d, fs_v, fs_d, rs_v, rs_d, d_e, v_x, l};
  }
  static Observation from_array(const std::array<double, kObservationSize>& a) {
    return {a[0], a[1], a[2], a[3], a[4], a[5], a[6], a[7], a[8]};
  }
  friend bool operator==(const Observation&, const Observation&) = default;
};

/// Front-center, front-side and rear-side neighbours of vehicles[self].
/// Side neighbours exist only while the observer is inside the merging
/// region. The front-side slot takes the rearmost adjacent vehicle that is
/// ahead or overlapping; the rear-side slot the frontmost one strictly behind.
Surroundings observe(std::span<const VehicleState> vehicles, std::size_t self,
                     const EnvConfig& config);

Observation normalize(const Surroundings& s, const EnvConfig& config);

}  // namespace levelk::sim
