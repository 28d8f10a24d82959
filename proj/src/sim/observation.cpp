#include "levelk/sim/observation.hpp"

#include "levelk/core/errors.hpp"

#include <algorithm>
#include <cmath>

namespace levelk::sim {

namespace {

Lane other_lane(Lane lane) { return lane == Lane::Main ? Lane::Ramp : Lane::Main; }

double clip(double value, double lo, double hi) { return std::clamp(value, lo, hi); }

}  // namespace

Surroundings observe(std::span<const VehicleState> vehicles, std::size_t self,
                     const EnvConfig& config) {
  if (self >= vehicles.size()) throw ContractViolation("observer index out of range");
  const VehicleState& me = vehicles[self];
  const double len = config.road.car_length;

  Surroundings s;
  s.speed = me.v;
  s.lane = me.lane;
  s.dist_to_merge_end = config.road.merge_end_x - me.x;
  s.in_merge_region = config.road.in_merge_region(me.x);
  s.front_center.rel_v = config.v_max;
  s.front_side.rel_v = config.v_max;
  s.rear_side.rel_v = -config.v_max;

  const VehicleState* fc = nullptr;
  const VehicleState* fs = nullptr;
  const VehicleState* rs = nullptr;
  const Lane adjacent = other_lane(me.lane);

  for (std::size_t i = 0; i < vehicles.size(); ++i) {
    if (i == self) continue;
    const VehicleState& o = vehicles[i];
    if (o.lane == me.lane) {
      if (o.x >= me.x && (fc == nullptr || o.x < fc->x)) fc = &o;
    } else if (o.lane == adjacent && s.in_merge_region) {
      if (o.x > me.x - len) {
        if (fs == nullptr || o.x < fs->x) fs = &o;
      } else if (rs == nullptr || o.x > rs->x) {
        rs = &o;
      }
    }
  }

  if (fc != nullptr) s.front_center = {std::max(0.0, fc->x - me.x - len), fc->v - me.v, true};
  if (fs != nullptr) s.front_side = {std::max(0.0, fs->x - me.x - len), fs->v - me.v, true};
  if (rs != nullptr) s.rear_side = {std::max(0.0, me.x - rs->x - len), rs->v - me.v, true};
  return s;
}

Observation normalize(const Surroundings& s, const EnvConfig& config) {
  const double d_far = config.d_far;
  const double v_max = config.v_max;
  auto gap = [&](const Neighbor& n) { return clip(n.gap, 0.0, d_far) / d_far; };
  auto rel = [&](const Neighbor& n) { return clip(n.rel_v / v_max, -1.0, 1.0); };

  Observation o;
  o.fc_v = rel(s.front_center);
  o.fc_d = gap(s.front_center);
  o.fs_v = rel(s.front_side);
  o.fs_d = gap(s.front_side);
  o.rs_v = rel(s.rear_side);
  o.rs_d = gap(s.rear_side);
  o.d_e = clip(s.dist_to_merge_end / config.road.merge_length(), -1.0, 1.0);
  o.v_x = clip(s.speed / v_max, 0.0, 1.0);
  o.l = s.lane == Lane::Main ? 1.0 : 0.0;
  return o;
}

}  // namespace levelk::sim
