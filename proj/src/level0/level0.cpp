#include "levelk/level0/level0.hpp"

#include "levelk/core/errors.hpp"

#include <algorithm>

namespace levelk::level0 {

Level0Params Level0Params::from_env(const sim::EnvConfig& config) {
  Level0Params p;
  p.d_close = config.d_close;
  p.d_far = config.d_far;
  p.v_nom = config.v_nom;
  p.merge_length = config.road.merge_length();
  return p;
}

void Level0Params::validate() const {
  if (!(0 < ttc_hard_decel && ttc_hard_decel < ttc_decel)) {
    throw ConfigError("0 < ttc_hard_decel < ttc_decel required");
  }
  if (!(epsilon > 0)) throw ConfigError("level-0 epsilon must be positive");
  if (!(merge_length > 0)) throw ConfigError("merge length must be positive");
}

double proximity_weight(double dist_to_merge_end, double merge_length) {
  if (!(merge_length > 0)) throw ContractViolation("merge length must be positive");
  const double f = std::clamp((merge_length - dist_to_merge_end) / merge_length, 0.0, 1.0);
  return f * f;
}

namespace {

bool in_region(const sim::Surroundings& s, const Level0Params& p) {
  return s.dist_to_merge_end >= 0.0 && s.dist_to_merge_end <= p.merge_length;
}

// Time-to-collision of the front-center vehicle, with the closing speed
// bounded away from zero.
double front_ttc(const sim::Surroundings& s, const Level0Params& p) {
  const double closing = std::min(s.front_center.rel_v, -p.epsilon);
  return -s.front_center.gap / closing;
}

bool merge_gap_open(const sim::Surroundings& s, const Level0Params& p) {
  const double fs_gap = s.front_side.gap;
  const double fs_close = s.front_side.rel_v > 0 ? p.epsilon : std::max(-s.front_side.rel_v, p.epsilon);
  const bool front_ok =
      (fs_gap / fs_close >= p.ttc_hard_decel && fs_gap > p.d_close) || fs_gap > p.d_far;
  if (!front_ok) return false;

  const double rs_gap = s.rear_side.gap;
  const double rs_close = s.rear_side.rel_v < 0 ? p.epsilon : std::max(s.rear_side.rel_v, p.epsilon);
  return (rs_gap / rs_close >= p.ttc_hard_decel && rs_gap > p.d_close) ||
         rs_gap > 1.5 * p.d_far;
}

}  // namespace

DriveAction ramp_action(const sim::Surroundings& s, const Level0Params& p, double gate_draw) {
  const double d_e = s.dist_to_merge_end;
  if (in_region(s, p)) {
    const bool gate = gate_draw < proximity_weight(d_e, p.merge_length) || d_e < p.d_far;
    if (gate && merge_gap_open(s, p)) return DriveAction::Merge;
  }

  const double fc_gap = s.front_center.gap;
  const double ttc = front_ttc(s, p);
  const double v_target = p.v_nom * d_e / p.merge_length;
  if ((ttc <= p.ttc_hard_decel && fc_gap > p.d_close) || fc_gap <= p.d_close) {
    return DriveAction::HardDecelerate;
  }
  if ((ttc <= p.ttc_decel && fc_gap > p.d_close) ||
      (d_e < p.creep_distance && s.speed > v_target)) {
    return DriveAction::Decelerate;
  }
  if (d_e >= p.d_far && fc_gap > p.d_close && s.front_center.rel_v > p.epsilon) {
    return DriveAction::Accelerate;
  }
  return DriveAction::Maintain;
}

DriveAction main_action(const sim::Surroundings& s, const Level0Params& p) {
  const double fc_gap = s.front_center.gap;
  const double ttc = front_ttc(s, p);
  if ((ttc <= p.ttc_hard_decel && fc_gap > p.d_close) || fc_gap <= p.d_close) {
    return DriveAction::HardDecelerate;
  }
  if (ttc <= p.ttc_decel && fc_gap > p.d_close) return DriveAction::Decelerate;
  if (fc_gap > p.d_close && s.front_center.rel_v > p.epsilon &&
      (s.speed < p.v_nom || s.dist_to_merge_end < 0.0)) {
    return DriveAction::Accelerate;
  }
  return DriveAction::Maintain;
}

DriveAction act(const sim::Surroundings& s, const Level0Params& p, RandomStream& rng) {
  if (s.lane == Lane::Main) return main_action(s, p);
  const double draw = in_region(s, p) ? rng.uniform() : 1.0;
  return ramp_action(s, p, draw);
}

}  // namespace levelk::level0
