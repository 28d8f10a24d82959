#include "levelk/sim/reward.hpp"

namespace levelk::sim {

double headway_term(double fc_gap, const EnvConfig& config) {
  const double d_close = config.d_close;
  const double d_nom = config.d_nom;
  const double d_far = config.d_far;
  if (fc_gap <= d_close) return -1.0;
  if (fc_gap <= d_nom) return (fc_gap - d_nom) / (d_nom - d_close);
  if (fc_gap <= d_far) return (fc_gap - d_nom) / (d_far - d_nom);
  return 1.0;
}

double velocity_term(double speed, const EnvConfig& config) {
  if (speed <= config.v_nom) return (speed - config.v_nom) / config.v_nom;
  return (config.v_max - speed) / (config.v_max - config.v_nom);
}

double effort_term(DriveAction action, double speed, const EnvConfig& config) {
  if (speed < 0.5 * config.v_nom) return 0.0;
  switch (action) {
    case DriveAction::Accelerate:
    case DriveAction::Decelerate: return -0.25;
    case DriveAction::HardAccelerate:
    case DriveAction::HardDecelerate: return -1.0;
    default: return 0.0;
  }
}

double stopping_term(const Surroundings& s, DriveAction action, const EnvConfig& config) {
  const double d_far = config.d_far;
  if (s.lane == Lane::Main) {
    const bool clear = s.front_center.gap >= d_far && s.dist_to_merge_end >= d_far;
    return action != DriveAction::HardAccelerate && clear ? -1.0 : 0.0;
  }
  const bool merge_gap_open = s.in_merge_region && s.front_side.gap >= config.d_close &&
                              s.rear_side.gap >= 1.5 * d_far;
  if (action != DriveAction::Merge && merge_gap_open) return -1.0;
  if (s.dist_to_merge_end <= d_far) return -0.05;
  return 0.0;
}

RewardTerms reward_terms(const Surroundings& s, DriveAction action, CollisionType collision,
                         const EnvConfig& config) {
  RewardTerms t;
  t.collision = collision == CollisionType::None ? 0.0 : -1.0;
  t.headway = headway_term(s.front_center.gap, config);
  t.velocity = velocity_term(s.speed, config);
  t.effort = effort_term(action, s.speed, config);
  t.not_merging = s.lane == Lane::Ramp ? -1.0 : 0.0;
  t.stopping = stopping_term(s, action, config);
  return t;
}

double compute_reward(const RewardTerms& t, const RewardWeights& w) {
  return t.collision * w.collision + t.headway * w.headway + t.velocity * w.velocity +
         t.effort * w.effort + t.not_merging * w.not_merging + t.stopping * w.stopping;
}

}  // namespace levelk::sim
