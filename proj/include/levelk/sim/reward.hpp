#pragma once

#include "levelk/core/types.hpp"
#include "levelk/sim/config.hpp"
#include "levelk/sim/observation.hpp"

namespace levelk::sim {

struct RewardTerms {
  double collision = 0.0;
  double headway = 0.0;
  double velocity = 0.0;
  double effort = 0.0;
  double not_merging = 0.0;
  double stopping = 0.0;

  friend bool operator==(const RewardTerms&, const RewardTerms&) = default;
};

/// Piecewise-linear headway score of the front-center gap: -1 at or below
/// d_close, 0 at d_nom, +1 at or above d_far.
double headway_term(double fc_gap, const EnvConfig& config);

/// Speed score: rises linearly from -1 at standstill to 0 at v_nom; above
/// v_nom it falls from 1 towards 0 at v_max.
double velocity_term(double speed, const EnvConfig& config);

double effort_term(DriveAction action, double speed, const EnvConfig& config);

/// Penalty for driving on while a stop-free option exists: on the main road
/// with a clear road ahead anything but HardAccelerate; on the ramp, not
/// merging while a merge gap is open, or a small penalty close to the barrier.
double stopping_term(const Surroundings& s, DriveAction action, const EnvConfig& config);

RewardTerms reward_terms(const Surroundings& s, DriveAction action, CollisionType collision,
                         const EnvConfig& config);

double compute_reward(const RewardTerms& terms, const RewardWeights& weights);

}  // namespace levelk::sim
