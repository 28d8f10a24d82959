#pragma once

#include <cstdint>

namespace levelk::sim {

/// Road layout along the longitudinal axis. The main road spans
/// [0, main_road_length]; the ramp runs from ramp_start_x to merge_end_x,
/// where it ends at a barrier.
struct RoadGeometry {
  double main_road_length = 305.0;
  double ramp_start_x = 75.0;
  double merge_start_x = 115.0;
  double merge_end_x = 260.0;
  double post_merge_length = 45.0;
  double lane_width = 3.7;
  double car_length = 5.0;
  double car_width = 2.0;

  double merge_length() const { return merge_end_x - merge_start_x; }
  bool in_merge_region(double x) const { return x >= merge_start_x && x <= merge_end_x; }

  void validate() const;
};

/// Weights of the six reward terms (collision, headway, velocity, effort,
/// not-merging, stopping).
struct RewardWeights {
  double collision = 100.0;
  double headway = 1.0;
  double velocity = 1.0;
  double effort = 0.5;
  double not_merging = 0.5;
  double stopping = 1.0;

  void validate() const;
};

struct EnvConfig {
  RoadGeometry road;
  int n_vehicles = 4;  // including the ego
  double dt = 0.5;
  double v_nom = 9.78;
  double v_max = 29.16;
  double d_close = 3.0;
  double d_nom = 13.0;
  double d_far = 23.0;
  int max_ramp_cars = 7;
  double respawn_prob = 0.7;
  double main_lane_prob = 0.7;
  double ego_ramp_prob = 0.5;
  /// Minimum same-lane center distance at placement (two car lengths).
  double min_spacing = 10.0;
  /// Closest admissible initial ramp position, measured back from merge end.
  double ramp_standoff = 23.0;
  /// Half-width of the uniform initial-velocity band around v_nom.
  double init_speed_spread = 2.0;
  int max_steps = 200;
  RewardWeights reward_weights;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

}  // namespace levelk::sim
