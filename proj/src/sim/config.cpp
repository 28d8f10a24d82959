#include "levelk/sim/config.hpp"

#include "levelk/core/errors.hpp"

#include <cmath>
#include <string>

namespace levelk::sim {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

bool probability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

void RoadGeometry::validate() const {
  require(main_road_length > 0 && ramp_start_x >= 0 && lane_width > 0 && car_length > 0 &&
              car_width > 0 && post_merge_length > 0,
          "road lengths must be positive");
  require(ramp_start_x <= merge_start_x && merge_start_x < merge_end_x,
          "ramp start <= merge start < merge end required");
  require(std::abs(merge_end_x + post_merge_length - main_road_length) < 1e-9,
          "merge end + post-merge length must equal the main road length");
}

void RewardWeights::validate() const {
  for (double w : {collision, headway, velocity, effort, not_merging, stopping}) {
    require(std::isfinite(w), "reward weights must be finite");
  }
}

void EnvConfig::validate() const {
  road.validate();
  reward_weights.validate();
  require(n_vehicles >= 1, "n_vehicles must be >= 1");
  require(dt > 0, "dt must be positive");
  require(v_nom > 0 && v_max > v_nom, "0 < v_nom < v_max required");
  require(0 < d_close && d_close < d_nom && d_nom < d_far, "0 < d_close < d_nom < d_far required");
  require(max_ramp_cars >= 0, "max_ramp_cars must be >= 0");
  require(probability(respawn_prob) && probability(main_lane_prob) && probability(ego_ramp_prob),
          "probabilities must lie in [0, 1]");
  require(min_spacing >= road.car_length, "min_spacing must be at least one car length");
  require(ramp_standoff >= 0 && ramp_standoff < road.merge_length(), "invalid ramp stand-off");
  require(init_speed_spread >= 0 && init_speed_spread < v_nom, "invalid initial speed spread");
  require(max_steps > 0, "max_steps must be positive");
}

}  // namespace levelk::sim
