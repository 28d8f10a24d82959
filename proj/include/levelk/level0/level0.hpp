#pragma once

#include "levelk/core/rng.hpp"
#include "levelk/core/types.hpp"
#include "levelk/sim/config.hpp"
#include "levelk/sim/observation.hpp"

namespace levelk::level0 {

struct Level0Params {
  double ttc_hard_decel = 4.0;  // s
  double ttc_decel = 7.0;       // s
  double epsilon = 0.01;
  double d_close = 3.0;
  double d_far = 23.0;
  double v_nom = 9.78;
  double merge_length = 145.0;
  /// Below this distance to the merge end a ramp vehicle slows towards the
  /// position-proportional target speed.
  double creep_distance = 10.0;

  static Level0Params from_env(const sim::EnvConfig& config);
  void validate() const;
};

/// Urgency of merging: 0 at the start of the merging region growing
/// quadratically to 1 at its end. Clipped to [0, 1].
double proximity_weight(double dist_to_merge_end, double merge_length);

/// Ramp policy. gate_draw is the U(0,1) draw of the stochastic merge gate;
/// it is only consulted inside the merging region.
DriveAction ramp_action(const sim::Surroundings& s, const Level0Params& p, double gate_draw);

/// Main-road policy; deterministic.
DriveAction main_action(const sim::Surroundings& s, const Level0Params& p);

/// Lane dispatch. Draws the merge-gate variable only for ramp vehicles inside
/// the merging region.
DriveAction act(const sim::Surroundings& s, const Level0Params& p, RandomStream& rng);

}  // namespace levelk::level0
