#pragma once

#include "levelk/core/rng.hpp"
#include "levelk/core/types.hpp"
#include "levelk/sim/config.hpp"

namespace levelk::sim {

struct VehicleState {
  int id = 0;
  double x = 0.0;  // center position, m
  double v = 0.0;  // longitudinal speed, m/s
  Lane lane = Lane::Main;
  PolicyId policy = PolicyId::level(0);
};

struct AccelerationBounds {
  double lo;
  double hi;
};

/// Admissible acceleration interval of a longitudinal action.
AccelerationBounds acceleration_bounds(DriveAction action);

/// Realizes a longitudinal action as an acceleration (m/s^2). Each action's
/// base distribution is clipped into its interval. Throws ContractViolation
/// for Merge.
double sample_acceleration(DriveAction action, RandomStream& rng);

/// Constant-acceleration update over dt. Speed is clamped to [0, v_max]; when
/// the speed would go negative the vehicle stops within the step instead of
/// reversing.
VehicleState step_kinematics(const VehicleState& state, double accel, double dt, double v_max);

/// One-step merge from the ramp onto the main lane, with zero acceleration.
/// Requires a ramp vehicle inside the merging region.
VehicleState apply_merge(const VehicleState& state, const RoadGeometry& road, double dt,
                         double v_max);

/// Position-dependent speed profile used to seed ramp vehicles in the merging
/// region: v_nom at the region start falling linearly to v_nom/2 at its end.
double ramp_speed_profile(double x0, double v_nom, const RoadGeometry& road);

/// Initial speed of a ramp vehicle placed in the merging region, profile plus
/// a perturbation z, clamped at zero. x0 must lie in
/// [merge_start_x, merge_end_x - standoff].
double initial_ramp_velocity(double x0, double z, const EnvConfig& config);
double initial_ramp_velocity(double x0, const EnvConfig& config, RandomStream& rng);

}  // namespace levelk::sim
