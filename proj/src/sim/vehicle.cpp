#include "levelk/sim/vehicle.hpp"

#include "levelk/core/errors.hpp"

#include <algorithm>
#include <string>

namespace levelk::sim {

namespace {

constexpr double kMaintainScale = 0.1;
constexpr double kExpRate = 0.75;

}  // namespace

AccelerationBounds acceleration_bounds(DriveAction action) {
  switch (action) {
    case DriveAction::Maintain: return {-0.25, 0.25};
    case DriveAction::Accelerate: return {0.25, 2.0};
    case DriveAction::Decelerate: return {-2.0, -0.25};
    case DriveAction::HardAccelerate: return {2.0, 3.0};
    case DriveAction::HardDecelerate: return {-4.5, -2.0};
    case DriveAction::Merge: break;
  }
  throw ContractViolation("merge has no acceleration interval");
}

double sample_acceleration(DriveAction action, RandomStream& rng) {
  const auto [lo, hi] = acceleration_bounds(action);
  switch (action) {
    case DriveAction::Maintain:
      return std::clamp(rng.laplace(0.0, kMaintainScale), lo, hi);
    case DriveAction::Accelerate:
    case DriveAction::HardAccelerate:
      return std::clamp(lo + rng.exponential(kExpRate), lo, hi);
    case DriveAction::Decelerate:
    case DriveAction::HardDecelerate:
      // mirrored: starts at the upper (less negative) edge
      return std::clamp(hi - rng.exponential(kExpRate), lo, hi);
    case DriveAction::Merge: break;
  }
  throw ContractViolation("merge has no acceleration");
}

VehicleState step_kinematics(const VehicleState& state, double accel, double dt, double v_max) {
  if (!(dt > 0.0)) throw ContractViolation("dt must be positive");
  VehicleState next = state;
  const double v_end = state.v + accel * dt;
  if (v_end < 0.0) {
    // stops before the end of the step
    const double t_stop = state.v / -accel;
    next.x = state.x + state.v * t_stop + 0.5 * accel * t_stop * t_stop;
    next.v = 0.0;
    return next;
  }
  next.x = state.x + state.v * dt + 0.5 * accel * dt * dt;
  next.v = std::min(v_end, v_max);
  return next;
}

VehicleState apply_merge(const VehicleState& state, const RoadGeometry& road, double dt,
                         double v_max) {
  if (state.lane != Lane::Ramp) {
    throw ContractViolation("merge requested for vehicle " + std::to_string(state.id) +
                            " which is not on the ramp");
  }
  if (!road.in_merge_region(state.x)) {
    throw ContractViolation("merge requested outside the merging region at x=" +
                            std::to_string(state.x));
  }
  VehicleState next = step_kinematics(state, 0.0, dt, v_max);
  next.lane = Lane::Main;
  return next;
}

double ramp_speed_profile(double x0, double v_nom, const RoadGeometry& road) {
  const double remaining = (road.merge_end_x - x0) / road.merge_length();
  return v_nom * (0.5 + 0.5 * remaining);
}

double initial_ramp_velocity(double x0, double z, const EnvConfig& config) {
  const RoadGeometry& road = config.road;
  if (x0 < road.merge_start_x || x0 > road.merge_end_x - config.ramp_standoff) {
    throw ContractViolation("initial ramp position outside the admissible band: x0=" +
                            std::to_string(x0));
  }
  return std::max(0.0, ramp_speed_profile(x0, config.v_nom, road) + z);
}

double initial_ramp_velocity(double x0, const EnvConfig& config, RandomStream& rng) {
  const double z = rng.uniform(-config.init_speed_spread, config.init_speed_spread);
  return initial_ramp_velocity(x0, z, config);
}

}  // namespace levelk::sim
