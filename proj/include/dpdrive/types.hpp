#pragma once

#include <cstdint>
#include <string_view>

namespace dpdrive {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kGravity = 9.81;

constexpr double kmh_to_mps(double kmh) { return kmh / 3.6; }

enum class Role { kHost, kAgent };

std::string_view to_string(Role role);

// Kinematic truth for one vehicle. Positions are track-relative: s is
// arc length along the centerline, lateral is positive to the left of the
// travel direction, yaw_rel is vehicle heading minus track tangent at s.
struct VehicleState {
  double s = 0.0;
  double lateral = 0.0;
  double yaw_rel = 0.0;
  double speed = 0.0;
  double driven_wheel_speed = 0.0;
  double wheel_avg_speed = 0.0;
  std::int64_t damage = 0;
  Role role = Role::kAgent;
  // Distance driven since spawn; used by the curvature estimator and
  // run metrics.
  double odometer = 0.0;
};

// Effector outputs. steer is positive to the left.
struct ControlCommand {
  double steer = 0.0;  // [-1, 1]
  double accel = 0.0;  // [0, 1]
  double brake = 0.0;  // [0, 1]
};

struct VehicleGeometry {
  double length = 4.5;
  double width = 2.0;
  double wheelbase = 2.6;

  void validate() const;
};

// Controller constants. Defaults are the literals of the driving
// algorithms; the remaining knobs (offset_step, filter mixes, brake model,
// friction) have no published value and carry our own defaults.
struct ControllerParams {
  double steer_lock = 0.366;
  double lane_width = 4.0;
  double road_width = 13.0;
  double detect_range = 60.0;
  double near_threshold = 4.5;
  // A car up to this far behind also counts as alongside for lane choice.
  double rear_band = 12.0;
  double lateral_lane_threshold = 1.5;
  double occupancy_gap = 10.0;
  double tcs_slip = 2.0;
  double tcs_range = 10.0;
  double abs_speed = 3.0;
  double abs_slip = 2.0;
  double abs_range = 5.0;
  double offset_step = 0.08;
  // Lateral steady state of the steering law sits at offset / 2 inside the
  // middle band. At 2 * lane_width the outer branch takes over and the car
  // settles near the road edge, so the clamp stops at 1.5 lane widths.
  double offset_limit = 6.0;
  double filter_mix_own = 0.2;
  double filter_mix_agent = 0.8;
  double brake_decel = 6.0;
  double reaction_margin = 8.0;
  double mu = 1.0;
  double curvature_lookahead = 10.0;
  double kappa_floor = 1e-4;
  double v_max_host = kmh_to_mps(74.0);
  double v_max_agent = kmh_to_mps(72.0);

  // Throws std::invalid_argument naming the first offending field.
  void validate() const;
};

}  // namespace dpdrive
