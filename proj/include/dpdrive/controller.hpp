#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string_view>

#include "dpdrive/sensors.hpp"
#include "dpdrive/types.hpp"

namespace dpdrive {

// Traffic situation around a vehicle:
//   0  nobody within detection range (or nobody relevant)
//   1  a car ahead that can be overtaken
//   2  a car ahead in our lane that we cannot stop behind without braking now
//   3  a car alongside (overlap band, extended rearward by rear_band)
enum class AgentStateKind : std::uint8_t { kState0 = 0, kState1 = 1, kState2 = 2, kState3 = 3 };

struct AgentState {
  AgentStateKind value = AgentStateKind::kState0;
  std::optional<OpponentReading> focus;  // present iff value != kState0
};

int to_int(AgentStateKind k);

// Road curvature from the change of the estimated road tangent
// (Angle + own yaw) over the last `window` meters driven.
class CurvatureEstimator {
 public:
  double update(double road_tangent, double odometer, double window);
  double current() const { return kappa_; }

 private:
  struct Sample {
    double odometer;
    double tangent;  // unwrapped
  };
  std::deque<Sample> samples_;
  double kappa_ = 0.0;
};

struct ControllerState {
  ControllerParams params;
  double offset = 0.0;
  // Speed cap of this vehicle (role limit or its lower target speed).
  double v_max = 0.0;
  // Ablation: classify every situation as State0.
  bool disable_agent_state = false;
  CurvatureEstimator curvature;
  AgentState last_state;
};

ControllerState make_controller_state(const ControllerParams& params, double v_max);

// Kinematic stopping distance for closing on a slower car, plus margin.
double needed_brake_distance(double v_self, double v_agent, const ControllerParams& params);

AgentState agent_state(std::span<const OpponentReading> readings, const VehicleState& self,
                       const ControllerParams& params);

// Updates and returns state.offset.
double get_offset(ControllerState& state, const AgentState& agent, double d1, double d2, double d3);

// Steering law before the collision filter, without the actuator clamp.
double steer_raw(double angle, double to_middle, double offset, const ControllerParams& params);
// steer_raw clamped to [-1, 1].
double steer_command(double angle, double to_middle, double offset, const ControllerParams& params);

double filter_steer(double steer_in, const AgentState& agent, double self_yaw,
                    const ControllerParams& params);

double allowed_speed(double curvature_est, double v_max, const ControllerParams& params);

double traction_control(double accel, double current_speed, double driven_wheel_speed,
                        const ControllerParams& params);
double accel_command(double current_speed, double allowed, double driven_wheel_speed,
                     const ControllerParams& params);

double anti_lock_brake(double brake, double current_speed, double wheel_avg_speed,
                       const ControllerParams& params);
double brake_command(double current_speed, double allowed, const AgentState& agent,
                     double wheel_avg_speed, const ControllerParams& params);

// One control tick: classify, update offset, steer, filter, speed, throttle
// and brake, in that order. self_yaw is the vehicle's absolute heading.
ControlCommand control_step(const Indicators& indicators, std::span<const OpponentReading> readings,
                            const VehicleState& self, double self_yaw, ControllerState& state);

}  // namespace dpdrive
