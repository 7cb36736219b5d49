#include "dpdrive/controller.hpp"

#include <algorithm>
#include <cmath>

#include "dpdrive/track.hpp"

namespace dpdrive {

int to_int(AgentStateKind k) { return static_cast<int>(k); }

double CurvatureEstimator::update(double road_tangent, double odometer, double window) {
  double unwrapped = road_tangent;
  if (!samples_.empty()) {
    const double last = samples_.back().tangent;
    unwrapped = last + wrap_angle(road_tangent - last);
  }
  if (!samples_.empty() && odometer <= samples_.back().odometer) {
    samples_.back().tangent = unwrapped;  // standing still
  } else {
    samples_.push_back({odometer, unwrapped});
  }
  // Keep exactly one sample at or beyond the window edge.
  while (samples_.size() > 2 && odometer - samples_[1].odometer >= window) samples_.pop_front();

  const Sample& oldest = samples_.front();
  const double travelled = odometer - oldest.odometer;
  if (travelled >= 0.5 * window) kappa_ = (unwrapped - oldest.tangent) / travelled;
  return kappa_;
}

ControllerState make_controller_state(const ControllerParams& params, double v_max) {
  ControllerState st;
  st.params = params;
  st.v_max = v_max;
  return st;
}

double needed_brake_distance(double v_self, double v_agent, const ControllerParams& params) {
  return std::max(0.0, v_self * v_self - v_agent * v_agent) / (2.0 * params.brake_decel) +
         params.reaction_margin;
}

namespace {

int priority(AgentStateKind k) {
  switch (k) {
    case AgentStateKind::kState0: return 0;
    case AgentStateKind::kState1: return 1;
    case AgentStateKind::kState3: return 2;
    case AgentStateKind::kState2: return 3;
  }
  return 0;
}

}  // namespace

AgentState agent_state(std::span<const OpponentReading> readings, const VehicleState& self,
                       const ControllerParams& params) {
  AgentState best;
  const double range = params.detect_range;
  const double near = params.near_threshold;
  // Readings arrive sorted by |d_exact|, so the first reading reaching a
  // given state is the nearest one. Ranking: State2 > State3 > State1, so a
  // neighbor alongside never masks a leader we must brake for.
  for (const OpponentReading& r : readings) {
    const double d = r.d_exact;
    if (!(d < range && d > -range)) continue;
    AgentStateKind k = AgentStateKind::kState0;
    if (d > near) {
      k = AgentStateKind::kState1;
      if (r.same_lane && needed_brake_distance(self.speed, r.speed, params) > d) {
        k = AgentStateKind::kState2;
      }
    } else if (d < near && d > -params.rear_band) {
      k = AgentStateKind::kState3;
    }
    if (priority(k) > priority(best.value)) {
      best.value = k;
      best.focus = r;
    }
  }
  return best;
}

namespace {

double decay_toward_zero(double offset, double step) {
  if (std::abs(offset) <= step) return 0.0;
  return offset > 0.0 ? offset - step : offset + step;
}

}  // namespace

double get_offset(ControllerState& state, const AgentState& agent, double d1, double d2, double d3) {
  const ControllerParams& p = state.params;
  const double step = p.offset_step;
  double offset = state.offset;
  switch (agent.value) {
    case AgentStateKind::kState1: {
      const double tm = agent.focus->to_middle;
      if (tm > p.lateral_lane_threshold) {
        offset -= step;  // leader in or near the left lane
      } else if (tm < -p.lateral_lane_threshold) {
        offset += step;  // leader in or near the right lane
      } else if (d2 < p.occupancy_gap) {
        if (d1 > p.occupancy_gap) {
          offset += step;
        } else if (d1 < p.occupancy_gap && d3 > p.occupancy_gap) {
          offset -= step;
        } else {
          offset = decay_toward_zero(offset, step);
        }
      } else {
        offset = decay_toward_zero(offset, step);
      }
      break;
    }
    case AgentStateKind::kState0:
      offset = decay_toward_zero(offset, step);
      break;
    case AgentStateKind::kState2:
    case AgentStateKind::kState3:
      // Lane choice is frozen while braking behind a leader or running
      // alongside a neighbor.
      break;
  }
  state.offset = std::clamp(offset, -p.offset_limit, p.offset_limit);
  return state.offset;
}

double steer_raw(double angle, double to_middle, double offset, const ControllerParams& p) {
  double a = angle - (to_middle - offset) / p.road_width;
  if (to_middle > p.lane_width) {
    a -= (to_middle - p.lane_width) / p.road_width;
  } else if (to_middle < -p.lane_width) {
    a -= (to_middle + p.lane_width) / p.road_width;
  } else {
    a -= to_middle / p.road_width;
  }
  return a / p.steer_lock;
}

double steer_command(double angle, double to_middle, double offset, const ControllerParams& p) {
  return std::clamp(steer_raw(angle, to_middle, offset, p), -1.0, 1.0);
}

double filter_steer(double steer_in, const AgentState& agent, double self_yaw,
                    const ControllerParams& p) {
  if (agent.value != AgentStateKind::kState3 || !agent.focus) return steer_in;
  if (!(std::abs(agent.focus->d_exact) < p.near_threshold)) return steer_in;
  const double psteer = wrap_angle(agent.focus->yaw - self_yaw) / p.steer_lock;
  return std::clamp(p.filter_mix_own * steer_in + p.filter_mix_agent * psteer, -1.0, 1.0);
}

double allowed_speed(double curvature_est, double v_max, const ControllerParams& p) {
  const double kappa = std::max(std::abs(curvature_est), p.kappa_floor);
  return std::min(v_max, std::sqrt(p.mu * kGravity / kappa));
}

double traction_control(double accel, double current_speed, double driven_wheel_speed,
                        const ControllerParams& p) {
  const double slip = driven_wheel_speed - current_speed;
  if (slip > p.tcs_slip) accel -= std::min(accel, (slip - p.tcs_slip) / p.tcs_range);
  return accel;
}

double accel_command(double current_speed, double allowed, double driven_wheel_speed,
                     const ControllerParams& p) {
  double accel = 1.0;
  if (current_speed > allowed) {
    // Single fixed gear: engine rpm is proportional to driven wheel speed.
    accel = driven_wheel_speed > 0.0 ? std::clamp(allowed / driven_wheel_speed, 0.0, 1.0) : 0.0;
  }
  return traction_control(accel, current_speed, driven_wheel_speed, p);
}

double anti_lock_brake(double brake, double current_speed, double wheel_avg_speed,
                       const ControllerParams& p) {
  if (current_speed > p.abs_speed) {
    const double slip = current_speed - wheel_avg_speed;
    if (slip > p.abs_slip) brake -= std::min(brake, (slip - p.abs_slip) / p.abs_range);
  }
  return brake;
}

double brake_command(double current_speed, double allowed, const AgentState& agent,
                     double wheel_avg_speed, const ControllerParams& p) {
  double brake = current_speed > allowed ? std::min(1.0, current_speed - allowed) : 0.0;
  if (agent.value == AgentStateKind::kState2) brake = 1.0;
  return anti_lock_brake(brake, current_speed, wheel_avg_speed, p);
}

ControlCommand control_step(const Indicators& indicators, std::span<const OpponentReading> readings,
                            const VehicleState& self, double self_yaw, ControllerState& state) {
  const ControllerParams& p = state.params;
  const AgentState agent =
      state.disable_agent_state ? AgentState{} : agent_state(readings, self, p);
  state.last_state = agent;

  const double offset = get_offset(state, agent, indicators.d1, indicators.d2, indicators.d3);
  ControlCommand cmd;
  cmd.steer = steer_command(indicators.angle, indicators.to_middle, offset, p);
  cmd.steer = filter_steer(cmd.steer, agent, self_yaw, p);

  const double kappa =
      state.curvature.update(indicators.angle + self_yaw, self.odometer, p.curvature_lookahead);
  const double allowed = allowed_speed(kappa, state.v_max, p);
  cmd.accel = accel_command(self.speed, allowed, self.driven_wheel_speed, p);
  cmd.brake = brake_command(self.speed, allowed, agent, self.wheel_avg_speed, p);
  return cmd;
}

}  // namespace dpdrive
