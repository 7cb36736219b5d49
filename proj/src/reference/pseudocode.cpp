#include "dpdrive/reference/pseudocode.hpp"

#include <algorithm>
#include <cmath>

namespace dpdrive::reference {

namespace {

double wrap(double a) {
  while (a > kPi) a -= 2.0 * kPi;
  while (a <= -kPi) a += 2.0 * kPi;
  return a;
}

int rank(int state) {
  if (state == 2) return 3;
  if (state == 3) return 2;
  if (state == 1) return 1;
  return 0;
}

double slowly_to_zero(double offset, double parms) {
  if (offset > parms) return offset - parms;
  if (offset < -parms) return offset + parms;
  return 0.0;
}

}  // namespace

StateResult agent_state(const std::vector<Agent>& agents, double current_speed,
                        const ControllerParams& p) {
  StateResult result;
  for (int i = 0; i < static_cast<int>(agents.size()); ++i) {
    const Agent& a = agents[static_cast<std::size_t>(i)];
    const double D_exact = a.d_exact;
    int Agent_State = 0;
    if (D_exact < p.detect_range && D_exact > -p.detect_range) {
      if (D_exact > p.near_threshold) {
        Agent_State = 1;
        if (a.same_lane) {
          const double closing = current_speed * current_speed - a.speed * a.speed;
          const double needed = (closing > 0.0 ? closing : 0.0) / (2.0 * p.brake_decel) + p.reaction_margin;
          if (needed > D_exact) Agent_State = 2;
        }
      } else if (D_exact < p.near_threshold && D_exact > -p.rear_band) {
        Agent_State = 3;
      }
    }
    if (rank(Agent_State) > rank(result.agent_state)) {
      result.agent_state = Agent_State;
      result.focus = i;
    }
  }
  return result;
}

double get_offset(double offset, int agent_state, double agent_to_middle, double d1, double d2,
                  double d3, const ControllerParams& p) {
  const double parms = p.offset_step;
  if (agent_state == 1) {
    if (agent_to_middle > p.lateral_lane_threshold) {
      offset -= parms;
    } else if (agent_to_middle < -p.lateral_lane_threshold) {
      offset += parms;
    } else {
      if (d2 < p.occupancy_gap) {
        if (d1 > p.occupancy_gap) {
          offset += parms;
        } else if (d1 < p.occupancy_gap && d3 > p.occupancy_gap) {
          offset -= parms;
        } else {
          offset = slowly_to_zero(offset, parms);
        }
      } else {
        offset = slowly_to_zero(offset, parms);
      }
    }
  } else if (agent_state == 0) {
    offset = slowly_to_zero(offset, parms);
  }
  if (offset > p.offset_limit) offset = p.offset_limit;
  if (offset < -p.offset_limit) offset = -p.offset_limit;
  return offset;
}

double steer(double Angle, double toMiddle, double offset, const ControllerParams& p) {
  Angle -= (toMiddle - offset) / p.road_width;
  if (toMiddle > p.lane_width) {
    Angle -= (toMiddle - p.lane_width) / p.road_width;
  } else if (toMiddle < -p.lane_width) {
    Angle -= (toMiddle + p.lane_width) / p.road_width;
  } else {
    Angle -= toMiddle / p.road_width;
  }
  double s = Angle / p.steer_lock;
  if (s > 1.0) s = 1.0;
  if (s < -1.0) s = -1.0;
  return s;
}

double filters(double steer, int agent_state, double d_exact, double agent_yaw, double host_yaw,
               const ControllerParams& p) {
  if (agent_state == 3) {
    if (d_exact < p.near_threshold && d_exact > -p.near_threshold) {
      const double diff_yaw = wrap(agent_yaw - host_yaw);
      const double psteer = diff_yaw / p.steer_lock;
      steer = p.filter_mix_own * steer + p.filter_mix_agent * psteer;
      if (steer > 1.0) steer = 1.0;
      if (steer < -1.0) steer = -1.0;
    }
  }
  return steer;
}

double allowed_speed(double curvature, double v_max, const ControllerParams& p) {
  double k = curvature < 0.0 ? -curvature : curvature;
  if (k < p.kappa_floor) k = p.kappa_floor;
  const double corner = std::sqrt(p.mu * kGravity / k);
  return corner < v_max ? corner : v_max;
}

double tcs(double accel, double current_speed, double driven_wheels_speed, const ControllerParams& p) {
  const double slip = driven_wheels_speed - current_speed;
  if (slip > p.tcs_slip) {
    accel -= std::min(accel, (slip - p.tcs_slip) / p.tcs_range);
  } else {
    accel = accel;
  }
  return accel;
}

double accel(double current_speed, double allowed_speed, double driven_wheels_speed,
             const ControllerParams& p) {
  double a;
  if (current_speed > allowed_speed) {
    // rpm ratio of a single fixed gear
    const double allowed_rpm = allowed_speed;
    const double current_rpm = driven_wheels_speed;
    if (current_rpm > 0.0) {
      a = allowed_rpm / current_rpm;
      if (a > 1.0) a = 1.0;
      if (a < 0.0) a = 0.0;
    } else {
      a = 0.0;
    }
  } else {
    a = 1.0;
  }
  return tcs(a, current_speed, driven_wheels_speed, p);
}

double abs_filter(double brake, double current_speed, double avg_4wheels_speed, const ControllerParams& p) {
  if (current_speed > p.abs_speed) {
    const double slip = current_speed - avg_4wheels_speed;
    if (slip > p.abs_slip) {
      brake -= std::min(brake, (slip - p.abs_slip) / p.abs_range);
    } else {
      brake = brake;
    }
  }
  return brake;
}

double brake(double current_speed, double allowed_speed, int agent_state, double avg_4wheels_speed,
             const ControllerParams& p) {
  double b;
  if (current_speed > allowed_speed) {
    b = std::min(1.0, current_speed - allowed_speed);
  } else {
    b = 0.0;
  }
  if (agent_state == 2) b = 1.0;
  return abs_filter(b, current_speed, avg_4wheels_speed, p);
}

}  // namespace dpdrive::reference
