#pragma once

// Line-by-line transcription of the driving pseudocode, kept separate from
// the production controller so the two can be checked against each other.
// Only plain values cross this interface.

#include <vector>

#include "dpdrive/types.hpp"

namespace dpdrive::reference {

struct Agent {
  int id = 0;
  double d_exact = 0.0;
  double to_middle = 0.0;
  double yaw = 0.0;
  double speed = 0.0;
  bool same_lane = false;
};

struct StateResult {
  int agent_state = 0;
  int focus = -1;  // index into the agent list, -1 for state 0
};

StateResult agent_state(const std::vector<Agent>& agents, double current_speed,
                        const ControllerParams& p);

double get_offset(double offset, int agent_state, double agent_to_middle, double d1, double d2,
                  double d3, const ControllerParams& p);

double steer(double angle, double to_middle, double offset, const ControllerParams& p);

double filters(double steer, int agent_state, double d_exact, double agent_yaw, double host_yaw,
               const ControllerParams& p);

double allowed_speed(double curvature, double v_max, const ControllerParams& p);

double tcs(double accel, double current_speed, double driven_wheels_speed, const ControllerParams& p);

double accel(double current_speed, double allowed_speed, double driven_wheels_speed,
             const ControllerParams& p);

double abs_filter(double brake, double current_speed, double avg_4wheels_speed, const ControllerParams& p);

double brake(double current_speed, double allowed_speed, int agent_state, double avg_4wheels_speed,
             const ControllerParams& p);

}  // namespace dpdrive::reference
