#pragma once

#include <cstdint>
#include <vector>

#include "dpdrive/types.hpp"
#include "dpdrive/world.hpp"

namespace dpdrive {

// Stand-in vehicle physics. The wheel-speed terms are phenomenological: they
// exist so that hard launches and hard braking produce slip for the
// traction and anti-lock stages to act on.
struct DynamicsParams {
  double dt = 0.02;
  double max_engine_accel = 4.0;
  double max_brake_decel = 9.0;
  double drag_coeff = 0.0005;
  double wheel_slip_gain_accel = 12.0;
  double wheel_slip_gain_brake = 3.0;
  double off_track_margin = 0.5;
  std::int64_t damage_per_contact_tick = 1;
  // Road-wheel angle at full steering command.
  double steer_lock = 0.366;

  void validate() const;
};

// Advances one vehicle by params.dt with a kinematic bicycle model and
// re-projects the result onto the track. v_max scales the low-speed wheel
// spin term.
VehicleState step_vehicle(const VehicleState& state, const ControlCommand& cmd,
                          const VehicleGeometry& geom, const DynamicsParams& params,
                          const Track& track, double v_max);

struct ContactEvent {
  enum class Kind { kPair, kOffRoad };
  Kind kind = Kind::kPair;
  int a = -1;
  int b = -1;  // -1 for off-road events

  bool operator==(const ContactEvent&) const = default;
};

struct OrientedBox {
  Point2 center;
  double heading = 0.0;
  double half_length = 0.0;
  double half_width = 0.0;
};

OrientedBox footprint(const Track& track, const Vehicle& v);

// Separating-axis test; touching boxes do not overlap.
bool boxes_overlap(const OrientedBox& a, const OrientedBox& b);

bool off_road(const TrackSpec& track, const VehicleState& state, const DynamicsParams& params);

// Pair events list each overlapping pair once with a < b, ordered by (a, b);
// off-road events follow in id order.
std::vector<ContactEvent> detect_collisions(const WorldState& world, const DynamicsParams& params);

void apply_damage(WorldState& world, const std::vector<ContactEvent>& events,
                  const DynamicsParams& params);

}  // namespace dpdrive
