#include "dpdrive/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dpdrive {

void DynamicsParams::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
  for (double g : {max_engine_accel, max_brake_decel, drag_coeff, wheel_slip_gain_accel,
                   wheel_slip_gain_brake, off_track_margin}) {
    if (!(g >= 0.0) || !std::isfinite(g)) {
      throw std::invalid_argument("dynamics gains must be finite and >= 0");
    }
  }
  if (damage_per_contact_tick < 0) throw std::invalid_argument("damage_per_contact_tick must be >= 0");
  if (!(steer_lock > 0.0)) throw std::invalid_argument("steer_lock must be positive");
}

VehicleState step_vehicle(const VehicleState& state, const ControlCommand& cmd,
                          const VehicleGeometry& geom, const DynamicsParams& params,
                          const Track& track, double v_max) {
  const double dt = params.dt;
  const double v = state.speed;
  const TrackPose tp = track.pose(state.s);
  const double heading = tp.heading + state.yaw_rel;
  const Point2 p = track.to_world(state.s, state.lateral);

  const Point2 moved{p.x + v * std::cos(heading) * dt, p.y + v * std::sin(heading) * dt};
  const double delta = cmd.steer * params.steer_lock;
  const double new_heading = heading + v * std::tan(delta) / geom.wheelbase * dt;

  VehicleState out = state;
  const double accel = cmd.accel * params.max_engine_accel - cmd.brake * params.max_brake_decel -
                       params.drag_coeff * v * v;
  out.speed = std::max(0.0, v + accel * dt);

  const FrenetPoint f = track.project(moved, state.s + v * dt);
  out.s = f.s;
  out.lateral = f.lateral;
  out.yaw_rel = wrap_angle(new_heading - track.pose(f.s).heading);
  out.odometer = state.odometer + v * dt;

  const double low_speed_factor = v_max > 0.0 ? std::max(0.0, 1.0 - v / v_max) : 0.0;
  out.driven_wheel_speed = v + params.wheel_slip_gain_accel * cmd.accel * low_speed_factor;
  out.wheel_avg_speed = std::max(0.0, v - params.wheel_slip_gain_brake * cmd.brake);
  return out;
}

OrientedBox footprint(const Track& track, const Vehicle& v) {
  return {track.to_world(v.state.s, v.state.lateral), absolute_heading(track, v.state),
          0.5 * v.geom.length, 0.5 * v.geom.width};
}

namespace {

// Half extent of box b projected on unit axis (ax, ay).
double projected_radius(const OrientedBox& b, double ax, double ay) {
  const double c = std::cos(b.heading);
  const double s = std::sin(b.heading);
  return b.half_length * std::abs(ax * c + ay * s) + b.half_width * std::abs(-ax * s + ay * c);
}

}  // namespace

bool boxes_overlap(const OrientedBox& a, const OrientedBox& b) {
  const double dx = b.center.x - a.center.x;
  const double dy = b.center.y - a.center.y;
  for (const OrientedBox* box : {&a, &b}) {
    const double c = std::cos(box->heading);
    const double s = std::sin(box->heading);
    const double axes[2][2] = {{c, s}, {-s, c}};
    for (const auto& ax : axes) {
      const double dist = std::abs(dx * ax[0] + dy * ax[1]);
      if (dist >= projected_radius(a, ax[0], ax[1]) + projected_radius(b, ax[0], ax[1])) {
        return false;
      }
    }
  }
  return true;
}

bool off_road(const TrackSpec& track, const VehicleState& state, const DynamicsParams& params) {
  return std::abs(state.lateral) > 0.5 * track.road_width + params.off_track_margin;
}

std::vector<ContactEvent> detect_collisions(const WorldState& world, const DynamicsParams& params) {
  const Track& track = *world.track;
  const std::size_t n = world.vehicles.size();
  std::vector<OrientedBox> boxes;
  boxes.reserve(n);
  for (const Vehicle& v : world.vehicles) boxes.push_back(footprint(track, v));

  std::vector<ContactEvent> events;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const OrientedBox& a = boxes[i];
      const OrientedBox& b = boxes[j];
      const double reach = std::hypot(a.half_length, a.half_width) + std::hypot(b.half_length, b.half_width);
      const double dx = a.center.x - b.center.x;
      const double dy = a.center.y - b.center.y;
      if (dx * dx + dy * dy >= reach * reach) continue;
      if (boxes_overlap(a, b)) {
        events.push_back({ContactEvent::Kind::kPair, static_cast<int>(i), static_cast<int>(j)});
      }
    }
  }
  for (const Vehicle& v : world.vehicles) {
    if (off_road(track.spec(), v.state, params)) {
      events.push_back({ContactEvent::Kind::kOffRoad, v.id, -1});
    }
  }
  return events;
}

void apply_damage(WorldState& world, const std::vector<ContactEvent>& events,
                  const DynamicsParams& params) {
  for (const ContactEvent& e : events) {
    world.at(e.a).state.damage += params.damage_per_contact_tick;
    if (e.kind == ContactEvent::Kind::kPair) world.at(e.b).state.damage += params.damage_per_contact_tick;
  }
}

}  // namespace dpdrive
