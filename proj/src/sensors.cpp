#include "dpdrive/sensors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dpdrive {

const Vehicle& WorldState::at(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= vehicles.size()) {
    std::ostringstream msg;
    msg << "unknown vehicle id " << id;
    throw std::out_of_range(msg.str());
  }
  return vehicles[static_cast<std::size_t>(id)];
}

Vehicle& WorldState::at(int id) {
  return const_cast<Vehicle&>(static_cast<const WorldState&>(*this).at(id));
}

double absolute_heading(const Track& track, const VehicleState& state) {
  return track.pose(state.s).heading + state.yaw_rel;
}

std::uint32_t lane_mask(const TrackSpec& track, double lateral, double half_width) {
  std::uint32_t mask = 0;
  const double lo = lateral - half_width;
  const double hi = lateral + half_width;
  for (int i = 1; i <= track.lane_count && i <= 32; ++i) {
    const double center = (0.5 * (track.lane_count + 1) - i) * track.lane_width;
    if (hi > center - 0.5 * track.lane_width && lo < center + 0.5 * track.lane_width) {
      mask |= 1u << (i - 1);
    }
  }
  return mask;
}

int nearest_lane(const TrackSpec& track, double lateral) {
  const double pos = 0.5 * (track.lane_count + 1) - lateral / track.lane_width;
  const int lane = static_cast<int>(std::lround(pos));
  return std::clamp(lane, 1, track.lane_count);
}

Indicators ground_truth_indicators(const WorldState& world, int vehicle_id) {
  const Vehicle& self = world.at(vehicle_id);
  const Track& track = *world.track;
  Indicators ind;
  ind.angle = -self.state.yaw_rel;
  ind.to_middle = self.state.lateral;

  double* lanes[3] = {&ind.d1, &ind.d2, &ind.d3};
  for (const Vehicle& other : world.vehicles) {
    if (other.id == self.id) continue;
    const double center_gap = track.signed_gap(self.state.s, other.state.s);
    if (!(center_gap > 0.0)) continue;
    const double bumper = 0.5 * (self.geom.length + other.geom.length);
    const double gap = std::max(0.0, center_gap - bumper);
    if (gap >= kDistanceCap) continue;
    const std::uint32_t mask = lane_mask(track.spec(), other.state.lateral, 0.5 * other.geom.width);
    for (int i = 0; i < 3; ++i) {
      if (mask & (1u << i)) *lanes[i] = std::min(*lanes[i], gap);
    }
  }
  return ind;
}

std::vector<OpponentReading> opponents(const WorldState& world, int observer_id, double range) {
  const Vehicle& self = world.at(observer_id);
  const Track& track = *world.track;
  const TrackSpec& spec = track.spec();
  const std::uint32_t self_mask = lane_mask(spec, self.state.lateral, 0.5 * self.geom.width);

  std::vector<OpponentReading> out;
  for (const Vehicle& other : world.vehicles) {
    if (other.id == self.id) continue;
    const double gap = track.signed_gap(self.state.s, other.state.s);
    if (std::abs(gap) > range) continue;
    OpponentReading r;
    r.id = other.id;
    r.d_exact = gap;
    r.lane_index = nearest_lane(spec, other.state.lateral);
    r.to_middle = other.state.lateral;
    r.yaw = absolute_heading(track, other.state);
    r.speed = other.state.speed;
    r.same_lane = (lane_mask(spec, other.state.lateral, 0.5 * other.geom.width) & self_mask) != 0;
    out.push_back(r);
  }
  std::sort(out.begin(), out.end(), [](const OpponentReading& a, const OpponentReading& b) {
    const double da = std::abs(a.d_exact);
    const double db = std::abs(b.d_exact);
    if (da != db) return da < db;
    return a.id < b.id;
  });
  return out;
}

}  // namespace dpdrive
