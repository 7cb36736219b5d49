#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "dpdrive/track.hpp"
#include "dpdrive/types.hpp"

namespace dpdrive {

struct Vehicle {
  int id = 0;
  VehicleState state;
  VehicleGeometry geom;
};

// Simulation truth at one tick. Vehicle ids equal their index.
struct WorldState {
  std::shared_ptr<const Track> track;
  std::vector<Vehicle> vehicles;
  std::int64_t tick = 0;

  // Throws std::out_of_range for unknown ids.
  const Vehicle& at(int id) const;
  Vehicle& at(int id);
};

// Absolute heading of a vehicle: track tangent plus yaw_rel.
double absolute_heading(const Track& track, const VehicleState& state);

}  // namespace dpdrive
