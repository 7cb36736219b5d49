#pragma once

#include <cstdint>
#include <vector>

#include "dpdrive/world.hpp"

namespace dpdrive {

// Sensing range of the lane-distance indicators; also their "lane empty"
// sentinel value.
inline constexpr double kDistanceCap = 60.0;

// The five affordance indicators consumed by a controller.
struct Indicators {
  double angle = 0.0;      // track tangent minus vehicle heading
  double to_middle = 0.0;  // signed offset from road centerline, left positive
  double d1 = kDistanceCap;
  double d2 = kDistanceCap;
  double d3 = kDistanceCap;

  bool operator==(const Indicators&) const = default;
};

// Short-range sensor view of one neighbor.
struct OpponentReading {
  int id = -1;
  double d_exact = 0.0;  // along-track, centerline to centerline; positive ahead
  int lane_index = 0;    // 1 = leftmost lane
  double to_middle = 0.0;
  double yaw = 0.0;  // absolute heading
  double speed = 0.0;
  bool same_lane = false;
};

// Lanes touched by a body spanning lateral +- half_width, as a bitmask with
// bit (i-1) set for lane i. A straddling vehicle occupies both lanes.
std::uint32_t lane_mask(const TrackSpec& track, double lateral, double half_width);

// Lane whose center is nearest to `lateral`, clamped to [1, lane_count].
int nearest_lane(const TrackSpec& track, double lateral);

// Throws std::out_of_range for an unknown vehicle id.
Indicators ground_truth_indicators(const WorldState& world, int vehicle_id);

// Every other vehicle within `range` along the track, sorted by |d_exact|
// (then id).
std::vector<OpponentReading> opponents(const WorldState& world, int observer_id, double range);

}  // namespace dpdrive
