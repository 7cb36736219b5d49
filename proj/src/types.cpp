#include "dpdrive/types.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dpdrive {

std::string_view to_string(Role role) { return role == Role::kHost ? "host" : "agent"; }

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(name) + " must be positive and finite");
  }
}

}  // namespace

void VehicleGeometry::validate() const {
  require_positive(length, "length");
  require_positive(width, "width");
  require_positive(wheelbase, "wheelbase");
  if (!(length > wheelbase)) throw std::invalid_argument("length must exceed wheelbase");
}

void ControllerParams::validate() const {
  require_positive(steer_lock, "steer_lock");
  require_positive(lane_width, "lane_width");
  require_positive(road_width, "road_width");
  require_positive(detect_range, "detect_range");
  require_positive(near_threshold, "near_threshold");
  if (!(rear_band >= near_threshold)) throw std::invalid_argument("rear_band must be >= near_threshold");
  require_positive(lateral_lane_threshold, "lateral_lane_threshold");
  require_positive(occupancy_gap, "occupancy_gap");
  require_positive(tcs_slip, "tcs_slip");
  require_positive(tcs_range, "tcs_range");
  require_positive(abs_speed, "abs_speed");
  require_positive(abs_slip, "abs_slip");
  require_positive(abs_range, "abs_range");
  require_positive(offset_step, "offset_step");
  require_positive(offset_limit, "offset_limit");
  require_positive(brake_decel, "brake_decel");
  require_positive(mu, "mu");
  require_positive(curvature_lookahead, "curvature_lookahead");
  require_positive(kappa_floor, "kappa_floor");
  require_positive(v_max_host, "v_max_host");
  require_positive(v_max_agent, "v_max_agent");
  if (!(reaction_margin >= 0.0)) throw std::invalid_argument("reaction_margin must be nonnegative");
  if (offset_step > lane_width) throw std::invalid_argument("offset_step must not exceed lane_width");
  if (!(filter_mix_own >= 0.0) || !(filter_mix_agent >= 0.0) ||
      std::abs(filter_mix_own + filter_mix_agent - 1.0) > 1e-12) {
    throw std::invalid_argument("filter_mix_own + filter_mix_agent must equal 1");
  }
}

}  // namespace dpdrive
