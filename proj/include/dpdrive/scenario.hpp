#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dpdrive/dynamics.hpp"
#include "dpdrive/noise.hpp"
#include "dpdrive/track.hpp"
#include "dpdrive/types.hpp"

namespace dpdrive {

struct VehicleSpec {
  Role role = Role::kAgent;
  double s = 0.0;
  int lane = 2;
  // Initial lateral position; defaults to the lane center.
  std::optional<double> lateral;
  double yaw_rel = 0.0;
  // Initial speed; defaults to the vehicle's speed cap.
  std::optional<double> speed;
  // Drawn from the spawn stream when absent (agents only; the host uses its
  // role cap).
  std::optional<double> target_speed;
  VehicleGeometry geometry;
  int line = 0;  // source line of the [vehicle] header, 0 if synthesized
};

struct ScenarioSpec {
  TrackSpec track = stadium_track(4000.0, 300.0);
  std::vector<VehicleSpec> vehicles;
  NoiseModel noise;
  std::string noise_preset = "none";
  // Noise seed given explicitly; otherwise derived from `seed`.
  std::optional<std::uint64_t> noise_seed;
  ControllerParams controller;
  DynamicsParams dynamics;
  std::optional<double> duration;  // seconds
  std::optional<double> laps;      // host laps
  std::uint64_t seed = 0;
  bool disable_agent_state = false;
  // Extra agents placed around the loop by the spawn stream.
  int spawn_agents = 0;
  // Worker threads for the per-vehicle phase of a tick.
  int threads = 1;
};

inline constexpr int kMaxAgents = 20;

struct ValidationError {
  int line = 0;  // 0 when not tied to a source line
  std::string field;
  std::string reason;
};

class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(std::vector<ValidationError> errors);
  const std::vector<ValidationError>& errors() const { return errors_; }

 private:
  std::vector<ValidationError> errors_;
};

std::string format_errors(const std::vector<ValidationError>& errors);

// `section.key=value` override applied on top of the scenario text, e.g.
// "controller.offset_step=0.2". Vehicle keys cannot be overridden.
struct Override {
  std::string section;
  std::string key;
  std::string value;
};

// Sets one ControllerParams field by its scenario key. Returns an error
// message, empty on success. Does not validate the resulting set.
std::string set_controller_field(ControllerParams& params, std::string_view key, std::string_view value);

// Throws std::invalid_argument for malformed text.
Override parse_override(std::string_view text);

// Parses and validates. Throws ScenarioError carrying every problem found.
ScenarioSpec load_scenario(std::string_view text, const std::vector<Override>& overrides = {});
ScenarioSpec load_scenario_file(const std::string& path, const std::vector<Override>& overrides = {});

// Invariant checks on an already-built spec (also run by load_scenario).
std::vector<ValidationError> validate(const ScenarioSpec& spec);

}  // namespace dpdrive
