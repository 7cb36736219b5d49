#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "dpdrive/controller.hpp"
#include "dpdrive/scenario.hpp"
#include "dpdrive/world.hpp"

namespace dpdrive {

// Channel order used by every per-indicator array below.
inline constexpr std::array<const char*, 5> kChannelNames = {"angle", "to_middle", "d1", "d2", "d3"};

using ChannelValues = std::array<double, 5>;

ChannelValues channels(const Indicators& ind);

struct IndicatorSample {
  Indicators truth;
  Indicators perceived;
};

// Mean |perceived - truth| per channel. Throws std::invalid_argument on an
// empty sample set.
ChannelValues compute_dmae(std::span<const IndicatorSample> samples);
// Same, reading the host indicator columns of a trajectory log.
ChannelValues compute_dmae(std::istream& log_csv);

struct OvertakeEvent {
  std::int64_t tick = 0;
  int agent = -1;
  // Lane masks (see lane_mask) of host and agent at the crossing tick.
  std::uint32_t host_lanes = 0;
  std::uint32_t agent_lanes = 0;
};

struct RunMetrics {
  std::vector<std::int64_t> damage;  // per vehicle id
  std::int64_t host_damage = 0;
  std::int64_t agent_damage = 0;
  std::int64_t total_damage = 0;
  double host_distance = 0.0;
  double laps_completed = 0.0;
  std::vector<OvertakeEvent> overtakes;
  // Sim time of the first overtake, -1 when none happened.
  double first_overtake_time = -1.0;
  double mean_abs_to_middle = 0.0;
  double max_abs_to_middle = 0.0;
  ChannelValues dmae{};
  // Same error realizations applied to the current frame instead of the
  // held one: the static reference dMAE is compared against.
  ChannelValues smae{};
  std::int64_t ticks = 0;
  double sim_time = 0.0;
  double damage_per_km = 0.0;
};

// Per-tick view handed to an observer after collisions are applied.
struct TickView {
  std::int64_t tick = 0;  // index of the state just produced
  const WorldState& world;
  std::span<const ControlCommand> commands;
  std::span<const ControllerState> controllers;
  const IndicatorSample& host_indicators;
  int host_id = 0;
};

struct RunOptions {
  std::ostream* log = nullptr;
  std::function<void(const TickView&)> observer;
  // Overrides ScenarioSpec::threads when > 0.
  int threads = 0;
};

// Initial world after spawning (speeds and extra agents drawn from the spawn
// stream).
struct Setup {
  WorldState world;
  std::vector<ControllerState> controllers;
  std::vector<double> v_max;
  int host_id = 0;
};
Setup build_world(const ScenarioSpec& spec);

RunMetrics run(const ScenarioSpec& spec, const RunOptions& options = {});

void write_metrics(std::ostream& out, const RunMetrics& metrics);

}  // namespace dpdrive
