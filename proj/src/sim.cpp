#include "dpdrive/sim.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "dpdrive/dynamics.hpp"
#include "dpdrive/noise.hpp"
#include "dpdrive/rng.hpp"
#include "dpdrive/sensors.hpp"

namespace dpdrive {

ChannelValues channels(const Indicators& ind) {
  return {ind.angle, ind.to_middle, ind.d1, ind.d2, ind.d3};
}

ChannelValues compute_dmae(std::span<const IndicatorSample> samples) {
  if (samples.empty()) throw std::invalid_argument("compute_dmae: empty log");
  ChannelValues sum{};
  for (const IndicatorSample& s : samples) {
    const ChannelValues t = channels(s.truth);
    const ChannelValues p = channels(s.perceived);
    for (std::size_t c = 0; c < sum.size(); ++c) sum[c] += std::abs(p[c] - t[c]);
  }
  for (double& v : sum) v /= static_cast<double>(samples.size());
  return sum;
}

namespace {

constexpr const char* kLogHeader =
    "tick,time,vehicle_id,role,s,lateral,yaw_rel,speed,steer,accel,brake,agent_state,offset,damage,"
    "truth_angle,perceived_angle,truth_to_middle,perceived_to_middle,truth_d1,perceived_d1,"
    "truth_d2,perceived_d2,truth_d3,perceived_d3";

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

ChannelValues compute_dmae(std::istream& log_csv) {
  std::string line;
  if (!std::getline(log_csv, line)) throw std::invalid_argument("compute_dmae: empty log");
  const std::vector<std::string> header = split_csv(line);
  auto column = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::invalid_argument("compute_dmae: log lacks column " + name);
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t role_col = column("role");
  std::array<std::size_t, 5> truth_col{};
  std::array<std::size_t, 5> perceived_col{};
  for (std::size_t c = 0; c < kChannelNames.size(); ++c) {
    truth_col[c] = column(std::string("truth_") + kChannelNames[c]);
    perceived_col[c] = column(std::string("perceived_") + kChannelNames[c]);
  }
  std::vector<IndicatorSample> samples;
  while (std::getline(log_csv, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv(line);
    if (f.size() != header.size()) throw std::invalid_argument("compute_dmae: ragged row");
    if (f[role_col] != "host") continue;
    ChannelValues t{};
    ChannelValues p{};
    for (std::size_t c = 0; c < 5; ++c) {
      t[c] = std::stod(f[truth_col[c]]);
      p[c] = std::stod(f[perceived_col[c]]);
    }
    samples.push_back({{t[0], t[1], t[2], t[3], t[4]}, {p[0], p[1], p[2], p[3], p[4]}});
  }
  return compute_dmae(samples);
}

Setup build_world(const ScenarioSpec& spec) {
  {
    auto errors = validate(spec);
    if (!errors.empty()) throw ScenarioError(std::move(errors));
  }
  Setup setup;
  auto track = std::make_shared<const Track>(spec.track);
  const double L = track->total_length();
  setup.world.track = track;

  std::vector<VehicleSpec> vehicles = spec.vehicles;
  Rng spawn(derive_seed(spec.seed, Stream::kSpawn));

  const auto host_it = std::find_if(vehicles.begin(), vehicles.end(),
                                    [](const VehicleSpec& v) { return v.role == Role::kHost; });
  const double host_s = host_it->s;
  if (spec.spawn_agents > 0) {
    const double spacing = L / (spec.spawn_agents + 1);
    for (int k = 0; k < spec.spawn_agents; ++k) {
      VehicleSpec v;
      v.role = Role::kAgent;
      v.lane = 1 + static_cast<int>(spawn.uniform() * spec.track.lane_count);
      double s = host_s + (k + 1) * spacing + spawn.uniform(-0.25, 0.25) * spacing;
      // Slide forward until clear of every earlier spawn.
      for (bool clear = false; !clear;) {
        clear = true;
        for (const VehicleSpec& o : vehicles) {
          const double lo = o.lateral.value_or(track->lane_center(o.lane));
          const double gap = std::abs(track->signed_gap(o.s, s));
          if (gap < 0.5 * (o.geometry.length + v.geometry.length) + 1.0 &&
              std::abs(lo - track->lane_center(v.lane)) < 0.5 * (o.geometry.width + v.geometry.width)) {
            s += o.geometry.length + 1.0;
            clear = false;
          }
        }
      }
      v.s = track->normalize(s);
      vehicles.push_back(v);
    }
  }

  const ControllerParams& cp = spec.controller;
  int id = 0;
  for (VehicleSpec& v : vehicles) {
    if (v.role == Role::kAgent && !v.target_speed) {
      v.target_speed = spawn.uniform(0.5, 1.0) * cp.v_max_agent;
    }
    const double cap = v.role == Role::kHost ? cp.v_max_host : cp.v_max_agent;
    const double v_max = std::min(cap, v.target_speed.value_or(cap));

    Vehicle veh;
    veh.id = id;
    veh.geom = v.geometry;
    veh.state.role = v.role;
    veh.state.s = track->normalize(v.s);
    veh.state.lateral = v.lateral.value_or(track->lane_center(v.lane));
    veh.state.yaw_rel = v.yaw_rel;
    veh.state.speed = v.speed.value_or(v_max);
    veh.state.driven_wheel_speed = veh.state.speed;
    veh.state.wheel_avg_speed = veh.state.speed;
    setup.world.vehicles.push_back(veh);

    ControllerState cs = make_controller_state(cp, v_max);
    cs.disable_agent_state = spec.disable_agent_state;
    cs.offset = std::clamp(2.0 * veh.state.lateral, -cp.offset_limit, cp.offset_limit);
    setup.controllers.push_back(cs);
    setup.v_max.push_back(v_max);
    if (v.role == Role::kHost) setup.host_id = id;
    ++id;
  }
  return setup;
}

namespace {

void append_number(std::string& out, double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.9g", v);
  out.append(buf, static_cast<std::size_t>(n));
}

void append_int(std::string& out, std::int64_t v) {
  char buf[24];
  const int n = std::snprintf(buf, sizeof buf, "%" PRId64, v);
  out.append(buf, static_cast<std::size_t>(n));
}

struct Decision {
  ControlCommand cmd;
  VehicleState next;
};

}  // namespace

RunMetrics run(const ScenarioSpec& spec, const RunOptions& options) {
  Setup setup = build_world(spec);
  WorldState& world = setup.world;
  const Track& track = *world.track;
  const double L = track.total_length();
  const double dt = spec.dynamics.dt;
  const int host = setup.host_id;
  const std::size_t n = world.vehicles.size();

  NoiseModel noise = spec.noise;
  noise.rng_seed = spec.noise_seed.value_or(derive_seed(spec.seed, Stream::kHostNoise));
  Perceiver perceiver(noise);
  std::vector<IndicatorSample> shadow_samples;

  std::int64_t max_ticks = std::numeric_limits<std::int64_t>::max();
  if (spec.duration) max_ticks = static_cast<std::int64_t>(std::llround(*spec.duration / dt));
  double lap_goal = std::numeric_limits<double>::infinity();
  if (spec.laps) {
    lap_goal = *spec.laps * L;
    // A host that stalls must not spin forever: allow ten nominal laps' time.
    const double nominal = lap_goal / setup.v_max[static_cast<std::size_t>(host)];
    max_ticks = std::min(max_ticks, static_cast<std::int64_t>(std::ceil(10.0 * nominal / dt)));
  }
  if (!spec.duration && !spec.laps) max_ticks = static_cast<std::int64_t>(std::llround(60.0 / dt));

  const int threads = std::max(1, options.threads > 0 ? options.threads : spec.threads);

  RunMetrics m;
  std::vector<IndicatorSample> host_samples;
  host_samples.reserve(static_cast<std::size_t>(std::min<std::int64_t>(max_ticks, 1 << 20)));
  shadow_samples.reserve(host_samples.capacity());
  std::vector<Decision> decisions(n);
  std::vector<ControlCommand> commands(n);
  IndicatorSample host_ind;
  IndicatorSample shadow_ind;
  double progress = 0.0;
  double sum_abs_tm = 0.0;

  std::string row;
  if (options.log) *options.log << kLogHeader << '\n';

  auto decide = [&](std::size_t i, std::int64_t tick) {
    const Vehicle& v = world.vehicles[i];
    ControllerState& cs = setup.controllers[i];
    const Indicators truth = ground_truth_indicators(world, v.id);
    Indicators seen = truth;
    if (v.id == host) {
      seen = perceiver.perceive(truth, tick);
      host_ind = {truth, seen};
      shadow_ind = {truth, perceiver.unheld(truth)};
    }
    const std::vector<OpponentReading> readings = opponents(world, v.id, cs.params.detect_range);
    const double yaw = absolute_heading(track, v.state);
    const ControlCommand cmd = control_step(seen, readings, v.state, yaw, cs);
    decisions[i] = {cmd, step_vehicle(v.state, cmd, v.geom, spec.dynamics, track, setup.v_max[i])};
  };

  std::int64_t tick = 0;
  while (tick < max_ticks && progress < lap_goal) {
    if (threads == 1 || n < 2) {
      for (std::size_t i = 0; i < n; ++i) decide(i, tick);
    } else {
      std::vector<std::jthread> pool;
      const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          for (std::size_t i = w; i < n; i += workers) decide(i, tick);
        });
      }
    }

    std::vector<double> gap_before(n, 0.0);
    const VehicleState host_before = world.vehicles[static_cast<std::size_t>(host)].state;
    for (std::size_t i = 0; i < n; ++i) gap_before[i] = track.signed_gap(host_before.s, world.vehicles[i].state.s);

    for (std::size_t i = 0; i < n; ++i) {
      const std::int64_t damage = world.vehicles[i].state.damage;
      world.vehicles[i].state = decisions[i].next;
      world.vehicles[i].state.damage = damage;
      commands[i] = decisions[i].cmd;
    }
    ++tick;
    world.tick = tick;
    apply_damage(world, detect_collisions(world, spec.dynamics), spec.dynamics);

    const VehicleState& hs = world.vehicles[static_cast<std::size_t>(host)].state;
    progress += track.signed_gap(host_before.s, hs.s);
    host_samples.push_back(host_ind);
    shadow_samples.push_back(shadow_ind);
    sum_abs_tm += std::abs(hs.lateral);
    m.max_abs_to_middle = std::max(m.max_abs_to_middle, std::abs(hs.lateral));

    const Vehicle& hv = world.vehicles[static_cast<std::size_t>(host)];
    const bool host_on_road = !off_road(track.spec(), hs, spec.dynamics);
    for (std::size_t i = 0; i < n; ++i) {
      if (static_cast<int>(i) == host) continue;
      const Vehicle& av = world.vehicles[i];
      const double gap_after = track.signed_gap(hs.s, av.state.s);
      if (gap_before[i] > 0.0 && gap_after <= 0.0 && gap_before[i] < 0.25 * L && host_on_road &&
          !off_road(track.spec(), av.state, spec.dynamics)) {
        m.overtakes.push_back({tick, av.id, lane_mask(track.spec(), hs.lateral, 0.5 * hv.geom.width),
                               lane_mask(track.spec(), av.state.lateral, 0.5 * av.geom.width)});
      }
    }

    if (options.log) {
      for (std::size_t i = 0; i < n; ++i) {
        const Vehicle& v = world.vehicles[i];
        const ControllerState& cs = setup.controllers[i];
        row.clear();
        append_int(row, tick);
        row += ',';
        append_number(row, static_cast<double>(tick) * dt);
        row += ',';
        append_int(row, v.id);
        row += ',';
        row += to_string(v.state.role);
        for (double x : {v.state.s, v.state.lateral, v.state.yaw_rel, v.state.speed, commands[i].steer,
                         commands[i].accel, commands[i].brake}) {
          row += ',';
          append_number(row, x);
        }
        row += ',';
        append_int(row, to_int(cs.last_state.value));
        row += ',';
        append_number(row, cs.offset);
        row += ',';
        append_int(row, v.state.damage);
        const ChannelValues t = channels(host_ind.truth);
        const ChannelValues p = channels(host_ind.perceived);
        for (std::size_t c = 0; c < 5; ++c) {
          row += ',';
          if (v.id == host) append_number(row, t[c]);
          row += ',';
          if (v.id == host) append_number(row, p[c]);
        }
        row += '\n';
        *options.log << row;
      }
    }

    if (options.observer) {
      options.observer(TickView{tick, world, commands, setup.controllers, host_ind, host});
    }
  }

  m.ticks = tick;
  m.sim_time = static_cast<double>(tick) * dt;
  if (!m.overtakes.empty()) m.first_overtake_time = static_cast<double>(m.overtakes.front().tick) * dt;
  for (const Vehicle& v : world.vehicles) {
    m.damage.push_back(v.state.damage);
    m.total_damage += v.state.damage;
    if (v.id == host) {
      m.host_damage += v.state.damage;
    } else {
      m.agent_damage += v.state.damage;
    }
  }
  m.host_distance = world.vehicles[static_cast<std::size_t>(host)].state.odometer;
  m.laps_completed = progress / L;
  if (tick > 0) {
    m.mean_abs_to_middle = sum_abs_tm / static_cast<double>(tick);
    m.dmae = compute_dmae(host_samples);
    m.smae = compute_dmae(shadow_samples);
  }
  m.damage_per_km = m.host_distance > 0.0 ? static_cast<double>(m.total_damage) / (m.host_distance / 1000.0) : 0.0;
  return m;
}

void write_metrics(std::ostream& out, const RunMetrics& m) {
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return std::string(buf);
  };
  out << "ticks = " << m.ticks << '\n';
  out << "sim_time = " << num(m.sim_time) << '\n';
  out << "host_damage = " << m.host_damage << '\n';
  out << "agent_damage = " << m.agent_damage << '\n';
  out << "total_damage = " << m.total_damage << '\n';
  out << "damage_per_km = " << num(m.damage_per_km) << '\n';
  for (std::size_t i = 0; i < m.damage.size(); ++i) out << "damage." << i << " = " << m.damage[i] << '\n';
  out << "host_distance = " << num(m.host_distance) << '\n';
  out << "laps_completed = " << num(m.laps_completed) << '\n';
  out << "overtakes = " << m.overtakes.size() << '\n';
  out << "first_overtake_time = " << num(m.first_overtake_time) << '\n';
  out << "mean_abs_to_middle = " << num(m.mean_abs_to_middle) << '\n';
  out << "max_abs_to_middle = " << num(m.max_abs_to_middle) << '\n';
  for (std::size_t c = 0; c < kChannelNames.size(); ++c) {
    out << "dmae." << kChannelNames[c] << " = " << num(m.dmae[c]) << '\n';
  }
  for (std::size_t c = 0; c < kChannelNames.size(); ++c) {
    out << "smae." << kChannelNames[c] << " = " << num(m.smae[c]) << '\n';
  }
}

}  // namespace dpdrive
