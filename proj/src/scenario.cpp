#include "dpdrive/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace dpdrive {

ScenarioError::ScenarioError(std::vector<ValidationError> errors)
    : std::runtime_error(format_errors(errors)), errors_(std::move(errors)) {}

std::string format_errors(const std::vector<ValidationError>& errors) {
  std::ostringstream out;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    const ValidationError& e = errors[i];
    if (i) out << '\n';
    if (e.line > 0) out << "line " << e.line << ": ";
    if (!e.field.empty()) out << e.field << ": ";
    out << e.reason;
  }
  return out.str();
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::optional<double> to_double(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<std::int64_t> to_int(std::string_view s) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<std::uint64_t> to_u64(std::string_view s) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<bool> to_bool(std::string_view s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  return std::nullopt;
}

struct Entry {
  std::string key;
  std::string value;
  int line = 0;
};

struct Section {
  std::string name;
  int line = 0;
  std::vector<Entry> entries;
};

constexpr std::string_view kSections[] = {"track", "vehicle", "noise", "controller", "dynamics", "run"};

// Returns an error message, or empty on success.
using Setter = std::function<std::string(std::string_view)>;

Setter real(double& field) {
  return [&field](std::string_view v) -> std::string {
    auto d = to_double(v);
    if (!d) return "expected a number, got '" + std::string(v) + "'";
    field = *d;
    return {};
  };
}

Setter opt_real(std::optional<double>& field) {
  return [&field](std::string_view v) -> std::string {
    auto d = to_double(v);
    if (!d) return "expected a number, got '" + std::string(v) + "'";
    field = *d;
    return {};
  };
}

template <typename Int>
Setter integer(Int& field) {
  return [&field](std::string_view v) -> std::string {
    auto d = to_int(v);
    if (!d) return "expected an integer, got '" + std::string(v) + "'";
    field = static_cast<Int>(*d);
    return {};
  };
}

Setter boolean(bool& field) {
  return [&field](std::string_view v) -> std::string {
    auto d = to_bool(v);
    if (!d) return "expected true or false, got '" + std::string(v) + "'";
    field = *d;
    return {};
  };
}

Setter seed64(std::uint64_t& field) {
  return [&field](std::string_view v) -> std::string {
    auto d = to_u64(v);
    if (!d) return "expected an unsigned 64-bit integer, got '" + std::string(v) + "'";
    field = *d;
    return {};
  };
}

std::map<std::string, Setter, std::less<>> controller_keys(ControllerParams& c) {
  return {{"steer_lock", real(c.steer_lock)},
          {"lane_width", real(c.lane_width)},
          {"road_width", real(c.road_width)},
          {"detect_range", real(c.detect_range)},
          {"near_threshold", real(c.near_threshold)},
          {"rear_band", real(c.rear_band)},
          {"lateral_lane_threshold", real(c.lateral_lane_threshold)},
          {"occupancy_gap", real(c.occupancy_gap)},
          {"tcs_slip", real(c.tcs_slip)},
          {"tcs_range", real(c.tcs_range)},
          {"abs_speed", real(c.abs_speed)},
          {"abs_slip", real(c.abs_slip)},
          {"abs_range", real(c.abs_range)},
          {"offset_step", real(c.offset_step)},
          {"offset_limit", real(c.offset_limit)},
          {"filter_mix_own", real(c.filter_mix_own)},
          {"filter_mix_agent", real(c.filter_mix_agent)},
          {"brake_decel", real(c.brake_decel)},
          {"reaction_margin", real(c.reaction_margin)},
          {"mu", real(c.mu)},
          {"curvature_lookahead", real(c.curvature_lookahead)},
          {"kappa_floor", real(c.kappa_floor)},
          {"v_max_host", real(c.v_max_host)},
          {"v_max_agent", real(c.v_max_agent)}};
}

std::map<std::string, Setter, std::less<>> dynamics_keys(DynamicsParams& d) {
  return {{"dt", real(d.dt)},
          {"max_engine_accel", real(d.max_engine_accel)},
          {"max_brake_decel", real(d.max_brake_decel)},
          {"drag_coeff", real(d.drag_coeff)},
          {"wheel_slip_gain_accel", real(d.wheel_slip_gain_accel)},
          {"wheel_slip_gain_brake", real(d.wheel_slip_gain_brake)},
          {"off_track_margin", real(d.off_track_margin)},
          {"damage_per_contact_tick", integer(d.damage_per_contact_tick)},
          {"steer_lock", real(d.steer_lock)}};
}

class Builder {
 public:
  ScenarioSpec spec;
  std::vector<ValidationError> errors;

  void error(int line, std::string field, std::string reason) {
    errors.push_back({line, std::move(field), std::move(reason)});
  }

  void apply(const std::string& section_name, const std::vector<Entry>& entries,
             std::map<std::string, Setter, std::less<>>& keys) {
    for (const Entry& e : entries) {
      auto it = keys.find(e.key);
      if (it == keys.end()) {
        error(e.line, section_name + "." + e.key, "unknown key");
        continue;
      }
      std::string msg = it->second(e.value);
      if (!msg.empty()) error(e.line, section_name + "." + e.key, msg);
    }
  }

  void track(const Section& sec) {
    TrackSpec& t = spec.track;
    std::vector<Segment> segments;
    bool have_layout = false;
    std::map<std::string, Setter, std::less<>> keys = {{"lane_count", integer(t.lane_count)},
                                                       {"lane_width", real(t.lane_width)},
                                                       {"road_width", real(t.road_width)},
                                                       {"closed", boolean(t.closed)}};
    std::vector<Entry> scalar;
    for (const Entry& e : sec.entries) {
      if (e.key == "segment") {
        const auto parts = split_ws(e.value);
        if (parts.size() == 2 && parts[0] == "straight") {
          if (auto len = to_double(parts[1])) {
            segments.push_back(Segment::straight(*len));
            continue;
          }
        } else if (parts.size() == 3 && parts[0] == "arc") {
          auto r = to_double(parts[1]);
          auto deg = to_double(parts[2]);
          if (r && deg) {
            segments.push_back(Segment::arc(*r, *deg * kPi / 180.0));
            continue;
          }
        }
        error(e.line, "track.segment", "expected 'straight <length>' or 'arc <radius> <degrees>'");
      } else if (e.key == "stadium") {
        const auto parts = split_ws(e.value);
        auto len = parts.size() == 2 ? to_double(parts[0]) : std::nullopt;
        auto r = parts.size() == 2 ? to_double(parts[1]) : std::nullopt;
        if (!len || !r) {
          error(e.line, "track.stadium", "expected '<total_length> <radius>'");
          continue;
        }
        try {
          const TrackSpec st = stadium_track(*len, *r);
          segments.insert(segments.end(), st.segments.begin(), st.segments.end());
          have_layout = true;
        } catch (const std::exception& ex) {
          error(e.line, "track.stadium", ex.what());
        }
      } else {
        scalar.push_back(e);
      }
    }
    apply("track", scalar, keys);
    if (!segments.empty() || have_layout) t.segments = std::move(segments);
    for (const std::string& msg : t.check()) error(sec.line, "track", msg);
  }

  void vehicle(const Section& sec) {
    VehicleSpec v;
    v.line = sec.line;
    std::string role = "agent";
    std::map<std::string, Setter, std::less<>> keys = {
        {"role", [&role](std::string_view s) -> std::string {
           if (s != "host" && s != "agent") return "expected host or agent";
           role = std::string(s);
           return {};
         }},
        {"s", real(v.s)},
        {"lane", integer(v.lane)},
        {"lateral", opt_real(v.lateral)},
        {"yaw_rel", real(v.yaw_rel)},
        {"speed", opt_real(v.speed)},
        {"target_speed", opt_real(v.target_speed)},
        {"length", real(v.geometry.length)},
        {"width", real(v.geometry.width)},
        {"wheelbase", real(v.geometry.wheelbase)}};
    apply("vehicle", sec.entries, keys);
    v.role = role == "host" ? Role::kHost : Role::kAgent;
    spec.vehicles.push_back(v);
  }

  void noise(const Section& sec) {
    NoiseModel& n = spec.noise;
    std::string preset = spec.noise_preset;
    int preset_line = 0;
    std::vector<Entry> rest;
    for (const Entry& e : sec.entries) {
      if (e.key == "preset") {
        preset = e.value;
        preset_line = e.line;
      } else {
        rest.push_back(e);
      }
    }
    if (auto base = noise_preset(preset)) {
      const int period = n.perception_period;
      const NoiseDistribution dist = n.distribution;
      n = *base;
      n.perception_period = period;
      n.distribution = dist;
      spec.noise_preset = preset;
    } else {
      error(preset_line, "noise.preset", "unknown preset '" + preset + "'");
    }
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::map<std::string, Setter, std::less<>> keys = {
        {"mae_angle", real(n.mae_angle)},
        {"mae_to_middle", real(n.mae_to_middle)},
        {"mae_d1", real(n.mae_d1)},
        {"mae_d2", real(n.mae_d2)},
        {"mae_d3", real(n.mae_d3)},
        {"perception_period", integer(n.perception_period)},
        {"distribution", [&n](std::string_view s) -> std::string {
           auto d = parse_distribution(s);
           if (!d) return "expected laplace or gaussian";
           n.distribution = *d;
           return {};
         }},
        {"rng_seed", [&](std::string_view s) -> std::string {
           auto d = to_u64(s);
           if (!d) return "expected an unsigned 64-bit integer";
           seed = *d;
           seed_given = true;
           return {};
         }}};
    apply("noise", rest, keys);
    if (seed_given) spec.noise_seed = seed;
  }

  void run(const Section& sec) {
    std::map<std::string, Setter, std::less<>> keys = {
        {"duration", opt_real(spec.duration)},
        {"laps", opt_real(spec.laps)},
        {"seed", seed64(spec.seed)},
        {"disable_agent_state", boolean(spec.disable_agent_state)},
        {"spawn_agents", integer(spec.spawn_agents)},
        {"threads", integer(spec.threads)}};
    apply("run", sec.entries, keys);
  }
};

std::vector<Section> parse_sections(std::string_view text, std::vector<ValidationError>& errors) {
  std::vector<Section> sections;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') {
        errors.push_back({line_no, "", "malformed section header"});
        continue;
      }
      const std::string name(trim(line.substr(1, line.size() - 2)));
      if (std::find(std::begin(kSections), std::end(kSections), name) == std::end(kSections)) {
        errors.push_back({line_no, name, "unknown section"});
      } else if (name != "vehicle") {
        for (const Section& s : sections) {
          if (s.name == name) errors.push_back({line_no, name, "section repeated (first at line " + std::to_string(s.line) + ")"});
        }
      }
      sections.push_back({name, line_no, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      errors.push_back({line_no, "", "expected 'key = value'"});
      continue;
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (sections.empty()) {
      errors.push_back({line_no, key, "key outside of any section"});
      continue;
    }
    if (key.empty() || value.empty()) {
      errors.push_back({line_no, key, "empty key or value"});
      continue;
    }
    sections.back().entries.push_back({key, value, line_no});
    if (end == text.size()) break;
  }
  return sections;
}

}  // namespace

std::string set_controller_field(ControllerParams& params, std::string_view key, std::string_view value) {
  auto keys = controller_keys(params);
  auto it = keys.find(key);
  if (it == keys.end()) return "unknown controller key '" + std::string(key) + "'";
  return it->second(value);
}

Override parse_override(std::string_view text) {
  const auto eq = text.find('=');
  const auto dot = text.find('.');
  if (eq == std::string_view::npos || dot == std::string_view::npos || dot > eq) {
    throw std::invalid_argument("override must look like section.key=value, got '" + std::string(text) + "'");
  }
  Override o{std::string(trim(text.substr(0, dot))), std::string(trim(text.substr(dot + 1, eq - dot - 1))),
             std::string(trim(text.substr(eq + 1)))};
  if (o.section.empty() || o.key.empty() || o.value.empty()) {
    throw std::invalid_argument("override must look like section.key=value, got '" + std::string(text) + "'");
  }
  return o;
}

ScenarioSpec load_scenario(std::string_view text, const std::vector<Override>& overrides) {
  Builder b;
  std::vector<Section> sections = parse_sections(text, b.errors);

  for (const Override& o : overrides) {
    if (o.section == "vehicle" ||
        std::find(std::begin(kSections), std::end(kSections), o.section) == std::end(kSections)) {
      b.error(0, o.section + "." + o.key, "cannot override this section");
      continue;
    }
    auto it = std::find_if(sections.begin(), sections.end(),
                           [&](const Section& s) { return s.name == o.section; });
    if (it == sections.end()) {
      sections.push_back({o.section, 0, {}});
      it = std::prev(sections.end());
    }
    it->entries.push_back({o.key, o.value, 0});
  }

  // Noise presets must be applied before per-channel keys regardless of
  // section order, and track before vehicles (for lane checks in validate).
  for (const Section& s : sections) {
    if (s.name == "track") b.track(s);
  }
  for (const Section& s : sections) {
    if (s.name == "noise") b.noise(s);
  }
  for (const Section& s : sections) {
    if (s.name == "vehicle") {
      b.vehicle(s);
    } else if (s.name == "controller") {
      auto keys = controller_keys(b.spec.controller);
      b.apply("controller", s.entries, keys);
    } else if (s.name == "dynamics") {
      auto keys = dynamics_keys(b.spec.dynamics);
      b.apply("dynamics", s.entries, keys);
    } else if (s.name == "run") {
      b.run(s);
    }
  }

  if (b.errors.empty()) {
    for (ValidationError& e : validate(b.spec)) b.errors.push_back(std::move(e));
  }
  if (!b.errors.empty()) throw ScenarioError(std::move(b.errors));
  return std::move(b.spec);
}

ScenarioSpec load_scenario_file(const std::string& path, const std::vector<Override>& overrides) {
  std::ifstream in(path);
  if (!in) throw ScenarioError({{0, path, "cannot read scenario file"}});
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_scenario(buf.str(), overrides);
}

std::vector<ValidationError> validate(const ScenarioSpec& spec) {
  std::vector<ValidationError> errors;
  auto fail = [&](int line, std::string field, std::string reason) {
    errors.push_back({line, std::move(field), std::move(reason)});
  };
  for (const std::string& msg : spec.track.check()) fail(0, "track", msg);

  auto guard = [&](const char* field, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& ex) {
      fail(0, field, ex.what());
    }
  };
  guard("controller", [&] { spec.controller.validate(); });
  guard("dynamics", [&] { spec.dynamics.validate(); });
  guard("noise", [&] { spec.noise.validate(); });
  if (spec.controller.lane_width != spec.track.lane_width ||
      spec.controller.road_width != spec.track.road_width) {
    fail(0, "controller", "lane_width/road_width must match the [track] section");
  }

  std::vector<const VehicleSpec*> hosts;
  int agents = spec.spawn_agents;
  for (const VehicleSpec& v : spec.vehicles) {
    if (v.role == Role::kHost) {
      hosts.push_back(&v);
    } else {
      ++agents;
    }
  }
  if (hosts.empty()) fail(0, "vehicle", "scenario needs exactly one host, found none");
  if (hosts.size() > 1) {
    std::ostringstream msg;
    msg << "scenario needs exactly one host, found " << hosts.size() << " (lines";
    for (const VehicleSpec* h : hosts) msg << ' ' << h->line;
    msg << ')';
    fail(hosts[1]->line, "vehicle.role", msg.str());
  }
  if (agents > kMaxAgents) {
    fail(0, "vehicle", "at most " + std::to_string(kMaxAgents) + " agents allowed, found " + std::to_string(agents));
  }
  if (spec.spawn_agents < 0) fail(0, "run.spawn_agents", "must be >= 0");
  if (spec.threads < 1) fail(0, "run.threads", "must be >= 1");
  if (spec.duration && !(*spec.duration > 0.0)) fail(0, "run.duration", "must be positive");
  if (spec.laps && !(*spec.laps > 0.0)) fail(0, "run.laps", "must be positive");
  if (!errors.empty()) return errors;

  const Track track(spec.track);
  for (std::size_t i = 0; i < spec.vehicles.size(); ++i) {
    const VehicleSpec& v = spec.vehicles[i];
    guard("vehicle", [&] { v.geometry.validate(); });
    if (v.lane < 1 || v.lane > spec.track.lane_count) {
      fail(v.line, "vehicle.lane", "lane " + std::to_string(v.lane) + " outside 1.." + std::to_string(spec.track.lane_count));
    }
    if (!(v.s >= 0.0) || (!spec.track.closed && v.s > track.total_length())) {
      fail(v.line, "vehicle.s", "position outside the course");
    }
    if (v.speed && !(*v.speed >= 0.0)) fail(v.line, "vehicle.speed", "must be >= 0");
    if (v.target_speed && !(*v.target_speed > 0.0)) fail(v.line, "vehicle.target_speed", "must be positive");
  }
  if (!errors.empty()) return errors;

  for (std::size_t i = 0; i < spec.vehicles.size(); ++i) {
    for (std::size_t j = i + 1; j < spec.vehicles.size(); ++j) {
      const VehicleSpec& a = spec.vehicles[i];
      const VehicleSpec& b = spec.vehicles[j];
      const double la = a.lateral.value_or(track.lane_center(a.lane));
      const double lb = b.lateral.value_or(track.lane_center(b.lane));
      const double gap = std::abs(track.signed_gap(a.s, b.s));
      if (gap < 0.5 * (a.geometry.length + b.geometry.length) &&
          std::abs(la - lb) < 0.5 * (a.geometry.width + b.geometry.width)) {
        std::ostringstream msg;
        msg << "spawn overlaps the vehicle declared at line " << a.line;
        fail(b.line, "vehicle.s", msg.str());
      }
    }
  }
  return errors;
}

}  // namespace dpdrive
