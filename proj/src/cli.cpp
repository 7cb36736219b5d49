#include "dpdrive/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "dpdrive/scenario.hpp"
#include "dpdrive/sim.hpp"
#include "dpdrive/verify.hpp"

namespace dpdrive {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::optional<ScenarioSpec> load(const CliConfig& c, std::ostream& err) {
  if (c.scenario.empty()) {
    err << "error: --scenario is required for " << c.command << '\n';
    return std::nullopt;
  }
  std::vector<Override> overrides;
  try {
    for (const std::string& o : c.overrides) overrides.push_back(parse_override(o));
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return std::nullopt;
  }
  if (c.seed) overrides.push_back({"run", "seed", std::to_string(*c.seed)});
  if (c.threads > 0) overrides.push_back({"run", "threads", std::to_string(c.threads)});
  try {
    return load_scenario_file(c.scenario, overrides);
  } catch (const ScenarioError& e) {
    err << "error: invalid scenario " << c.scenario << ":\n" << format_errors(e.errors()) << '\n';
    return std::nullopt;
  }
}

bool make_out_dir(const std::string& dir, std::ostream& err) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    err << "error: cannot create output directory " << dir << '\n';
    return false;
  }
  return true;
}

bool open_out(std::ofstream& f, const std::filesystem::path& path, std::ostream& err) {
  f.open(path, std::ios::binary);
  if (!f) err << "error: cannot write " << path.string() << '\n';
  return static_cast<bool>(f);
}

void summary(std::ostream& out, const RunMetrics& m) {
  out << "  ticks " << m.ticks << ", sim time " << num(m.sim_time) << " s, laps " << num(m.laps_completed)
      << '\n';
  out << "  damage: host " << m.host_damage << ", agents " << m.agent_damage << ", total "
      << m.total_damage << '\n';
  out << "  overtakes " << m.overtakes.size() << ", max |to_middle| " << num(m.max_abs_to_middle)
      << " m\n";
}

template <typename Fn>
void parallel_for(std::size_t count, Fn fn) {
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(count, std::thread::hardware_concurrency()));
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
}

}  // namespace

int cmd_run(const CliConfig& c, std::ostream& out, std::ostream& err) {
  const auto spec = load(c, err);
  if (!spec || !make_out_dir(c.out_dir, err)) return kExitUsage;
  const std::filesystem::path dir(c.out_dir);
  std::ofstream log, metrics;
  if (!open_out(log, dir / "log.csv", err) || !open_out(metrics, dir / "metrics.txt", err)) {
    return kExitUsage;
  }
  RunOptions opt;
  opt.log = &log;
  const RunMetrics m = run(*spec, opt);
  write_metrics(metrics, m);
  out << "run " << c.scenario << " seed " << spec->seed << '\n';
  summary(out, m);
  out << "  wrote " << (dir / "log.csv").string() << " and " << (dir / "metrics.txt").string() << '\n';
  return kExitOk;
}

int cmd_ablate(const CliConfig& c, std::ostream& out, std::ostream& err) {
  const auto spec = load(c, err);
  if (!spec || !make_out_dir(c.out_dir, err)) return kExitUsage;
  ScenarioSpec full = *spec;
  full.disable_agent_state = false;
  ScenarioSpec ablated = *spec;
  ablated.disable_agent_state = true;

  RunMetrics results[2];
  parallel_for(2, [&](std::size_t i) { results[i] = run(i == 0 ? full : ablated); });
  const RunMetrics& a = results[0];
  const RunMetrics& b = results[1];

  const std::filesystem::path dir(c.out_dir);
  std::ofstream table;
  if (!open_out(table, dir / "ablation.csv", err)) return kExitUsage;
  table << "vehicle_id,role,damage_full,damage_ablated\n";
  out << std::left << std::setw(10) << "vehicle" << std::setw(8) << "role" << std::right << std::setw(10)
      << "full" << std::setw(10) << "ablated" << '\n';
  const Setup setup = build_world(full);
  for (std::size_t i = 0; i < a.damage.size(); ++i) {
    const std::string role(to_string(setup.world.vehicles[i].state.role));
    table << i << ',' << role << ',' << a.damage[i] << ',' << b.damage[i] << '\n';
    out << std::left << std::setw(10) << i << std::setw(8) << role << std::right << std::setw(10)
        << a.damage[i] << std::setw(10) << b.damage[i] << '\n';
  }
  table << "total,," << a.total_damage << ',' << b.total_damage << '\n';
  out << std::left << std::setw(18) << "total" << std::right << std::setw(10) << a.total_damage
      << std::setw(10) << b.total_damage << '\n';

  if (a.total_damage == 0 && b.total_damage > 0) {
    out << "confirmed: full controller 0 damage, ablated " << b.total_damage << '\n';
    return kExitOk;
  }
  if (a.total_damage == 0 && b.total_damage == 0) {
    out << "not confirmed: ablation not discriminative (both variants undamaged)\n";
  } else {
    out << "not confirmed: full controller damage " << a.total_damage << '\n';
  }
  return kExitNotConfirmed;
}

int cmd_sweep(const CliConfig& c, std::ostream& out, std::ostream& err) {
  const auto spec = load(c, err);
  if (!spec) return kExitUsage;
  if (c.multipliers.empty() || c.seeds < 1) {
    err << "error: sweep needs at least one multiplier and --seeds >= 1\n";
    return kExitUsage;
  }
  for (double m : c.multipliers) {
    if (!(m >= 0.0)) {
      err << "error: multipliers must be nonnegative\n";
      return kExitUsage;
    }
  }
  if (!make_out_dir(c.out_dir, err)) return kExitUsage;

  const std::size_t nm = c.multipliers.size();
  const std::size_t ns = static_cast<std::size_t>(c.seeds);
  std::vector<RunMetrics> results(nm * ns);
  parallel_for(results.size(), [&](std::size_t k) {
    ScenarioSpec s = *spec;
    s.noise = spec->noise.scaled(c.multipliers[k / ns]);
    s.seed = spec->seed + k % ns;
    s.threads = 1;
    results[k] = run(s);
  });

  std::ofstream csv;
  if (!open_out(csv, std::filesystem::path(c.out_dir) / "sweep.csv", err)) return kExitUsage;
  csv << "multiplier,seed,host_damage,agent_damage,total_damage";
  for (const char* ch : kChannelNames) csv << ",dmae_" << ch;
  csv << ",overtakes\n";
  std::vector<double> medians;
  for (std::size_t i = 0; i < nm; ++i) {
    std::vector<std::int64_t> damage;
    for (std::size_t j = 0; j < ns; ++j) {
      const RunMetrics& m = results[i * ns + j];
      csv << num(c.multipliers[i]) << ',' << spec->seed + j << ',' << m.host_damage << ',' << m.agent_damage
          << ',' << m.total_damage;
      for (double d : m.dmae) csv << ',' << num(d);
      csv << ',' << m.overtakes.size() << '\n';
      damage.push_back(m.total_damage);
    }
    std::sort(damage.begin(), damage.end());
    const double median = ns % 2 ? static_cast<double>(damage[ns / 2])
                                 : 0.5 * static_cast<double>(damage[ns / 2 - 1] + damage[ns / 2]);
    medians.push_back(median);
    out << "multiplier " << num(c.multipliers[i]) << ": median damage " << num(median) << " over " << ns
        << " seeds\n";
  }

  std::vector<std::size_t> order(nm);
  for (std::size_t i = 0; i < nm; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return c.multipliers[x] < c.multipliers[y]; });
  bool monotone = true;
  for (std::size_t i = 1; i < nm; ++i) monotone = monotone && medians[order[i]] >= medians[order[i - 1]];
  out << (monotone ? "confirmed" : "not confirmed") << ": median damage nondecreasing in multiplier\n";
  return monotone ? kExitOk : kExitNotConfirmed;
}

int cmd_verify(const CliConfig& c, std::ostream& out, std::ostream& err) {
  ControllerParams production;
  const ControllerParams oracle;
  for (const std::string& text : c.inject) {
    Override o;
    try {
      o = parse_override(text);
    } catch (const std::invalid_argument& e) {
      err << "error: " << e.what() << '\n';
      return kExitUsage;
    }
    if (o.section != "controller") {
      err << "error: --inject only accepts controller.* keys\n";
      return kExitUsage;
    }
    const std::string msg = set_controller_field(production, o.key, o.value);
    if (!msg.empty()) {
      err << "error: " << msg << '\n';
      return kExitUsage;
    }
  }
  if (c.tuples < 1) {
    err << "error: --tuples must be positive\n";
    return kExitUsage;
  }
  const VerifyReport r = verify_controller(production, oracle, c.seed.value_or(1), c.tuples);
  for (const AlgorithmCheck& a : r.checks) {
    out << std::left << std::setw(10) << a.name << std::setw(28) << a.title << std::right << std::setw(8)
        << a.tuples << "  max dev " << num(a.max_deviation) << (a.passed ? "  ok" : "  MISMATCH") << '\n';
  }
  if (r.ok()) {
    out << "confirmed: production matches the reference within " << num(r.tolerance) << '\n';
    return kExitOk;
  }
  out << "not confirmed: mismatch in";
  for (const std::string& name : r.failing()) out << ' ' << name;
  out << '\n';
  return kExitNotConfirmed;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-lane traffic simulator with an indicator-driven controller"};
  app.require_subcommand(1);
  CliConfig c;
  std::string multipliers;

  auto common = [&](CLI::App* sub, bool needs_scenario) {
    auto* opt = sub->add_option("--scenario", c.scenario, "Scenario file");
    if (needs_scenario) opt->required();
    sub->add_option("--out", c.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--seed", c.seed, "Seed override");
    sub->add_option("--set", c.overrides, "Override section.key=value (repeatable)");
    sub->add_option("--threads", c.threads, "Worker threads inside one run");
  };
  auto* run_cmd = app.add_subcommand("run", "Run a scenario, write log.csv and metrics.txt");
  common(run_cmd, true);
  auto* ablate_cmd = app.add_subcommand("ablate", "Compare the full controller with agent states disabled");
  common(ablate_cmd, true);
  auto* sweep_cmd = app.add_subcommand("sweep", "Scale every noise MAE by each multiplier");
  common(sweep_cmd, true);
  sweep_cmd->add_option("--multipliers", multipliers, "Comma-separated list, e.g. 0,1,2,4,8");
  sweep_cmd->add_option("--seeds", c.seeds, "Seeds per multiplier")->capture_default_str();
  auto* verify_cmd = app.add_subcommand("verify", "Check the controller against the reference transcription");
  verify_cmd->add_option("--seed", c.seed, "Input generator seed");
  verify_cmd->add_option("--tuples", c.tuples, "Random inputs per algorithm")->capture_default_str();
  verify_cmd->add_option("--inject", c.inject, "controller.key=value applied to the production side only");

  std::vector<std::string> rest(args.rbegin(), args.rend());
  if (!rest.empty()) rest.pop_back();  // program name
  try {
    app.parse(rest);
    if (!multipliers.empty()) {
      c.multipliers.clear();
      std::stringstream ss(multipliers);
      std::string item;
      while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        const double v = std::stod(item, &used);
        if (used != item.size()) throw std::invalid_argument(item);
        c.multipliers.push_back(v);
      }
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const std::exception&) {
    err << "error: --multipliers expects numbers separated by commas\n";
    return kExitUsage;
  }

  if (run_cmd->parsed()) c.command = "run";
  if (ablate_cmd->parsed()) c.command = "ablate";
  if (sweep_cmd->parsed()) c.command = "sweep";
  if (verify_cmd->parsed()) c.command = "verify";

  if (c.command == "run") return cmd_run(c, out, err);
  if (c.command == "ablate") return cmd_ablate(c, out, err);
  if (c.command == "sweep") return cmd_sweep(c, out, err);
  return cmd_verify(c, out, err);
}

}  // namespace dpdrive
