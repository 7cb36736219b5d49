#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace dpdrive {

enum ExitCode : int { kExitOk = 0, kExitNotConfirmed = 1, kExitUsage = 2 };

struct CliConfig {
  std::string command;  // run | ablate | sweep | verify
  std::string scenario;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;  // section.key=value
  std::vector<double> multipliers{0.0, 1.0, 2.0, 4.0, 8.0};
  int seeds = 10;
  int threads = 0;
  long tuples = 10000;
  // verify only: controller.key=value applied to the production side.
  std::vector<std::string> inject;
};

int cmd_run(const CliConfig& config, std::ostream& out, std::ostream& err);
int cmd_ablate(const CliConfig& config, std::ostream& out, std::ostream& err);
int cmd_sweep(const CliConfig& config, std::ostream& out, std::ostream& err);
int cmd_verify(const CliConfig& config, std::ostream& out, std::ostream& err);

// Parses argv (argv[0] is the program name) and dispatches.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dpdrive
