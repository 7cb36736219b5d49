#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dpdrive/types.hpp"

namespace dpdrive {

struct AlgorithmCheck {
  std::string name;   // "A1" .. "A8", "pipeline"
  std::string title;
  long tuples = 0;
  double max_deviation = 0.0;
  bool passed = false;
};

struct VerifyReport {
  double tolerance = 0.0;
  std::vector<AlgorithmCheck> checks;
  bool ok() const;
  std::vector<std::string> failing() const;
};

// Runs the production controller with `production` and the line-by-line
// transcription with `oracle` over `tuples` seeded random inputs per
// algorithm. Distinct parameter sets exist so a fault injected on one side
// can be shown to be caught.
VerifyReport verify_controller(const ControllerParams& production, const ControllerParams& oracle,
                               std::uint64_t seed, long tuples = 10000, double tolerance = 1e-12);

}  // namespace dpdrive
