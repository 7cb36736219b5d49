#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dpdrive/rng.hpp"
#include "dpdrive/sensors.hpp"

namespace dpdrive {

enum class NoiseDistribution { kLaplace, kGaussian };

// Perception error model standing in for a learned indicator regressor.
// Each channel gets zero-mean noise whose mean absolute value is the
// channel's MAE; fresh samples are drawn every perception_period ticks and
// held in between.
struct NoiseModel {
  double mae_angle = 0.0;
  double mae_to_middle = 0.0;
  double mae_d1 = 0.0;
  double mae_d2 = 0.0;
  double mae_d3 = 0.0;
  NoiseDistribution distribution = NoiseDistribution::kLaplace;
  int perception_period = 2;
  std::uint64_t rng_seed = 0;

  void validate() const;
  NoiseModel scaled(double multiplier) const;
};

// Measured per-channel errors of the regressors the presets mirror:
// "alexnet+", "googlenet", "googlenet+" (static test set) and "dynamic"
// (closed-loop errors of the five-indicator AlexNet variant). "none" is the
// zero-noise model.
std::optional<NoiseModel> noise_preset(std::string_view name);
std::vector<std::string> noise_preset_names();

std::optional<NoiseDistribution> parse_distribution(std::string_view name);
std::string_view to_string(NoiseDistribution d);

// One per host. Not thread-safe.
class Perceiver {
 public:
  explicit Perceiver(NoiseModel model);

  // Fresh noisy sample on ticks where tick % period == 0 (or when nothing
  // has been perceived yet); otherwise the previous output unchanged.
  Indicators perceive(const Indicators& truth, std::int64_t tick);

  // The current error realization applied to `truth` without the hold:
  // what a fresh perception of this very frame would return. Equals truth
  // before the first perceive() call.
  Indicators unheld(const Indicators& truth) const;

  // Raw draws of the latest fresh sample, before the distance clamp.
  const Indicators& last_error() const { return noise_; }

  const NoiseModel& model() const { return model_; }

 private:
  double draw(double mae);
  static Indicators apply(const Indicators& truth, const Indicators& noise);

  NoiseModel model_;
  Rng rng_;
  std::optional<Indicators> held_;
  Indicators noise_{0.0, 0.0, 0.0, 0.0, 0.0};
};

}  // namespace dpdrive
