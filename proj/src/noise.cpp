#include "dpdrive/noise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dpdrive {

void NoiseModel::validate() const {
  for (double m : {mae_angle, mae_to_middle, mae_d1, mae_d2, mae_d3}) {
    if (!(m >= 0.0) || !std::isfinite(m)) throw std::invalid_argument("noise MAE must be finite and >= 0");
  }
  if (perception_period < 1) throw std::invalid_argument("perception_period must be >= 1");
}

NoiseModel NoiseModel::scaled(double multiplier) const {
  NoiseModel out = *this;
  out.mae_angle *= multiplier;
  out.mae_to_middle *= multiplier;
  out.mae_d1 *= multiplier;
  out.mae_d2 *= multiplier;
  out.mae_d3 *= multiplier;
  return out;
}

namespace {

struct Preset {
  std::string_view name;
  double angle, to_middle, d1, d2, d3;
};

constexpr Preset kPresets[] = {
    {"none", 0.0, 0.0, 0.0, 0.0, 0.0},
    {"alexnet+", 0.034, 0.539, 6.864, 7.048, 8.388},
    {"googlenet", 0.041, 0.389, 5.190, 3.227, 5.905},
    {"googlenet+", 0.029, 0.347, 6.055, 3.155, 5.450},
    {"dynamic", 0.043, 0.397, 8.315, 9.233, 10.198},
};

}  // namespace

std::optional<NoiseModel> noise_preset(std::string_view name) {
  for (const Preset& p : kPresets) {
    if (p.name == name) {
      NoiseModel m;
      m.mae_angle = p.angle;
      m.mae_to_middle = p.to_middle;
      m.mae_d1 = p.d1;
      m.mae_d2 = p.d2;
      m.mae_d3 = p.d3;
      return m;
    }
  }
  return std::nullopt;
}

std::vector<std::string> noise_preset_names() {
  std::vector<std::string> out;
  for (const Preset& p : kPresets) out.emplace_back(p.name);
  return out;
}

std::optional<NoiseDistribution> parse_distribution(std::string_view name) {
  if (name == "laplace") return NoiseDistribution::kLaplace;
  if (name == "gaussian") return NoiseDistribution::kGaussian;
  return std::nullopt;
}

std::string_view to_string(NoiseDistribution d) {
  return d == NoiseDistribution::kLaplace ? "laplace" : "gaussian";
}

Perceiver::Perceiver(NoiseModel model) : model_(model), rng_(model.rng_seed) { model_.validate(); }

double Perceiver::draw(double mae) {
  if (model_.distribution == NoiseDistribution::kLaplace) return rng_.laplace(mae);
  // E|X| = sigma * sqrt(2 / pi) for a centered normal.
  return rng_.gaussian(mae * std::sqrt(3.14159265358979323846 / 2.0));
}

Indicators Perceiver::perceive(const Indicators& truth, std::int64_t tick) {
  const NoiseModel& m = model_;
  if (m.mae_angle == 0.0 && m.mae_to_middle == 0.0 && m.mae_d1 == 0.0 && m.mae_d2 == 0.0 &&
      m.mae_d3 == 0.0) {
    return truth;
  }
  if (held_ && tick % m.perception_period != 0) return *held_;

  noise_.angle = draw(m.mae_angle);
  noise_.to_middle = draw(m.mae_to_middle);
  noise_.d1 = draw(m.mae_d1);
  noise_.d2 = draw(m.mae_d2);
  noise_.d3 = draw(m.mae_d3);
  held_ = apply(truth, noise_);
  return *held_;
}

Indicators Perceiver::unheld(const Indicators& truth) const { return apply(truth, noise_); }

Indicators Perceiver::apply(const Indicators& truth, const Indicators& noise) {
  Indicators out;
  out.angle = truth.angle + noise.angle;
  out.to_middle = truth.to_middle + noise.to_middle;
  out.d1 = std::clamp(truth.d1 + noise.d1, 0.0, kDistanceCap);
  out.d2 = std::clamp(truth.d2 + noise.d2, 0.0, kDistanceCap);
  out.d3 = std::clamp(truth.d3 + noise.d3, 0.0, kDistanceCap);
  return out;
}

}  // namespace dpdrive
