#pragma once

#include <array>
#include <cstdint>

namespace dpdrive {

// Portable pseudo-random source. The standard library's distributions are
// implementation-defined, so sampling is done here to keep logs
// bit-identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  // Uniform on the open interval (0, 1).
  double uniform();
  double uniform(double lo, double hi);
  // Laplace(0, scale): mean absolute value equals scale.
  double laplace(double scale);
  double gaussian(double sigma);

 private:
  std::array<std::uint64_t, 4> s_{};
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t& state);

// Named consumers of the scenario seed. Each gets an independent stream so
// adding a consumer never shifts the draws of another.
enum class Stream : std::uint64_t {
  kSpawn = 1,
  kHostNoise = 2,
};

// stream seed = splitmix64 applied to (seed XOR (stream * 0x9E3779B97F4A7C15)).
std::uint64_t derive_seed(std::uint64_t seed, Stream stream);

}  // namespace dpdrive
