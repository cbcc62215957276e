#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace airbs {

/// splitmix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return mix64(mix64(master) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

/// Named generator streams inside one replication.
enum class Stream : std::uint64_t { Placement = 1, Users = 2, Traffic = 3, Measurement = 4, KMeans = 5 };

/// Seeded generator with platform-independent variates.
///
/// std::uniform_real_distribution and friends are implementation-defined, so
/// the variates here are built directly from the 64-bit engine output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t master, Stream stream) : engine_(derive_seed(master, static_cast<std::uint64_t>(stream))) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n), n > 0, by rejection sampling.
  std::size_t index(std::size_t n);

  /// Standard normal via Box-Muller; caches the second variate.
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace airbs
