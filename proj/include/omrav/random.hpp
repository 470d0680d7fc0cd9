#pragma once

#include <cstdint>
#include <random>

namespace omrav {

// Seeded generator with a portable double mapping. std::uniform_real_distribution
// is implementation-defined, so it is avoided to keep outputs byte-stable.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

private:
  std::mt19937_64 engine_;
};

// Derives an independent stream seed for sub-task `index` of a seeded job.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

}  // namespace omrav
