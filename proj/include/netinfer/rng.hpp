#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>

namespace netinfer {

// xoshiro256++ with splitmix64 seeding. All draws are built from raw 64-bit
// output with fixed arithmetic, so sequences are identical across platforms
// for a given seed. Never use std:: distributions on top of this: their
// algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 random bits.
  double uniform01();
  double uniform(double lo, double hi);

  // Unbiased integer in [0, bound). bound must be >= 1.
  std::uint64_t uniform_below(std::uint64_t bound);

  // Standard normal via the Marsaglia polar method (one spare cached).
  double normal();
  double normal(double mean, double stddev);

 private:
  std::array<std::uint64_t, 4> state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Fixed seed-mixing function used to derive independent child streams
// (per trial, per purpose) from a master seed. splitmix64-based fold.
std::uint64_t derive_seed(std::uint64_t base,
                          std::initializer_list<std::uint64_t> path);

// Purpose tags for derived streams. Values are part of the reproducibility
// contract; do not renumber.
enum class SeedPurpose : std::uint64_t {
  kGraph = 1,
  kObserved = 2,
  kCovariance = 3,
  kNoise = 4,
  kIntervention = 5,
  kGmm = 6,
  kFfnn = 7,
};

inline std::uint64_t purpose_id(SeedPurpose p) {
  return static_cast<std::uint64_t>(p);
}

}  // namespace netinfer
