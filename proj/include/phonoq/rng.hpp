#pragma once

#include <cstdint>

namespace phonoq::rng {

// Recorded in output headers; changing the generator or the subseed
// derivation requires a new identifier.
inline constexpr const char* kAlgorithmId = "splitmix64-v1";

struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next();
  double uniform01();  // [0, 1), 53-bit resolution
};

// Deterministic per-index substream so grid points can be sampled in any
// order (or in parallel) without changing the draws.
std::uint64_t derive_subseed(std::uint64_t seed, std::uint64_t index);

// Inverse-CDF sampling with the pmf tracked in log space (stable for large n).
long long binomial(SplitMix64& gen, long long n, double p);

}  // namespace phonoq::rng
