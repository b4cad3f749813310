#include "phonoq/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace phonoq::rng {

std::uint64_t SplitMix64::next() {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform01() { return (next() >> 11) * 0x1.0p-53; }

std::uint64_t derive_subseed(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 outer(seed);
  std::uint64_t mixed_seed = outer.next();
  SplitMix64 inner(mixed_seed ^ (index * 0xD2B74407B1CE6E93ULL + 0x9E3779B97F4A7C15ULL));
  return inner.next();
}

long long binomial(SplitMix64& gen, long long n, double p) {
  if (n < 0) throw std::invalid_argument("binomial requires n >= 0");
  if (n == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  double u = gen.uniform01();
  double log_p = std::log(p);
  double log_q = std::log1p(-p);
  double log_pmf = n * log_q;
  double cdf = std::exp(log_pmf);
  long long k = 0;
  while (u > cdf && k < n) {
    log_pmf += std::log(static_cast<double>(n - k)) - std::log(k + 1.0) + log_p - log_q;
    ++k;
    cdf += std::exp(log_pmf);
  }
  return k;
}

}  // namespace phonoq::rng
