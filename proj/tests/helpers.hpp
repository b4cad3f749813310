#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include "phonoq/fock.hpp"
#include "phonoq/rng.hpp"

namespace testutil {

using phonoq::Complex;
using phonoq::Mat;
using phonoq::Vec;

inline Complex random_disk(phonoq::rng::SplitMix64& gen, double radius) {
  double r = radius * std::sqrt(gen.uniform01());
  double th = 2.0 * std::numbers::pi * gen.uniform01();
  return {r * std::cos(th), r * std::sin(th)};
}

inline double gaussian(phonoq::rng::SplitMix64& gen) {
  double u1 = std::max(gen.uniform01(), 1e-300);
  double u2 = gen.uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline Vec random_pure(phonoq::rng::SplitMix64& gen, int dim) {
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v(i) = Complex(gaussian(gen), gaussian(gen));
  v /= v.norm();
  return v;
}

inline Mat random_density(phonoq::rng::SplitMix64& gen, int dim, int rank) {
  Mat g(dim, rank);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < rank; ++j) g(i, j) = Complex(gaussian(gen), gaussian(gen));
  }
  Mat rho = g * g.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint().eval());
}

}  // namespace testutil
