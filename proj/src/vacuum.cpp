#include "phonoq/vacuum.hpp"

#include <algorithm>
#include <cmath>
#include "phonoq/detail/format.hpp"
#include <numbers>

#include "phonoq/rng.hpp"

namespace phonoq {

namespace {

constexpr double kPi = std::numbers::pi;

void validate_sweep(const SweepParams& p) {
  if (!(p.omega_ut > 0.0) || !(p.delta_ut > 0.0) || !(p.t_ut > 0.0)) {
    throw ValidationError("sweep frequencies and duration must be > 0");
  }
  if (p.beta_cd < 0.0) throw ValidationError("beta_cd must be >= 0");
  if (p.steps < 100) throw ValidationError(phonoq::detail::format("sweep needs >= 100 steps, got {}", p.steps));
}

void validate_detector(const DetectorModel& d, int dim) {
  if (static_cast<int>(d.p_transfer.size()) < dim) {
    throw DimensionMismatch(phonoq::detail::format("detector transfer table covers {} levels, state has {}",
                                        d.p_transfer.size(), dim));
  }
  for (std::size_t n = 1; n < d.p_transfer.size(); ++n) {
    if (d.p_transfer[n] < 0.0 || d.p_transfer[n] > 1.0) {
      throw ValidationError(phonoq::detail::format("p_transfer[{}] = {:.6g} outside [0,1]", n, d.p_transfer[n]));
    }
  }
  if (d.dark_fidelity < 0.0 || d.dark_fidelity > 1.0 || d.bright_fidelity < 0.0 ||
      d.bright_fidelity > 1.0) {
    throw ValidationError("readout fidelities must be in [0,1]");
  }
}

}  // namespace

double PulseSchedule::delta_at(double t) const {
  return params.delta_ut * std::cos(kPi * t / params.t_ut);
}

Complex PulseSchedule::omega_at(double t) const {
  return params.omega_ut * Complex(std::sin(kPi * t / params.t_ut), params.beta_cd);
}

PulseSchedule build_schedule(const SweepParams& params) {
  validate_sweep(params);
  PulseSchedule schedule{params, {}, {}, {}};
  schedule.times.reserve(params.steps + 1);
  schedule.delta.reserve(params.steps + 1);
  schedule.omega.reserve(params.steps + 1);
  for (int i = 0; i <= params.steps; ++i) {
    double t = params.t_ut * i / params.steps;
    schedule.times.push_back(t);
    schedule.delta.push_back(schedule.delta_at(t));
    schedule.omega.push_back(schedule.omega_at(t));
  }
  return schedule;
}

double transfer_probability(int n, const PulseSchedule& schedule) {
  if (n < 1) {
    throw ValidationError("transfer is defined for n >= 1; vacuum has no transfer partner");
  }
  double sqrt_n = std::sqrt(static_cast<double>(n));
  // Basis (|down,n>, |up,n-1>).
  auto deriv = [&](double t, const Eigen::Vector2cd& psi) {
    double half_delta = 0.5 * schedule.delta_at(t);
    Complex coupling = 0.5 * sqrt_n * std::conj(schedule.omega_at(t));
    Eigen::Vector2cd h_psi;
    h_psi(0) = half_delta * psi(0) + coupling * psi(1);
    h_psi(1) = std::conj(coupling) * psi(0) - half_delta * psi(1);
    return Eigen::Vector2cd(Complex(0.0, -1.0) * h_psi);
  };

  Eigen::Vector2cd psi(1.0, 0.0);
  double h = schedule.params.t_ut / schedule.params.steps;
  for (int i = 0; i < schedule.params.steps; ++i) {
    double t = i * h;
    Eigen::Vector2cd k1 = deriv(t, psi);
    Eigen::Vector2cd k2 = deriv(t + 0.5 * h, psi + (0.5 * h) * k1);
    Eigen::Vector2cd k3 = deriv(t + 0.5 * h, psi + (0.5 * h) * k2);
    Eigen::Vector2cd k4 = deriv(t + h, psi + h * k3);
    psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  double p = std::norm(psi(1)) / psi.squaredNorm();
  return std::clamp(p, 0.0, 1.0);
}

double dark_probability(const DensityMatrix& rho, const DetectorModel& detector) {
  if (rho.tag() != SpaceTag::phonon) throw SpaceMismatch("vacuum measurement needs a phonon state");
  validate_detector(detector, rho.dim());
  double f_dark = detector.dark_fidelity;
  double bright_leak = 1.0 - detector.bright_fidelity;
  double p = rho.entries()(0, 0).real() * f_dark;
  for (int n = 1; n < rho.dim(); ++n) {
    double pop = rho.entries()(n, n).real();
    double p_t = detector.p_transfer[n];
    p += pop * ((1.0 - p_t) * f_dark + p_t * bright_leak);
  }
  return std::clamp(p, 0.0, 1.0);
}

VacuumCounts measure_vacuum(const DensityMatrix& rho, const DetectorModel& detector,
                            long long shots, std::uint64_t seed) {
  if (shots < 1) throw ValidationError("shots must be >= 1");
  double p_dark = dark_probability(rho, detector);
  rng::SplitMix64 gen(seed);
  return VacuumCounts{rng::binomial(gen, shots, p_dark), shots};
}

QSamples simulate_q_experiment(const DensityMatrix& rho, const PhaseSpaceGrid& grid,
                               const DetectorModel& detector, long long shots_per_point,
                               std::uint64_t seed) {
  if (shots_per_point < 1) throw ValidationError("shots_per_point must be >= 1");
  FockSpace space(rho.dim());
  QSamples out;
  out.layout = grid.layout;
  out.exact = false;
  out.samples.reserve(grid.points.size());
  for (std::size_t k = 0; k < grid.points.size(); ++k) {
    const GridPoint& point = grid.points[k];
    Mat d = displacement_operator(-point.alpha, space);
    Mat displaced = d * rho.entries() * d.adjoint();
    displaced = 0.5 * (displaced + displaced.adjoint()).eval();
    DensityMatrix rho_displaced = DensityMatrix::phonon(std::move(displaced));
    long long shots = shots_per_point * point.multiplicity;
    VacuumCounts counts =
        measure_vacuum(rho_displaced, detector, shots, rng::derive_subseed(seed, k));
    out.samples.push_back({point.alpha,
                           static_cast<double>(counts.dark_counts) / (kPi * shots),
                           counts.shots, counts.dark_counts});
  }
  return out;
}

}  // namespace phonoq
