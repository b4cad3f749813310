#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phonoq/phase_space.hpp"

namespace phonoq {

struct SweepParams {
  double omega_ut;  // rad/s, drive amplitude scale
  double beta_cd;   // dimensionless counter-diabatic amplitude
  double delta_ut;  // rad/s, detuning sweep range
  double t_ut;      // s, total duration
  int steps;        // integrator time samples (>= 100)
};

// Closed-form sweep Delta(t) = delta_ut cos(pi t/T), Omega(t) =
// omega_ut [sin(pi t/T) + i beta_cd], sampled on steps+1 uniform times.
struct PulseSchedule {
  SweepParams params;
  std::vector<double> times;
  std::vector<double> delta;
  std::vector<Complex> omega;

  double delta_at(double t) const;
  Complex omega_at(double t) const;
};

struct DetectorModel {
  std::string name;
  std::vector<double> p_transfer;  // indexed by n; entry 0 unused (vacuum has no transfer partner)
  double dark_fidelity = 1.0;      // P(reads dark | atom in down)
  double bright_fidelity = 1.0;    // P(reads bright | atom in up)
};

PulseSchedule build_schedule(const SweepParams& params);

// Final population of |up,n-1> after integrating the two-level reduction
// { |down,n>, |up,n-1> } with H_n(t) = 1/2 [Delta sigma_z + sqrt(n) Re(Omega)
// sigma_x + sqrt(n) Im(Omega) sigma_y]; RK4 with step T/steps.
double transfer_probability(int n, const PulseSchedule& schedule);

struct VacuumCounts {
  long long dark_counts;
  long long shots;
};

// P(dark) = rho_00 f_dark + sum_{n>=1} rho_nn [(1-p_transfer[n]) f_dark
//           + p_transfer[n] (1-f_bright)].
double dark_probability(const DensityMatrix& rho, const DetectorModel& detector);

VacuumCounts measure_vacuum(const DensityMatrix& rho, const DetectorModel& detector,
                            long long shots, std::uint64_t seed);

// Per grid point: displace rho by -alpha, run measure_vacuum with a per-point
// subseed and shots_per_point * multiplicity shots, record dark/(pi*shots).
QSamples simulate_q_experiment(const DensityMatrix& rho, const PhaseSpaceGrid& grid,
                               const DetectorModel& detector, long long shots_per_point,
                               std::uint64_t seed);

}  // namespace phonoq
