#pragma once

#include <string>
#include <vector>

#include "phonoq/fock.hpp"

namespace phonoq {

struct GridPoint {
  Complex alpha;
  int multiplicity;  // shot-budget multiplier; 1 except the polar origin
};

struct PhaseSpaceGrid {
  std::vector<GridPoint> points;
  std::string layout;

  // Radii r_step..r_max times n_phases phases, plus the origin once with
  // multiplicity n_phases (it is phase-degenerate, so it absorbs one full
  // phase ring of the shot budget).
  static PhaseSpaceGrid polar(double r_max, double r_step, int n_phases);
  static PhaseSpaceGrid cartesian(double x0, double x1, double y0, double y1, double step);
  static PhaseSpaceGrid custom(const std::vector<Complex>& pts);

  int total_settings() const;
};

inline constexpr long long kExactShotsMarker = -1;

struct QSample {
  Complex alpha;
  double q_estimate;
  long long shots;        // kExactShotsMarker for exact values
  long long dark_counts;  // kExactShotsMarker for exact values
};

struct QSamples {
  std::vector<QSample> samples;
  std::string layout;
  bool exact = false;
};

// (1/pi) <alpha|rho|alpha>, in [0, 1/pi].
double q_function(const DensityMatrix& rho, Complex alpha);

QSamples q_grid(const DensityMatrix& rho, const PhaseSpaceGrid& grid);

// Displaced-parity form (2/pi) Tr[rho D(alpha) P D(alpha)^+], normalized so
// the phase-space integral of W is 1. Requires 2|alpha| within the
// displacement bound of rho's space.
double wigner_function(const DensityMatrix& rho, Complex alpha);

std::vector<double> wigner_grid(const DensityMatrix& rho, const PhaseSpaceGrid& grid);

}  // namespace phonoq
