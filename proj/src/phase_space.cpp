#include "phonoq/phase_space.hpp"

#include <algorithm>
#include <cmath>
#include "phonoq/detail/format.hpp"
#include <numbers>

namespace phonoq {

namespace {

constexpr double kPi = std::numbers::pi;

int effective_support(const Mat& rho) {
  for (int k = rho.rows() - 1; k >= 0; --k) {
    if (rho.row(k).cwiseAbs().maxCoeff() > 0.0 || rho.col(k).cwiseAbs().maxCoeff() > 0.0) {
      return k + 1;
    }
  }
  return 1;
}

// <m|D(b)|k> over the support block, via the generalized-Laguerre closed form;
// exact for any state supported on the block, independent of the full space.
Mat displacement_block(Complex b, int support) {
  Mat d2 = Mat::Zero(support, support);
  double x = std::norm(b);
  double log_mag_b = std::log(std::abs(b));
  double phase_b = std::arg(b);
  for (int d = 0; d < support; ++d) {
    double l_prev = 1.0;
    double l_curr = 1.0 + d - x;
    for (int k = 0; k + d < support; ++k) {
      double l_k = k == 0 ? l_prev : l_curr;
      if (k >= 2) {
        double l_next = ((2.0 * (k - 1) + d + 1.0 - x) * l_curr - (k - 1.0 + d) * l_prev) / k;
        l_prev = l_curr;
        l_curr = l_next;
        l_k = l_curr;
      }
      int m = k + d;
      double log_pref = 0.5 * (std::lgamma(k + 1.0) - std::lgamma(m + 1.0)) + d * log_mag_b - 0.5 * x;
      Complex val = std::exp(log_pref) * l_k *
                    Complex(std::cos(d * phase_b), std::sin(d * phase_b));
      d2(m, k) = val;
      d2(k, m) = (d % 2 == 0) ? std::conj(val) : -std::conj(val);
    }
  }
  return d2;
}

double wigner_eval(const Mat& rho, int support, Complex alpha) {
  Complex b = 2.0 * alpha;
  if (std::abs(b) == 0.0) {
    double acc = 0.0;
    for (int n = 0; n < support; ++n) acc += (n % 2 == 0 ? 1.0 : -1.0) * rho(n, n).real();
    return (2.0 / kPi) * acc;
  }
  Mat d2 = displacement_block(b, support);
  Complex acc = 0.0;
  for (int i = 0; i < support; ++i) {
    double sign = i % 2 == 0 ? 1.0 : -1.0;
    for (int j = 0; j < support; ++j) acc += sign * rho(i, j) * d2(j, i);
  }
  return (2.0 / kPi) * acc.real();
}

}  // namespace

PhaseSpaceGrid PhaseSpaceGrid::polar(double r_max, double r_step, int n_phases) {
  if (!(r_max > 0.0) || !(r_step > 0.0) || n_phases < 1 || r_max + 1e-12 < r_step) {
    throw ValidationError("polar grid requires r_max >= r_step > 0 and n_phases >= 1");
  }
  int n_radii = static_cast<int>(std::round(r_max / r_step));
  PhaseSpaceGrid grid;
  grid.layout = phonoq::detail::format("polar({},{},{})", r_max, r_step, n_phases);
  grid.points.reserve(1 + static_cast<std::size_t>(n_radii) * n_phases);
  grid.points.push_back({Complex(0.0, 0.0), n_phases});
  for (int i = 1; i <= n_radii; ++i) {
    double r = i * r_step;
    for (int j = 0; j < n_phases; ++j) {
      double phase = 2.0 * kPi * j / n_phases;
      grid.points.push_back({Complex(r * std::cos(phase), r * std::sin(phase)), 1});
    }
  }
  return grid;
}

PhaseSpaceGrid PhaseSpaceGrid::cartesian(double x0, double x1, double y0, double y1, double step) {
  if (!(step > 0.0) || x1 < x0 || y1 < y0) {
    throw ValidationError("cartesian grid requires step > 0 and non-empty ranges");
  }
  int nx = static_cast<int>(std::floor((x1 - x0) / step + 1e-9)) + 1;
  int ny = static_cast<int>(std::floor((y1 - y0) / step + 1e-9)) + 1;
  PhaseSpaceGrid grid;
  grid.layout = phonoq::detail::format("cartesian({},{},{},{},{})", x0, x1, y0, y1, step);
  grid.points.reserve(static_cast<std::size_t>(nx) * ny);
  for (int ix = 0; ix < nx; ++ix) {
    for (int iy = 0; iy < ny; ++iy) {
      grid.points.push_back({Complex(x0 + ix * step, y0 + iy * step), 1});
    }
  }
  return grid;
}

PhaseSpaceGrid PhaseSpaceGrid::custom(const std::vector<Complex>& pts) {
  if (pts.empty()) throw ValidationError("custom grid needs at least one point");
  PhaseSpaceGrid grid;
  grid.layout = "custom";
  grid.points.reserve(pts.size());
  for (Complex p : pts) grid.points.push_back({p, 1});
  return grid;
}

int PhaseSpaceGrid::total_settings() const {
  int total = 0;
  for (const GridPoint& p : points) total += p.multiplicity;
  return total;
}

double q_function(const DensityMatrix& rho, Complex alpha) {
  if (rho.tag() != SpaceTag::phonon) throw SpaceMismatch("q_function requires a phonon density matrix");
  require_displaceable(alpha, rho.dim());
  Vec c = coherent_amplitudes_raw(alpha, rho.dim());
  double q = (c.adjoint() * rho.entries() * c)(0).real() / kPi;
  return std::clamp(q, 0.0, 1.0 / kPi);
}

QSamples q_grid(const DensityMatrix& rho, const PhaseSpaceGrid& grid) {
  QSamples out;
  out.layout = grid.layout;
  out.exact = true;
  out.samples.reserve(grid.points.size());
  for (const GridPoint& p : grid.points) {
    out.samples.push_back({p.alpha, q_function(rho, p.alpha), kExactShotsMarker, kExactShotsMarker});
  }
  return out;
}

double wigner_function(const DensityMatrix& rho, Complex alpha) {
  if (rho.tag() != SpaceTag::phonon) throw SpaceMismatch("wigner_function requires a phonon density matrix");
  require_displaceable(2.0 * alpha, rho.dim());
  return wigner_eval(rho.entries(), effective_support(rho.entries()), alpha);
}

std::vector<double> wigner_grid(const DensityMatrix& rho, const PhaseSpaceGrid& grid) {
  if (rho.tag() != SpaceTag::phonon) throw SpaceMismatch("wigner_grid requires a phonon density matrix");
  int support = effective_support(rho.entries());
  std::vector<double> values;
  values.reserve(grid.points.size());
  for (const GridPoint& p : grid.points) {
    require_displaceable(2.0 * p.alpha, rho.dim());
    values.push_back(wigner_eval(rho.entries(), support, p.alpha));
  }
  return values;
}

}  // namespace phonoq
