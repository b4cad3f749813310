#include "phonoq/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include "phonoq/detail/format.hpp"
#include <iostream>
#include <numbers>
#include <vector>

namespace phonoq {

namespace {

constexpr double kPi = std::numbers::pi;

// Euclidean projection of the spectrum onto the probability simplex, applied
// in the eigenbasis; the result is the nearest density matrix in Frobenius
// norm. Kept free of DensityMatrix wrapping for use in the solver loop.
Mat project_simplex_psd(const Mat& h) {
  Mat sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  Eigen::VectorXd lam = es.eigenvalues();
  int n = static_cast<int>(lam.size());
  std::vector<double> desc(lam.data(), lam.data() + n);
  std::sort(desc.begin(), desc.end(), std::greater<>());
  double cumsum = 0.0;
  double tau = 0.0;
  for (int i = 0; i < n; ++i) {
    cumsum += desc[i];
    double candidate = (cumsum - 1.0) / (i + 1);
    if (desc[i] - candidate > 0.0) tau = candidate;
  }
  Eigen::VectorXd clipped = (lam.array() - tau).cwiseMax(0.0);
  Mat out = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().adjoint();
  return 0.5 * (out + out.adjoint());
}

Vec flatten_row_major(const Mat& m) {
  int n = static_cast<int>(m.rows());
  Vec v(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) v(i * n + j) = m(i, j);
  return v;
}

Mat unflatten_row_major(const Vec& v, int n) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = v(i * n + j);
  return m;
}

double fidelity_embedded(const DensityMatrix& a, const DensityMatrix& b) {
  int dim = std::max(a.dim(), b.dim());
  DensityMatrix ea = a.dim() == dim ? a : DensityMatrix::phonon(embed_phonon(a.entries(), dim));
  DensityMatrix eb = b.dim() == dim ? b : DensityMatrix::phonon(embed_phonon(b.entries(), dim));
  return fidelity(ea, eb);
}

}  // namespace

DensityMatrix spectrum_projection(const Mat& h) {
  if (h.rows() != h.cols()) throw ValidationError("spectrum projection needs a square matrix");
  double herm_defect = (h - h.adjoint()).cwiseAbs().maxCoeff();
  if (herm_defect > 1e-8) {
    throw ValidationError(phonoq::detail::format("spectrum projection input not Hermitian: defect {:.3e}",
                                      herm_defect));
  }
  return DensityMatrix::phonon(project_simplex_psd(h));
}

ReconstructionResult reconstruct_density(const QSamples& samples, const ReconstructionConfig& config,
                                         const std::optional<DensityMatrix>& reference) {
  if (config.n_rec < 2) throw ValidationError("n_rec must be >= 2");
  if (!(config.max_radius > 0.0)) throw ValidationError("max_radius must be > 0");
  if (!(config.convergence_tol > 0.0)) throw ValidationError("convergence_tol must be > 0");
  if (config.max_iterations < 1) throw ValidationError("max_iterations must be >= 1");

  std::vector<const QSample*> used;
  for (const QSample& s : samples.samples) {
    if (std::abs(s.alpha) <= config.max_radius + 1e-12) used.push_back(&s);
  }
  int n = config.n_rec;
  int n2 = n * n;
  int k_used = static_cast<int>(used.size());
  if (k_used == 0) throw ValidationError("no samples within max_radius");
  bool insufficient = k_used < n2;
  if (insufficient) {
    std::cerr << phonoq::detail::format(
        "warning: {} samples within radius {:.3g} for {} density-matrix parameters; "
        "the fit may be underdetermined\n",
        k_used, config.max_radius, n2);
  }

  Mat c_matrix(k_used, n2);
  Eigen::VectorXd q(k_used), w(k_used);
  for (int k = 0; k < k_used; ++k) {
    Vec c = coherent_amplitudes_raw(used[k]->alpha, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) c_matrix(k, i * n + j) = std::conj(c(i)) * c(j);
    q(k) = used[k]->q_estimate;
    w(k) = used[k]->shots > 0 ? static_cast<double>(used[k]->shots) : 1.0;
  }

  auto model = [&](const Mat& rho) {
    return Eigen::VectorXd(((c_matrix * flatten_row_major(rho)).real() / kPi));
  };
  auto loss_of = [&](const Mat& rho) {
    Eigen::VectorXd d = model(rho) - q;
    return (w.array() * d.array().square()).sum();
  };
  auto grad_of = [&](const Mat& rho) {
    Eigen::VectorXd d = model(rho) - q;
    Vec coef = ((2.0 / kPi) * (w.array() * d.array())).matrix().cast<Complex>();
    Mat g = unflatten_row_major(c_matrix.adjoint() * coef, n);
    return Mat(0.5 * (g + g.adjoint()));
  };

  Mat rho;
  if (config.initial_guess.has_value()) {
    if (config.initial_guess->rows() != n || config.initial_guess->cols() != n) {
      throw DimensionMismatch("initial guess dimension does not match n_rec");
    }
    rho = project_simplex_psd(*config.initial_guess);
  } else {
    rho = Mat::Identity(n, n) / static_cast<double>(n);
  }

  double loss = loss_of(rho);
  Mat grad = grad_of(rho);
  double step = 1.0;
  Mat prev_rho, prev_grad;
  bool have_prev = false;
  bool converged = false;
  int iterations = 0;
  std::vector<double> trace;
  trace.reserve(config.max_iterations + 1);
  trace.push_back(loss);

  for (int it = 1; it <= config.max_iterations; ++it) {
    iterations = it;
    if (have_prev) {
      Vec dr = flatten_row_major(rho - prev_rho);
      Vec dg = flatten_row_major(grad - prev_grad);
      double denom = dr.dot(dg).real();
      if (denom > 1e-300) step = std::max(1e-12, dr.dot(dr).real() / denom);
    }
    double s = step;
    Mat candidate;
    double cand_loss = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      candidate = project_simplex_psd(rho - s * grad);
      cand_loss = loss_of(candidate);
      if (cand_loss <= loss) {
        accepted = true;
        break;
      }
      s *= 0.5;
    }
    if (!accepted) {
      // No monotone step exists down to the smallest trial: at the floor.
      converged = true;
      break;
    }
    double rel_improvement = (loss - cand_loss) / std::max(loss, 1e-300);
    prev_rho = rho;
    prev_grad = grad;
    have_prev = true;
    rho = candidate;
    loss = cand_loss;
    grad = grad_of(rho);
    trace.push_back(loss);
    if (rel_improvement < config.convergence_tol) {
      converged = true;
      break;
    }
  }

  Eigen::VectorXd final_dev = model(rho) - q;
  double residual = std::sqrt(final_dev.squaredNorm() / k_used);
  DensityMatrix rho_dm = DensityMatrix::phonon(project_simplex_psd(rho));
  double final_purity = purity(rho_dm);
  std::optional<double> fid;
  if (reference.has_value()) fid = fidelity_embedded(rho_dm, *reference);

  return ReconstructionResult{
      .rho = std::move(rho_dm),
      .residual = residual,
      .iterations = iterations,
      .converged = converged,
      .purity = final_purity,
      .fidelity_vs_reference = fid,
      .used_points = k_used,
      .insufficient_data = insufficient,
      .objective_trace = std::move(trace),
  };
}

ReconstructionReport report(const ReconstructionResult& result,
                            const std::optional<DensityMatrix>& reference,
                            const PhaseSpaceGrid& wigner_grid_spec) {
  ReconstructionReport rep{};
  rep.purity = purity(result.rho);
  if (reference.has_value()) rep.fidelity = fidelity_embedded(result.rho, *reference);

  double max_r = 0.0;
  for (const GridPoint& p : wigner_grid_spec.points) max_r = std::max(max_r, std::abs(p.alpha));
  int needed = static_cast<int>(std::ceil(16.0 * max_r * max_r)) + 1;
  int dim = std::max(result.rho.dim(), needed);
  DensityMatrix padded = dim == result.rho.dim()
                             ? result.rho
                             : DensityMatrix::phonon(embed_phonon(result.rho.entries(), dim));
  rep.wigner_values = wigner_grid(padded, wigner_grid_spec);
  rep.min_wigner = *std::min_element(rep.wigner_values.begin(), rep.wigner_values.end());
  rep.negativity = rep.min_wigner < -0.01 * (2.0 / kPi);
  return rep;
}

}  // namespace phonoq
