#pragma once

#include <optional>

#include "phonoq/phase_space.hpp"

namespace phonoq {

struct ReconstructionConfig {
  int n_rec = 12;                    // reconstruction dimension
  double max_radius = 3.0;           // use only samples with |alpha| <= max_radius
  int max_iterations = 5000;
  double convergence_tol = 1e-8;     // relative objective improvement
  std::optional<Mat> initial_guess;  // default: maximally mixed on n_rec
};

struct ReconstructionResult {
  DensityMatrix rho;
  double residual;  // rms of (model - q_estimate) over used points
  int iterations;
  bool converged;
  double purity;
  std::optional<double> fidelity_vs_reference;
  int used_points;
  bool insufficient_data;  // fewer than n_rec^2 points after the radius filter
  std::vector<double> objective_trace;  // accepted objective values, non-increasing
};

// Minimizes sum_k w_k (<alpha_k|rho|alpha_k>/pi - q_k)^2 over density
// matrices, w_k = shots_k (1 for exact samples). Projected gradient with
// Barzilai-Borwein steps and a monotone backtracking safeguard; every iterate
// is projected back onto {Hermitian, PSD, trace 1}.
ReconstructionResult reconstruct_density(const QSamples& samples, const ReconstructionConfig& config,
                                         const std::optional<DensityMatrix>& reference = std::nullopt);

// Closest density matrix in Frobenius norm: eigendecompose, project the
// spectrum onto the probability simplex, reassemble.
DensityMatrix spectrum_projection(const Mat& h);

struct ReconstructionReport {
  double purity;
  std::optional<double> fidelity;
  std::vector<double> wigner_values;
  double min_wigner;
  bool negativity;  // min W < -0.01 * (2/pi), below projection-ripple level
};

ReconstructionReport report(const ReconstructionResult& result,
                            const std::optional<DensityMatrix>& reference,
                            const PhaseSpaceGrid& wigner_grid_spec);

}  // namespace phonoq
