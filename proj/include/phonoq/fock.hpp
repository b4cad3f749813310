#pragma once

#include <Eigen/Dense>
#include <complex>

#include "phonoq/errors.hpp"

namespace phonoq {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Truncated oscillator space retaining Fock levels 0 .. truncation-1.
struct FockSpace {
  int truncation;

  explicit FockSpace(int n);
  int joint_dim() const { return 2 * truncation; }
};

// Largest displacement magnitude that keeps the displaced vacuum's leakage
// past the last retained level below 1e-6.
double displacement_bound(int truncation);
void require_displaceable(Complex alpha, int truncation);

enum class SpaceTag { phonon, joint };

// Hermitian, trace-one, PSD matrix; invariants are checked at construction
// (hermiticity 1e-9 entrywise, trace 1e-9, eigenvalues >= -1e-8).
class DensityMatrix {
 public:
  static DensityMatrix phonon(Mat entries);
  static DensityMatrix joint(Mat entries);

  const Mat& entries() const { return entries_; }
  SpaceTag tag() const { return tag_; }
  int dim() const { return static_cast<int>(entries_.rows()); }

 private:
  DensityMatrix(Mat entries, SpaceTag tag);

  Mat entries_;
  SpaceTag tag_;
};

// Pure state on qubit (x) oscillator; length 2N, ordered qubit-major:
// (down,0)..(down,N-1),(up,0)..(up,N-1).
struct JointState {
  Vec amplitudes;

  int fock_dim() const { return static_cast<int>(amplitudes.size()) / 2; }
};

struct CoherentState {
  Vec amplitudes;  // renormalized
  double leakage;  // 1 - sum |c_n|^2 before renormalization
};

// c_n = exp(-|beta|^2/2) beta^n / sqrt(n!), renormalized on the truncated
// space. Throws TruncationError when the pre-normalization leakage > 1e-6.
CoherentState coherent_state(Complex beta, FockSpace space);

// Unnormalized truncated amplitudes; exact overlap weights for any density
// matrix supported on the space.
Vec coherent_amplitudes_raw(Complex beta, int truncation);

struct LadderOperators {
  Mat a;
  Mat a_dag;
  Mat n;
};

LadderOperators ladder_operators(FockSpace space);

// exp(alpha a_dag - conj(alpha) a) via eigendecomposition of the Hermitian
// i*(generator); unitary within 1e-9 on the truncated space.
Mat displacement_operator(Complex alpha, FockSpace space);

// Trace over the qubit: (rho_ph)_{mn} = rho_{(down m),(down n)} + rho_{(up m),(up n)}.
DensityMatrix partial_trace_internal(const DensityMatrix& rho_joint);

// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2; equals <psi|rho|psi>
// when sigma is the pure state |psi><psi|.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

double purity(const DensityMatrix& rho);

DensityMatrix pure_density(const Vec& psi, SpaceTag tag);

// Zero-padding embeddings; exact for states supported on the smaller space.
Mat embed_phonon(const Mat& rho, int new_dim);
Vec embed_state(const Vec& psi, int new_dim);

}  // namespace phonoq
