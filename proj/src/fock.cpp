#include "phonoq/fock.hpp"

#include <cmath>
#include "phonoq/detail/format.hpp"

namespace phonoq {

namespace {

constexpr double kHermitianTol = 1e-9;
constexpr double kTraceTol = 1e-9;
constexpr double kPsdSlack = 1e-8;

double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

FockSpace::FockSpace(int n) : truncation(n) {
  if (n < 2) throw ValidationError(phonoq::detail::format("Fock truncation must be >= 2, got {}", n));
}

double displacement_bound(int truncation) { return 0.5 * std::sqrt(static_cast<double>(truncation)); }

void require_displaceable(Complex alpha, int truncation) {
  double bound = displacement_bound(truncation);
  if (std::abs(alpha) > bound) {
    throw TruncationError(phonoq::detail::format("|alpha| = {:.6g} exceeds the displacement bound {:.6g} at truncation {}",
                                      std::abs(alpha), bound, truncation));
  }
}

DensityMatrix::DensityMatrix(Mat entries, SpaceTag tag) : entries_(std::move(entries)), tag_(tag) {}

namespace {

void validate_density(const Mat& m, SpaceTag tag) {
  if (m.rows() != m.cols()) {
    throw ValidationError(phonoq::detail::format("density matrix must be square, got {}x{}", m.rows(), m.cols()));
  }
  long min_dim = tag == SpaceTag::joint ? 4 : 2;
  if (m.rows() < min_dim || (tag == SpaceTag::joint && m.rows() % 2 != 0)) {
    throw ValidationError(phonoq::detail::format("invalid density matrix dimension {}", m.rows()));
  }
  double herm_defect = max_abs(m - m.adjoint());
  if (herm_defect > kHermitianTol) {
    throw ValidationError(phonoq::detail::format("density matrix not Hermitian: defect {:.3e}", herm_defect));
  }
  double trace_defect = std::abs(m.trace() - Complex(1.0, 0.0));
  if (trace_defect > kTraceTol) {
    throw ValidationError(phonoq::detail::format("density matrix trace defect {:.3e}", trace_defect));
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -kPsdSlack) {
    throw ValidationError(phonoq::detail::format("density matrix minimum eigenvalue {:.3e} below -1e-8", min_eig));
  }
}

}  // namespace

DensityMatrix DensityMatrix::phonon(Mat entries) {
  validate_density(entries, SpaceTag::phonon);
  return DensityMatrix(std::move(entries), SpaceTag::phonon);
}

DensityMatrix DensityMatrix::joint(Mat entries) {
  validate_density(entries, SpaceTag::joint);
  return DensityMatrix(std::move(entries), SpaceTag::joint);
}

Vec coherent_amplitudes_raw(Complex beta, int truncation) {
  Vec c = Vec::Zero(truncation);
  double mag = std::abs(beta);
  if (mag == 0.0) {
    c(0) = 1.0;
    return c;
  }
  double phase = std::arg(beta);
  double log_mag2 = -0.5 * mag * mag;
  for (int n = 0; n < truncation; ++n) {
    double log_amp = log_mag2 + n * std::log(mag) - 0.5 * std::lgamma(n + 1.0);
    c(n) = std::exp(log_amp) * Complex(std::cos(n * phase), std::sin(n * phase));
  }
  return c;
}

CoherentState coherent_state(Complex beta, FockSpace space) {
  require_displaceable(beta, space.truncation);
  Vec c = coherent_amplitudes_raw(beta, space.truncation);
  double norm2 = c.squaredNorm();
  double leakage = std::max(0.0, 1.0 - norm2);
  if (leakage > 1e-6) {
    throw TruncationError(phonoq::detail::format("coherent state leakage {:.3e} exceeds 1e-6 at truncation {}",
                                      leakage, space.truncation));
  }
  return CoherentState{c / std::sqrt(norm2), leakage};
}

LadderOperators ladder_operators(FockSpace space) {
  int n = space.truncation;
  Mat a = Mat::Zero(n, n);
  for (int m = 0; m + 1 < n; ++m) a(m, m + 1) = std::sqrt(m + 1.0);
  Mat a_dag = a.adjoint();
  return LadderOperators{a, a_dag, a_dag * a};
}

Mat displacement_operator(Complex alpha, FockSpace space) {
  require_displaceable(alpha, space.truncation);
  int n = space.truncation;
  LadderOperators ops = ladder_operators(space);
  Mat generator = alpha * ops.a_dag - std::conj(alpha) * ops.a;  // anti-Hermitian
  Mat hermitian = Complex(0.0, 1.0) * generator;
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian);
  Vec phases(n);
  for (int k = 0; k < n; ++k) {
    double lam = es.eigenvalues()(k);
    phases(k) = Complex(std::cos(lam), -std::sin(lam));  // exp(-i lam)
  }
  Mat d = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
  double defect = max_abs(d * d.adjoint() - Mat::Identity(n, n));
  if (defect > 1e-8) {
    throw TruncationError(phonoq::detail::format("displacement unitarity defect {:.3e}", defect));
  }
  return d;
}

DensityMatrix partial_trace_internal(const DensityMatrix& rho_joint) {
  if (rho_joint.tag() != SpaceTag::joint) {
    throw SpaceMismatch("partial_trace_internal requires a joint-space density matrix");
  }
  int n = rho_joint.dim() / 2;
  const Mat& m = rho_joint.entries();
  Mat ph = m.topLeftCorner(n, n) + m.bottomRightCorner(n, n);
  ph = 0.5 * (ph + ph.adjoint()).eval();
  return DensityMatrix::phonon(std::move(ph));
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim() || rho.tag() != sigma.tag()) {
    throw DimensionMismatch(phonoq::detail::format("fidelity requires matching spaces, got dims {} and {}",
                                        rho.dim(), sigma.dim()));
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(rho.entries());
  Vec sqrt_eigs(rho.dim());
  for (int k = 0; k < rho.dim(); ++k) sqrt_eigs(k) = std::sqrt(std::max(0.0, es.eigenvalues()(k)));
  Mat sqrt_rho = es.eigenvectors() * sqrt_eigs.asDiagonal() * es.eigenvectors().adjoint();
  Mat inner = sqrt_rho * sigma.entries() * sqrt_rho;
  inner = 0.5 * (inner + inner.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Mat> es2(inner, Eigen::EigenvaluesOnly);
  double sum = 0.0;
  for (int k = 0; k < rho.dim(); ++k) sum += std::sqrt(std::max(0.0, es2.eigenvalues()(k)));
  return std::min(1.0, sum * sum);
}

double purity(const DensityMatrix& rho) { return rho.entries().squaredNorm(); }

DensityMatrix pure_density(const Vec& psi, SpaceTag tag) {
  Vec v = psi / psi.norm();
  Mat m = v * v.adjoint();
  return tag == SpaceTag::joint ? DensityMatrix::joint(std::move(m))
                                : DensityMatrix::phonon(std::move(m));
}

Mat embed_phonon(const Mat& rho, int new_dim) {
  if (new_dim < rho.rows()) throw DimensionMismatch("embedding target smaller than source");
  Mat out = Mat::Zero(new_dim, new_dim);
  out.topLeftCorner(rho.rows(), rho.cols()) = rho;
  return out;
}

Vec embed_state(const Vec& psi, int new_dim) {
  if (new_dim < psi.size()) throw DimensionMismatch("embedding target smaller than source");
  Vec out = Vec::Zero(new_dim);
  out.head(psi.size()) = psi;
  return out;
}

}  // namespace phonoq
