#include "phonoq/jcm.hpp"

#include <Eigen/Sparse>
#include <cmath>
#include "phonoq/detail/format.hpp"
#include <numbers>

namespace phonoq {

namespace {

using SpMat = Eigen::SparseMatrix<Complex>;

constexpr Complex kI{0.0, 1.0};

void validate_coupling(const CouplingParams& params) {
  if (!(params.eta_omega > 0.0)) {
    throw ValidationError(phonoq::detail::format("eta_omega must be > 0, got {:.6g}", params.eta_omega));
  }
}

}  // namespace

Mat hamiltonian(const CouplingParams& params, FockSpace space) {
  validate_coupling(params);
  int n = space.truncation;
  LadderOperators ops = ladder_operators(space);
  Complex phase = std::exp(kI * params.phi);
  const Mat& raising = params.kind == CouplingKind::antiJC ? ops.a_dag : ops.a;
  Mat h = Mat::Zero(2 * n, 2 * n);
  // Qubit-major blocks: sigma+ maps the down block to the up block.
  h.block(n, 0, n, n) = (0.5 * params.eta_omega) * phase * raising;
  h.block(0, n, n, n) = h.block(n, 0, n, n).adjoint();
  return h;
}

JointState evolve_unitary(const JointState& state, const CouplingParams& params, double t) {
  if (t < 0.0) throw ValidationError("evolution time must be >= 0");
  FockSpace space(state.fock_dim());
  Mat h = hamiltonian(params, space);
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  Vec rotated = es.eigenvectors().adjoint() * state.amplitudes;
  for (int k = 0; k < rotated.size(); ++k) {
    double angle = es.eigenvalues()(k) * t;
    rotated(k) *= Complex(std::cos(angle), -std::sin(angle));
  }
  Vec out = es.eigenvectors() * rotated;
  return JointState{out / out.norm()};
}

namespace {

struct NoiseChannel {
  double rate;
  SpMat l;
  SpMat l_adj;
  Vec l_adj_l_diag;  // all supported jump operators have diagonal L^+L
};

std::vector<NoiseChannel> build_channels(const NoiseParams& noise, int n) {
  std::vector<NoiseChannel> channels;
  FockSpace space(n);
  LadderOperators ops = ladder_operators(space);
  auto joint_phonon = [n](const Mat& p) {
    Mat j = Mat::Zero(2 * n, 2 * n);
    j.topLeftCorner(n, n) = p;
    j.bottomRightCorner(n, n) = p;
    return j;
  };
  if (noise.heating_rate > 0.0) {
    Mat l = joint_phonon(ops.a_dag);
    Vec d(2 * n);
    for (int q = 0; q < 2; ++q)
      for (int m = 0; m < n; ++m) d(q * n + m) = m + 1.0;
    channels.push_back({noise.heating_rate, l.sparseView(), Mat(l.adjoint()).sparseView(), d});
  }
  if (noise.cooling_rate > 0.0) {
    Mat l = joint_phonon(ops.a);
    Vec d(2 * n);
    for (int q = 0; q < 2; ++q)
      for (int m = 0; m < n; ++m) d(q * n + m) = m;
    channels.push_back({noise.cooling_rate, l.sparseView(), Mat(l.adjoint()).sparseView(), d});
  }
  if (noise.qubit_dephasing_rate > 0.0) {
    Mat l = Mat::Zero(2 * n, 2 * n);
    l.topLeftCorner(n, n) = -Mat::Identity(n, n);
    l.bottomRightCorner(n, n) = Mat::Identity(n, n);
    channels.push_back({noise.qubit_dephasing_rate, l.sparseView(), Mat(l.adjoint()).sparseView(),
                        Vec::Ones(2 * n)});
  }
  return channels;
}

}  // namespace

DensityMatrix evolve_lindblad(const DensityMatrix& rho_joint, const CouplingParams& params,
                              const NoiseParams& noise, double t, double dt) {
  if (rho_joint.tag() != SpaceTag::joint) {
    throw SpaceMismatch("evolve_lindblad requires a joint-space density matrix");
  }
  if (!(dt > 0.0)) throw ValidationError("dt must be > 0");
  if (t < 0.0) throw ValidationError("evolution time must be >= 0");
  if (t == 0.0) return rho_joint;
  if (dt > t) throw ValidationError(phonoq::detail::format("dt = {:.6g} exceeds t = {:.6g}", dt, t));
  if (noise.heating_rate < 0.0 || noise.cooling_rate < 0.0 || noise.qubit_dephasing_rate < 0.0 ||
      noise.empirical_gamma < 0.0) {
    throw ValidationError("noise rates must be >= 0");
  }

  int n = rho_joint.dim() / 2;
  SpMat h = hamiltonian(params, FockSpace(n)).sparseView();
  std::vector<NoiseChannel> channels = build_channels(noise, n);

  auto rhs = [&](const Mat& r) {
    Mat out = -kI * (h * r - r * h);
    for (const NoiseChannel& ch : channels) {
      Mat lr = ch.l * r;
      out.noalias() += ch.rate * (lr * ch.l_adj);
      out.noalias() -= (0.5 * ch.rate) * (ch.l_adj_l_diag.asDiagonal() * r);
      out.noalias() -= (0.5 * ch.rate) * (r * ch.l_adj_l_diag.asDiagonal());
    }
    return out;
  };

  Mat rho = rho_joint.entries();
  long long full_steps = static_cast<long long>(t / dt);
  double remainder = t - full_steps * dt;
  if (remainder < 1e-12 * dt) remainder = 0.0;

  auto step = [&](Mat& r, double h_step) {
    Mat k1 = rhs(r);
    Mat k2 = rhs(Mat(r + (0.5 * h_step) * k1));
    Mat k3 = rhs(Mat(r + (0.5 * h_step) * k2));
    Mat k4 = rhs(Mat(r + h_step * k3));
    r += (h_step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    r = 0.5 * (r + r.adjoint()).eval();
    double trace = r.trace().real();
    double defect = std::abs(trace - 1.0);
    if (defect > 1e-6) {
      throw StepSizeError(phonoq::detail::format("trace defect {:.3e} per step exceeds 1e-6; reduce dt", defect));
    }
    r /= trace;
  };

  for (long long s = 0; s < full_steps; ++s) step(rho, dt);
  if (remainder > 0.0) step(rho, remainder);
  return DensityMatrix::joint(std::move(rho));
}

std::vector<double> rabi_signal(Complex beta, const CouplingParams& params, double gamma,
                                const std::vector<double>& times, FockSpace space) {
  validate_coupling(params);
  if (gamma < 0.0) throw ValidationError("gamma must be >= 0");
  CoherentState coh = coherent_state(beta, space);
  std::vector<double> weights(space.truncation);
  for (int n = 0; n < space.truncation; ++n) weights[n] = std::norm(coh.amplitudes(n));
  std::vector<double> signal;
  signal.reserve(times.size());
  for (double t : times) {
    double envelope = std::exp(-gamma * t);
    double p_up = 0.0;
    for (int n = 0; n < space.truncation; ++n) {
      p_up += weights[n] * 0.5 * (1.0 - envelope * std::cos(std::sqrt(n + 1.0) * params.eta_omega * t));
    }
    signal.push_back(p_up);
  }
  return signal;
}

double revival_time(Complex alpha, const CouplingParams& params) {
  validate_coupling(params);
  double mag = std::abs(alpha);
  if (mag == 0.0) throw ZeroAmplitude("revival time undefined for zero amplitude");
  return 4.0 * std::numbers::pi * mag / params.eta_omega;
}

BranchStates branch_states(double t, Complex alpha, const CouplingParams& params, FockSpace space) {
  double t_rev = revival_time(alpha, params);
  double theta = std::numbers::pi * t / t_rev;
  double inv_sqrt2 = 1.0 / std::numbers::sqrt2;

  BranchStates out{};
  out.t = t;
  out.atom_plus << std::exp(kI * theta) * inv_sqrt2, Complex(0.0, -inv_sqrt2);
  out.atom_minus << std::exp(-kI * theta) * inv_sqrt2, Complex(0.0, inv_sqrt2);

  auto phonon_branch = [&](double sign) {
    Complex label = alpha * std::exp(kI * (sign * theta));
    Vec c = coherent_state(label, space).amplitudes;
    for (int n = 0; n < space.truncation; ++n) {
      double angle = -sign * 0.5 * t * params.eta_omega * std::sqrt(static_cast<double>(n));
      c(n) *= Complex(std::cos(angle), std::sin(angle));
    }
    return Vec(c / c.norm());
  };
  out.phonon_plus = phonon_branch(+1.0);
  out.phonon_minus = phonon_branch(-1.0);
  return out;
}

JointState qubit_down_coherent(Complex alpha, FockSpace space) {
  Vec amps = Vec::Zero(space.joint_dim());
  amps.head(space.truncation) = coherent_state(alpha, space).amplitudes;
  return JointState{std::move(amps)};
}

EchoResult echo_reverse_run(Complex alpha, const CouplingParams& params,
                            const std::optional<NoiseParams>& noise, FockSpace space, double dt) {
  double t_half = 0.5 * revival_time(alpha, params);
  CouplingParams reversed = params;
  reversed.phi = params.phi + std::numbers::pi;
  DensityMatrix target = pure_density(coherent_state(alpha, space).amplitudes, SpaceTag::phonon);

  if (!noise.has_value()) {
    JointState psi = qubit_down_coherent(alpha, space);
    psi = evolve_unitary(psi, params, t_half);
    psi = evolve_unitary(psi, reversed, t_half);
    DensityMatrix phonon = partial_trace_internal(pure_density(psi.amplitudes, SpaceTag::joint));
    double fid = fidelity(phonon, target);
    return EchoResult{std::move(phonon), fid};
  }

  double dt_use = dt > 0.0 ? dt : 2.0 * t_half / 4096.0;
  DensityMatrix rho = pure_density(qubit_down_coherent(alpha, space).amplitudes, SpaceTag::joint);
  rho = evolve_lindblad(rho, params, *noise, t_half, dt_use);
  rho = evolve_lindblad(rho, reversed, *noise, t_half, dt_use);
  DensityMatrix phonon = partial_trace_internal(rho);
  double fid = fidelity(phonon, target);
  return EchoResult{std::move(phonon), fid};
}

}  // namespace phonoq
