#pragma once

#include <optional>
#include <vector>

#include "phonoq/fock.hpp"

namespace phonoq {

enum class CouplingKind { JC, antiJC };

struct CouplingParams {
  double eta_omega;  // rad/s, sideband Rabi rate (the product eta*Omega)
  double phi;        // rad, drive phase
  CouplingKind kind;
};

// Lindblad rates; empirical_gamma is the closed-form Rabi decay constant and
// enters rabi_signal only, not the master equation.
struct NoiseParams {
  double heating_rate = 0.0;          // quanta/s, jump operator a_dag
  double cooling_rate = 0.0;          // quanta/s, jump operator a
  double qubit_dephasing_rate = 0.0;  // 1/s, jump operator sigma_z (x) I
  double empirical_gamma = 0.0;       // 1/s
};

struct BranchStates {
  Eigen::Vector2cd atom_plus;   // (down, up) components
  Eigen::Vector2cd atom_minus;
  Vec phonon_plus;
  Vec phonon_minus;
  double t;
};

// antiJC: (eta_omega/2)(a_dag sigma+ e^{i phi} + a sigma- e^{-i phi});
// JC swaps a and a_dag. hbar = 1, energies in rad/s.
Mat hamiltonian(const CouplingParams& params, FockSpace space);

JointState evolve_unitary(const JointState& state, const CouplingParams& params, double t);

// Fixed-step RK4 on drho/dt = -i[H,rho] + sum_k (L rho L^+ - 1/2 {L^+L, rho});
// each step is re-Hermitized and trace-renormalized, and the per-step trace
// defect must stay below 1e-6 (StepSizeError otherwise).
DensityMatrix evolve_lindblad(const DensityMatrix& rho_joint, const CouplingParams& params,
                              const NoiseParams& noise, double t, double dt);

// P(up)(t) = sum_n p_n 1/2 [1 - e^{-gamma t} cos(sqrt(n+1) eta_omega t)] with
// p_n the (renormalized) Poisson weights of |beta>.
std::vector<double> rabi_signal(Complex beta, const CouplingParams& params, double gamma,
                                const std::vector<double>& times, FockSpace space);

// 4 pi |alpha| / eta_omega.
double revival_time(Complex alpha, const CouplingParams& params);

// Analytic two-branch product form:
//   atom_pm   = (e^{+-i pi t/t_rev}|down> -+ i|up>)/sqrt(2)
//   phonon_pm = exp(-+ i t eta_omega sqrt(n_hat)/2) |alpha e^{+-i pi t/t_rev}>
BranchStates branch_states(double t, Complex alpha, const CouplingParams& params, FockSpace space);

struct EchoResult {
  DensityMatrix phonon;
  double fidelity_to_initial;
};

// Prepare |down> (x) |alpha>, run the coupling for t_rev/2, flip the drive
// phase by pi, run t_rev/2 again; returns the phonon reduction and its
// fidelity to |alpha><alpha|. dt = 0 selects the default t_rev/4096.
EchoResult echo_reverse_run(Complex alpha, const CouplingParams& params,
                            const std::optional<NoiseParams>& noise, FockSpace space,
                            double dt = 0.0);

JointState qubit_down_coherent(Complex alpha, FockSpace space);

}  // namespace phonoq
