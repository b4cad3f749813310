#pragma once

#include <string>
#include <vector>

#include "phonoq/jcm.hpp"
#include "phonoq/vacuum.hpp"

namespace phonoq {

inline constexpr double kTau = 6.283185307179586476925286766559;

inline constexpr int kDefaultTruncation = 64;
inline constexpr double kDefaultAlpha = 1.62;
inline constexpr double kDefaultEtaOmega = kTau * 29.78e3;  // rad/s
inline constexpr int kLindbladStepsPerRevival = 4096;

CouplingParams default_coupling(CouplingKind kind = CouplingKind::antiJC, double phi = 0.0);

// Omega_ut = 2pi*22.7 kHz, beta_cd = 0.075, Delta_ut = 1.9*Omega_ut,
// T_ut = 198.2 us, 2000 integrator steps.
SweepParams default_sweep();

// "noiseless" and "paper-2016". The latter is heating-only, calibrated so the
// simulated echo fidelity lands at 0.914 and the reconstructed half-revival
// purity near 0.82; empirical_gamma is fit to the resulting Rabi envelope.
NoiseParams noise_profile(const std::string& name);
std::vector<std::string> noise_profile_names();

// "ideal" (unit transfer and readout) and "paper-2016" (integrator transfer
// table scaled so its mean over n = 1..25 is 0.985).
DetectorModel detector_profile(const std::string& name, FockSpace space);
std::vector<std::string> detector_profile_names();

}  // namespace phonoq
