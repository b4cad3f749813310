#include <CLI11.hpp>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include "phonoq/detail/format.hpp"
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "phonoq/io.hpp"
#include "phonoq/jcm.hpp"
#include "phonoq/phase_space.hpp"
#include "phonoq/profiles.hpp"
#include "phonoq/reconstruction.hpp"
#include "phonoq/rng.hpp"
#include "phonoq/vacuum.hpp"
#include "phonoq/version.hpp"

namespace {

namespace fs = std::filesystem;
using phonoq::io::json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNotConverged = 3;
constexpr int kExitIo = 4;

struct GlobalConfig {
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  int truncation = phonoq::kDefaultTruncation;
  double beta = phonoq::kDefaultAlpha;
  double eta_omega = phonoq::kDefaultEtaOmega;
  double phi = 0.0;
  std::string coupling = "antijc";
  std::string noise = "noiseless";
  std::string detector = "ideal";
  long long shots = 100;
  double grid_rmax = 3.0;
  double grid_rstep = 0.2;
  int grid_phases = 24;
  double dt = 0.0;  // 0 selects t_rev/4096
};

phonoq::CouplingParams coupling_of(const GlobalConfig& cfg) {
  if (cfg.coupling != "jc" && cfg.coupling != "antijc") {
    throw phonoq::ValidationError(phonoq::detail::format("coupling must be jc or antijc, got '{}'", cfg.coupling));
  }
  phonoq::CouplingKind kind =
      cfg.coupling == "jc" ? phonoq::CouplingKind::JC : phonoq::CouplingKind::antiJC;
  return phonoq::CouplingParams{cfg.eta_omega, cfg.phi, kind};
}

bool is_noiseless(const phonoq::NoiseParams& noise) {
  return noise.heating_rate == 0.0 && noise.cooling_rate == 0.0 &&
         noise.qubit_dephasing_rate == 0.0;
}

json conventions_json() {
  return json{{"basis", "qubit-major"},
              {"q", "(1/pi)<alpha|rho|alpha>"},
              {"wigner", "(2/pi)Tr[rho D(alpha) parity D(alpha)^dag]"},
              {"exact_shots_marker", phonoq::kExactShotsMarker}};
}

json base_config_json(const GlobalConfig& cfg) {
  return json{{"seed", cfg.seed},
              {"truncation", cfg.truncation},
              {"beta", cfg.beta},
              {"eta_omega", cfg.eta_omega},
              {"phi", cfg.phi},
              {"coupling", cfg.coupling},
              {"noise_profile", cfg.noise},
              {"detector_profile", cfg.detector},
              {"shots", cfg.shots},
              {"grid", {{"r_max", cfg.grid_rmax}, {"r_step", cfg.grid_rstep}, {"phases", cfg.grid_phases}}},
              {"dt", cfg.dt}};
}

json make_meta(const std::string& command, const GlobalConfig& cfg, json config) {
  return json{{"artifact", phonoq::kArtifactName},
              {"version", phonoq::kVersion},
              {"command", command},
              {"rng", phonoq::rng::kAlgorithmId},
              {"truncation", cfg.truncation},
              {"conventions", conventions_json()},
              {"config", config},
              {"config_hash", phonoq::io::hash_hex(config)}};
}

struct PendingFile {
  fs::path path;
  std::string content;
};

void flush_files(const std::string& out_dir, const std::vector<PendingFile>& files) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw phonoq::IoError(phonoq::detail::format("cannot create {}: {}", out_dir, ec.message()));
  for (const PendingFile& f : files) phonoq::io::write_text_atomic(f.path, f.content);
}

std::string xy_csv(const json& meta, const std::string& columns,
                   const std::vector<std::vector<double>>& rows) {
  std::ostringstream out;
  out << "# " << meta.dump() << "\n" << columns << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out << ',';
      out << phonoq::io::format_double(row[i]);
    }
    out << "\n";
  }
  return out.str();
}

int cmd_dynamics(const GlobalConfig& cfg, double t_max, int points) {
  phonoq::FockSpace space(cfg.truncation);
  phonoq::CouplingParams coupling = coupling_of(cfg);
  phonoq::NoiseParams noise = phonoq::noise_profile(cfg.noise);
  double t_rev = phonoq::revival_time(cfg.beta, coupling);
  if (t_max <= 0.0) t_max = 1.4 * t_rev;
  if (points < 2) throw phonoq::ValidationError("dynamics needs at least 2 time points");
  double dt = cfg.dt > 0.0 ? cfg.dt : t_rev / phonoq::kLindbladStepsPerRevival;

  std::vector<double> times(points);
  for (int i = 0; i < points; ++i) times[i] = t_max * i / (points - 1);
  std::vector<double> closed =
      phonoq::rabi_signal(cfg.beta, coupling, noise.empirical_gamma, times, space);

  phonoq::DensityMatrix rho = phonoq::pure_density(
      phonoq::qubit_down_coherent(cfg.beta, space).amplitudes, phonoq::SpaceTag::joint);
  std::vector<std::vector<double>> rows;
  rows.reserve(points);
  for (int i = 0; i < points; ++i) {
    if (i > 0) {
      rho = phonoq::evolve_lindblad(rho, coupling, noise, times[i] - times[i - 1], dt);
    }
    double p_up = rho.entries()
                      .bottomRightCorner(cfg.truncation, cfg.truncation)
                      .trace()
                      .real();
    rows.push_back({times[i], closed[i], p_up});
  }

  json config = base_config_json(cfg);
  config["t_max"] = t_max;
  config["points"] = points;
  json meta = make_meta("dynamics", cfg, config);
  std::vector<PendingFile> files;
  files.push_back({fs::path(cfg.out_dir) / "dynamics.csv",
                   xy_csv(meta, "t_seconds,p_up_closed_form,p_up_lindblad", rows)});
  flush_files(cfg.out_dir, files);
  return kExitOk;
}

int cmd_qscan(const GlobalConfig& cfg, const std::vector<double>& fractions) {
  phonoq::FockSpace space(cfg.truncation);
  phonoq::CouplingParams coupling = coupling_of(cfg);
  phonoq::NoiseParams noise = phonoq::noise_profile(cfg.noise);
  phonoq::DetectorModel detector = phonoq::detector_profile(cfg.detector, space);
  phonoq::PhaseSpaceGrid grid =
      phonoq::PhaseSpaceGrid::polar(cfg.grid_rmax, cfg.grid_rstep, cfg.grid_phases);
  double t_rev = phonoq::revival_time(cfg.beta, coupling);
  double dt = cfg.dt > 0.0 ? cfg.dt : t_rev / phonoq::kLindbladStepsPerRevival;
  phonoq::JointState psi0 = phonoq::qubit_down_coherent(cfg.beta, space);

  json config = base_config_json(cfg);
  config["times_t_rev"] = fractions;
  json meta = make_meta("qscan", cfg, config);

  std::vector<PendingFile> files;
  for (std::size_t idx = 0; idx < fractions.size(); ++idx) {
    double frac = fractions[idx];
    if (frac < 0.0) throw phonoq::ValidationError("time fractions must be >= 0");
    double t = frac * t_rev;
    phonoq::DensityMatrix rho_ph = [&] {
      if (is_noiseless(noise)) {
        phonoq::JointState psi = phonoq::evolve_unitary(psi0, coupling, t);
        return phonoq::partial_trace_internal(
            phonoq::pure_density(psi.amplitudes, phonoq::SpaceTag::joint));
      }
      phonoq::DensityMatrix rho =
          phonoq::pure_density(psi0.amplitudes, phonoq::SpaceTag::joint);
      if (t > 0.0) rho = phonoq::evolve_lindblad(rho, coupling, noise, t, dt);
      return phonoq::partial_trace_internal(rho);
    }();

    phonoq::QSamples exact = phonoq::q_grid(rho_ph, grid);
    phonoq::QSamples sampled = phonoq::simulate_q_experiment(
        rho_ph, grid, detector, cfg.shots, phonoq::rng::derive_subseed(cfg.seed, idx));

    json meta_exact = meta;
    meta_exact["layout"] = grid.layout;
    meta_exact["exact"] = true;
    meta_exact["t_over_t_rev"] = frac;
    json meta_sampled = meta;
    meta_sampled["layout"] = grid.layout;
    meta_sampled["exact"] = false;
    meta_sampled["t_over_t_rev"] = frac;

    std::string tag = phonoq::io::format_double(frac);
    files.push_back({fs::path(cfg.out_dir) / phonoq::detail::format("qscan_exact_t{}.csv", tag),
                     phonoq::io::qsamples_to_csv(exact, meta_exact)});
    files.push_back({fs::path(cfg.out_dir) / phonoq::detail::format("qscan_sampled_t{}.csv", tag),
                     phonoq::io::qsamples_to_csv(sampled, meta_sampled)});
  }
  flush_files(cfg.out_dir, files);
  return kExitOk;
}

int cmd_echo(const GlobalConfig& cfg) {
  phonoq::FockSpace space(cfg.truncation);
  phonoq::CouplingParams coupling = coupling_of(cfg);
  phonoq::NoiseParams noise = phonoq::noise_profile(cfg.noise);
  std::optional<phonoq::NoiseParams> noise_opt;
  if (!is_noiseless(noise)) noise_opt = noise;

  phonoq::EchoResult result =
      phonoq::echo_reverse_run(cfg.beta, coupling, noise_opt, space, cfg.dt);
  phonoq::PhaseSpaceGrid grid =
      phonoq::PhaseSpaceGrid::polar(cfg.grid_rmax, cfg.grid_rstep, cfg.grid_phases);
  phonoq::QSamples q = phonoq::q_grid(result.phonon, grid);

  json config = base_config_json(cfg);
  json meta = make_meta("echo", cfg, config);
  json report = meta;
  report["fidelity_to_initial"] = result.fidelity_to_initial;
  report["phonon_purity"] = phonoq::purity(result.phonon);
  report["noise"] = json{{"heating_rate", noise.heating_rate},
                         {"cooling_rate", noise.cooling_rate},
                         {"qubit_dephasing_rate", noise.qubit_dephasing_rate},
                         {"empirical_gamma", noise.empirical_gamma}};

  json meta_q = meta;
  meta_q["layout"] = grid.layout;
  meta_q["exact"] = true;

  std::vector<PendingFile> files;
  files.push_back({fs::path(cfg.out_dir) / "echo_report.json", report.dump(2) + "\n"});
  files.push_back({fs::path(cfg.out_dir) / "echo_q.csv", phonoq::io::qsamples_to_csv(q, meta_q)});
  flush_files(cfg.out_dir, files);
  return kExitOk;
}

int cmd_reconstruct(const GlobalConfig& cfg, const std::string& input, int n_rec, double max_radius,
                    int max_iter, double tol, const std::string& reference_path, double wigner_rmax,
                    double wigner_step) {
  std::string text = phonoq::io::read_text(input);
  json in_header;
  phonoq::QSamples samples = phonoq::io::qsamples_from_csv(text, &in_header);

  std::optional<phonoq::DensityMatrix> reference;
  if (!reference_path.empty()) {
    json ref_json = json::parse(phonoq::io::read_text(reference_path), nullptr, true, true);
    reference = phonoq::DensityMatrix::phonon(phonoq::io::matrix_from_json(
        ref_json.contains("rho") ? ref_json["rho"] : ref_json));
  }

  phonoq::ReconstructionConfig rc;
  rc.n_rec = n_rec;
  rc.max_radius = max_radius;
  rc.max_iterations = max_iter;
  rc.convergence_tol = tol;
  phonoq::ReconstructionResult result = phonoq::reconstruct_density(samples, rc, reference);

  phonoq::PhaseSpaceGrid wspec = phonoq::PhaseSpaceGrid::cartesian(
      -wigner_rmax, wigner_rmax, -wigner_rmax, wigner_rmax, wigner_step);
  phonoq::ReconstructionReport rep = phonoq::report(result, reference, wspec);

  json config = base_config_json(cfg);
  config["n_rec"] = n_rec;
  config["max_radius"] = max_radius;
  config["max_iterations"] = max_iter;
  config["convergence_tol"] = tol;
  config["wigner_grid"] = wspec.layout;
  json meta = make_meta("reconstruct", cfg, config);

  json out = meta;
  out["input_header"] = in_header;
  out["converged"] = result.converged;
  out["iterations"] = result.iterations;
  out["residual"] = result.residual;
  out["purity"] = result.purity;
  out["used_points"] = result.used_points;
  out["insufficient_data"] = result.insufficient_data;
  out["objective"] = json{{"initial", result.objective_trace.front()},
                          {"final", result.objective_trace.back()},
                          {"accepted_steps", result.objective_trace.size() - 1}};
  if (result.fidelity_vs_reference.has_value()) {
    out["fidelity_vs_reference"] = *result.fidelity_vs_reference;
  }
  out["wigner_min"] = rep.min_wigner;
  out["wigner_negativity"] = rep.negativity;
  out["rho"] = phonoq::io::matrix_to_json(result.rho.entries());

  std::ostringstream wcsv;
  json meta_w = meta;
  meta_w["layout"] = wspec.layout;
  wcsv << "# " << meta_w.dump() << "\n" << "re_alpha,im_alpha,wigner\n";
  for (std::size_t i = 0; i < wspec.points.size(); ++i) {
    wcsv << phonoq::io::format_double(wspec.points[i].alpha.real()) << ','
         << phonoq::io::format_double(wspec.points[i].alpha.imag()) << ','
         << phonoq::io::format_double(rep.wigner_values[i]) << "\n";
  }

  std::vector<PendingFile> files;
  files.push_back({fs::path(cfg.out_dir) / "reconstruction.json", out.dump(2) + "\n"});
  files.push_back({fs::path(cfg.out_dir) / "wigner.csv", wcsv.str()});
  flush_files(cfg.out_dir, files);
  if (!result.converged) {
    std::cerr << phonoq::detail::format("solver did not converge within {} iterations (residual {:.3e})\n",
                             result.iterations, result.residual);
    return kExitNotConverged;
  }
  return kExitOk;
}

int cmd_transfer_scan(const GlobalConfig& cfg, int n_max, double omega_ut, double beta_cd,
                      double delta_ut, double t_ut, int steps) {
  if (n_max < 1) throw phonoq::ValidationError("n_max must be >= 1");
  if (delta_ut <= 0.0) delta_ut = 1.9 * omega_ut;
  phonoq::SweepParams sweep{omega_ut, beta_cd, delta_ut, t_ut, steps};
  phonoq::PulseSchedule schedule = phonoq::build_schedule(sweep);

  std::vector<std::vector<double>> rows;
  rows.reserve(n_max);
  for (int n = 1; n <= n_max; ++n) {
    rows.push_back({static_cast<double>(n), phonoq::transfer_probability(n, schedule)});
  }

  json config = base_config_json(cfg);
  config["sweep"] = json{{"omega_ut", omega_ut},
                         {"beta_cd", beta_cd},
                         {"delta_ut", delta_ut},
                         {"t_ut", t_ut},
                         {"steps", steps}};
  config["n_max"] = n_max;
  json meta = make_meta("transfer-scan", cfg, config);

  std::vector<PendingFile> files;
  files.push_back({fs::path(cfg.out_dir) / "transfer_scan.csv",
                   xy_csv(meta, "n,p_transfer", rows)});
  flush_files(cfg.out_dir, files);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Qubit-oscillator dynamics, vacuum-measurement Q sampling, and density-matrix "
               "reconstruction"};
  app.set_config("--config", "", "INI config file; command-line flags override file values");
  app.require_subcommand(1);


  GlobalConfig cfg;
  app.add_option("--seed", cfg.seed, "RNG seed")->capture_default_str();
  app.add_option("--out", cfg.out_dir, "output directory")->capture_default_str();
  app.add_option("--truncation", cfg.truncation, "Fock-space truncation")->capture_default_str();
  app.add_option("--beta", cfg.beta, "initial coherent amplitude")->capture_default_str();
  app.add_option("--eta-omega", cfg.eta_omega, "sideband Rabi rate, rad/s")->capture_default_str();
  app.add_option("--phi", cfg.phi, "drive phase, rad")->capture_default_str();
  app.add_option("--coupling", cfg.coupling, "jc or antijc")->capture_default_str();
  app.add_option("--noise", cfg.noise, "noise profile (noiseless, paper-2016)")->capture_default_str();
  app.add_option("--detector", cfg.detector, "detector profile (ideal, paper-2016)")
      ->capture_default_str();
  app.add_option("--shots", cfg.shots, "shots per grid point")->capture_default_str();
  app.add_option("--grid-rmax", cfg.grid_rmax, "polar grid maximum radius")->capture_default_str();
  app.add_option("--grid-rstep", cfg.grid_rstep, "polar grid radial step")->capture_default_str();
  app.add_option("--grid-phases", cfg.grid_phases, "polar grid phase count")->capture_default_str();
  app.add_option("--dt", cfg.dt, "Lindblad RK4 step, s (0 = revival_time/4096)")
      ->capture_default_str();

  auto* dyn = app.add_subcommand("dynamics", "Rabi signal: closed form and master equation");
  dyn->fallthrough();
  double t_max = 0.0;
  int points = 257;
  dyn->add_option("--t-max", t_max, "last time, s (0 = 1.4 revival times)")->capture_default_str();
  dyn->add_option("--points", points, "number of time samples")->capture_default_str();

  auto* qscan = app.add_subcommand("qscan", "Exact and shot-sampled Q grids at chosen times");
  qscan->fallthrough();
  std::vector<double> fractions{0.0, 0.25, 0.5, 0.75, 1.0};
  qscan->add_option("--times", fractions, "times in units of the revival time")
      ->delimiter(',')
      ->capture_default_str();

  auto* echo = app.add_subcommand("echo", "Drive-phase-flip time reversal and its fidelity");
  echo->fallthrough();

  auto* rec = app.add_subcommand("reconstruct", "Fit a density matrix to Q samples");
  rec->fallthrough();
  std::string input;
  std::string reference_path;
  int n_rec = 12;
  double max_radius = 3.0;
  int max_iter = 5000;
  double tol = 1e-8;
  double wigner_rmax = 2.0;
  double wigner_step = 0.1;
  rec->add_option("--input", input, "Q-samples CSV path")->required();
  rec->add_option("--reference", reference_path, "optional reference density matrix (JSON)")
      ->capture_default_str();
  rec->add_option("--n-rec", n_rec, "reconstruction dimension")->capture_default_str();
  rec->add_option("--max-radius", max_radius, "use samples with |alpha| <= this")
      ->capture_default_str();
  rec->add_option("--max-iter", max_iter, "iteration cap")->capture_default_str();
  rec->add_option("--tol", tol, "relative objective improvement tolerance")->capture_default_str();
  rec->add_option("--wigner-rmax", wigner_rmax, "output Wigner grid half-width")
      ->capture_default_str();
  rec->add_option("--wigner-step", wigner_step, "output Wigner grid step")->capture_default_str();

  auto* scan = app.add_subcommand("transfer-scan", "Per-level transfer probability table");
  scan->fallthrough();
  int n_max = 25;
  phonoq::SweepParams sweep_defaults = phonoq::default_sweep();
  double omega_ut = sweep_defaults.omega_ut;
  double beta_cd = sweep_defaults.beta_cd;
  double delta_ut = 0.0;
  double t_ut = sweep_defaults.t_ut;
  int sweep_steps = sweep_defaults.steps;
  scan->add_option("--n-max", n_max, "largest level to tabulate")->capture_default_str();
  scan->add_option("--omega-ut", omega_ut, "sweep drive amplitude, rad/s")->capture_default_str();
  scan->add_option("--beta-cd", beta_cd, "counter-diabatic amplitude")->capture_default_str();
  scan->add_option("--delta-ut", delta_ut, "sweep detuning range, rad/s (0 = 1.9*omega_ut)")
      ->capture_default_str();
  scan->add_option("--t-ut", t_ut, "sweep duration, s")->capture_default_str();
  scan->add_option("--sweep-steps", sweep_steps, "integrator steps")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (app.got_subcommand(dyn)) return cmd_dynamics(cfg, t_max, points);
    if (app.got_subcommand(qscan)) return cmd_qscan(cfg, fractions);
    if (app.got_subcommand(echo)) return cmd_echo(cfg);
    if (app.got_subcommand(rec)) {
      return cmd_reconstruct(cfg, input, n_rec, max_radius, max_iter, tol, reference_path,
                             wigner_rmax, wigner_step);
    }
    if (app.got_subcommand(scan)) {
      return cmd_transfer_scan(cfg, n_max, omega_ut, beta_cd, delta_ut, t_ut, sweep_steps);
    }
  } catch (const phonoq::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const phonoq::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const phonoq::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const json::exception& e) {
    std::cerr << "json error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}
