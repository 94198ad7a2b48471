#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "softmodes/config.hpp"
#include "softmodes/dynamics.hpp"
#include "softmodes/gl_theory.hpp"
#include "softmodes/observables.hpp"
#include "softmodes/pulse.hpp"
#include "softmodes/scores.hpp"
#include "softmodes/spectral.hpp"

namespace softmodes {

VPSchedule make_schedule(const ExperimentConfig& cfg);
LogTimeGrid make_grid(const ExperimentConfig& cfg);
LatticeGrid make_lattice(const ExperimentConfig& cfg);
PatchDictionary make_dictionary(const ExperimentConfig& cfg);
MassConvention parse_convention(const std::string& name);
int resolve_pulse_target(const PatchDictionary& dict, const std::string& spec);

/// Probe directions from the config (axes, optionally plus the diagonal).
std::vector<ProbeDirection> probe_directions(const ExperimentConfig& cfg);

/// Ensemble run plus every per-trajectory observable of the main pipeline.
struct SimulationResult {
  std::vector<TrajectoryRecord> records;
  std::vector<DispersionSpectrum> spectra;  // xi_eq filled over cfg.fit_shells
  std::vector<ObservableSeries> xi_raw;
  std::vector<ObservableSeries> xi_smooth;
  std::vector<ObservableSeries> dxi_dlogt;
  double t_c_hat = 0.0;
};

SimulationResult run_simulation(const ExperimentConfig& cfg, const ScoreModel& model,
                                int n_workers);

/// Command bodies shared by the CLI and the acceptance suite. Each writes its
/// artifacts under cfg.out_dir (partial outputs are removed on failure).
void cmd_simulate(const ExperimentConfig& cfg, int n_workers);
void cmd_theory(const ExperimentConfig& cfg);
double cmd_oracle(const ExperimentConfig& cfg);  // returns the max deviation
void cmd_probe(const ExperimentConfig& cfg);
PulseOutcome cmd_pulse(const ExperimentConfig& cfg, int n_workers);

}  // namespace softmodes
