#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "softmodes/errors.hpp"

namespace softmodes {

/// Effective configuration of a run. Defaults are the reference-experiment
/// values: 80x80 lattice, 5x5 patches, beta = 1, T = 50 down to 1e-3 over
/// 2000 steps, 4 trajectories, shells up to n = 6.
struct ExperimentConfig {
  // [lattice]
  int L = 80;
  int d = 2;

  // [patch]
  int K = 2;
  std::uint64_t dict_seed = 1;
  std::string dict_variant = "ten";  // ten | eighteen
  std::string dict_file;             // optional path; empty = generate
  double random_prior_total = 0.1;
  std::string backend = "direct";  // direct | fft

  // [schedule]
  double beta = 1.0;
  double t_max = 50.0;
  double t_min = 1e-3;
  int steps = 2000;

  // [ensemble]
  int n_traj = 4;
  std::uint64_t base_seed = 1;
  int record_every = 10;
  bool noise = true;

  // [spectral]
  int n_max = 6;
  bool use_diagonal = false;
  std::vector<int> fit_shells = {1, 2, 3};
  std::string probe_drift = "reverse";  // reverse | dispersion
  double epsilon_floor = 5e-5;

  // [observables]
  double smoothing_width = 5.0;

  // [theory]
  std::string convention = "tree-level";  // main-text | tree-level | reverse-flow
  double delta_x_var = 0.0;

  // [pulse]
  double w_pulse = 1.5;
  double pulse_half_width = 0.25;
  int pulse_trials = 20;
  std::string pulse_target = "uniform+";  // uniform+ | uniform- | pattern index
  std::string pulse_window = "log_t";     // log_t | sigma
  std::string pulse_centers = "uniform_t";  // uniform_t | uniform_log_t
  std::string pulse_t_center = "auto";    // auto | numeric value

  // [output]
  std::string out_dir = "out";
};

/// Parses the line-oriented `key = value` format with [section] headers.
/// Unknown sections or keys are rejected; '#' starts a comment.
ExperimentConfig parse_config(const std::string& text);

ExperimentConfig load_config(const std::filesystem::path& path);

/// Applies a single `section.key` override (CLI flags route through this).
void apply_override(ExperimentConfig& cfg, const std::string& dotted_key,
                    const std::string& value);

/// Re-validates every cross-field constraint; throws ConfigError naming the field.
void validate(const ExperimentConfig& cfg);

/// Canonical echo of every effective value; reloading it reproduces `cfg`.
std::string echo_config(const ExperimentConfig& cfg);

}  // namespace softmodes
