#pragma once

#include <cstdint>
#include <vector>

#include "softmodes/dynamics.hpp"
#include "softmodes/scores.hpp"

namespace softmodes {

enum class PulseWindowKind { log_t, sigma };
enum class PulseCondition { critical, random_time };

/// Measure for the random-condition pulse centers. uniform_t mirrors the
/// uniform-in-noise-scale draw of the source protocol; uniform_log_t matches
/// the integration grid instead, which concentrates draws in the committed
/// low-noise endgame.
enum class PulseCenterDistribution { uniform_t, uniform_log_t };

struct PulseConfig {
  double w_pulse = 1.5;
  double half_width = 0.25;  // log-time units (or sigma units, see window)
  int trials = 20;
  std::uint64_t base_seed = 1;
  int target_id = -1;          // -1 selects the all-plus uniform pattern
  double t_center_critical = 0.0;
  PulseWindowKind window = PulseWindowKind::log_t;
  PulseCenterDistribution centers = PulseCenterDistribution::uniform_t;
  CorrelationBackend backend = CorrelationBackend::direct;
};

struct PulseTrial {
  int index = 0;
  PulseCondition condition = PulseCondition::critical;
  double t_center = 0.0;
  double alignment = 0.0;
};

struct PulseOutcome {
  std::vector<PulseTrial> trials;  // critical first, then random, index-ordered
  double median_critical = 0.0;
  double median_random = 0.0;
  double p_value = 1.0;
  bool p_defined = false;
  std::string p_message;
};

/// Exact one-sided binomial sign test on the signs of paired differences
/// (H1: median difference > 0). Needs at least 5 nonzero differences.
double sign_test_p_value(const std::vector<double>& paired_differences);

/// Tiles a dictionary pattern across the grid (+-1 target field). Uniform
/// patterns tile any grid; otherwise L must be divisible by 2K+1.
LatticeField tile_pattern(const LatticeGrid& grid, const PatchDictionary& dict, int pattern_id);

/// Paired critical-vs-random pulse experiment. The unconditional model is the
/// full dictionary posterior; the conditional model restricts the dictionary
/// to the target pattern. Trial j shares the noise stream base_seed + j across
/// both conditions; random pulse centers are drawn uniformly in log t from an
/// auxiliary stream.
PulseOutcome run_pulse_experiment(const PatchDictionary& dict, const VPSchedule& sched,
                                  const LogTimeGrid& grid, const LatticeGrid& lattice,
                                  const PulseConfig& cfg, int n_workers = 1);

}  // namespace softmodes
