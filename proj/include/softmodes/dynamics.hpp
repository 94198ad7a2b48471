#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "softmodes/lattice.hpp"
#include "softmodes/schedule.hpp"
#include "softmodes/scores.hpp"

namespace softmodes {

struct IntegratorConfig {
  LogTimeGrid grid;
  bool noise_on = true;
  std::uint64_t base_seed = 1;
  int record_every = 1;
  double noise_sign = 1.0;  // -1 negates the noise stream (symmetry checks)
};

/// One reverse trajectory: states at the recorded grid times plus the final
/// state at t_min (kept regardless of the recording stride).
struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<LatticeField> snapshots;
  std::optional<LatticeField> final_state;
  std::uint64_t seed = 0;

  const LatticeField& state_at_t_min() const { return *final_state; }
};

/// Euler-Maruyama along the decreasing log grid:
/// x_{k+1} = x_k + b(x_k, t_k) dt + sqrt(|dt|) eta_k, with b the reverse drift.
/// x_init empty means i.i.d. standard normal (the stationary start at large T).
/// trajectory_index selects the noise stream seed = base_seed + index.
TrajectoryRecord integrate_reverse(const ScoreModel& model, const VPSchedule& sched,
                                   const IntegratorConfig& cfg, const LatticeGrid& grid,
                                   const std::optional<LatticeField>& x_init = std::nullopt,
                                   std::uint64_t trajectory_index = 0);

/// Independent trajectories with seeds base_seed + j, optionally fanned out to
/// a worker pool. Results are identical for any worker count.
std::vector<TrajectoryRecord> run_ensemble(const ScoreModel& model, const VPSchedule& sched,
                                           const IntegratorConfig& cfg, const LatticeGrid& grid,
                                           int n_traj, int n_workers = 1);

/// Reduced symmetric-mode equation dm/dtau = -g^2 r(t) m - u m^3, integrated
/// with explicit Euler along the decreasing grid (dtau = |dt|).
struct PitchforkParams {
  double g2 = 1.0;
  std::function<double(double)> r_of_t;
  double u = 1.0;
};

struct PitchforkTrace {
  std::vector<double> times;
  std::vector<double> m;
  std::string method = "euler";
};

PitchforkTrace integrate_pitchfork(const PitchforkParams& params, const LogTimeGrid& grid,
                                   double m0);

}  // namespace softmodes
