#include "softmodes/dynamics.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "softmodes/rng.hpp"

namespace softmodes {

TrajectoryRecord integrate_reverse(const ScoreModel& model, const VPSchedule& sched,
                                   const IntegratorConfig& cfg, const LatticeGrid& grid,
                                   const std::optional<LatticeField>& x_init,
                                   std::uint64_t trajectory_index) {
  if (cfg.record_every < 1) throw ParameterError("record_every must be at least 1");
  const std::vector<double>& times = cfg.grid.times();

  const std::uint64_t seed = cfg.base_seed + trajectory_index;
  GaussianRng rng(seed);

  LatticeField x = x_init ? *x_init : LatticeField(grid);
  if (x_init) {
    if (!(x.grid == grid)) throw DimensionError("initial state grid mismatch");
  } else {
    for (double& v : x.values) v = cfg.noise_sign * rng.next();
  }

  TrajectoryRecord record;
  record.seed = seed;
  const std::size_t expected =
      (times.size() + static_cast<std::size_t>(cfg.record_every) - 1) /
      static_cast<std::size_t>(cfg.record_every);
  record.times.reserve(expected);
  record.snapshots.reserve(expected);

  auto maybe_record = [&](std::size_t k) {
    if (k % static_cast<std::size_t>(cfg.record_every) == 0) {
      record.times.push_back(times[k]);
      record.snapshots.push_back(x);
    }
  };

  maybe_record(0);
  LatticeField noise(grid);
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    const double t = times[k];
    const double dt = times[k + 1] - times[k];  // negative

    const LatticeField b = reverse_drift(model, sched, x, t);
    add_scaled(x, b, dt);
    if (cfg.noise_on) {
      const double amp = cfg.noise_sign * std::sqrt(-dt);
      for (std::size_t i = 0; i < noise.values.size(); ++i)
        x.values[i] += amp * rng.next();
    }
    if (!all_finite(x))
      throw DivergenceError("non-finite state during reverse integration",
                            static_cast<long>(k + 1));
    maybe_record(k + 1);
  }
  record.final_state = x;
  return record;
}

std::vector<TrajectoryRecord> run_ensemble(const ScoreModel& model, const VPSchedule& sched,
                                           const IntegratorConfig& cfg, const LatticeGrid& grid,
                                           int n_traj, int n_workers) {
  if (n_traj < 1) throw ParameterError("at least one trajectory required");
  n_workers = std::max(1, std::min(n_workers, n_traj));

  std::vector<std::optional<TrajectoryRecord>> slots(static_cast<std::size_t>(n_traj));
  if (n_workers == 1) {
    for (int j = 0; j < n_traj; ++j)
      slots[static_cast<std::size_t>(j)] = integrate_reverse(model, sched, cfg, grid, std::nullopt,
                                                             static_cast<std::uint64_t>(j));
  } else {
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&]() {
      for (;;) {
        const int j = next.fetch_add(1);
        if (j >= n_traj) return;
        try {
          slots[static_cast<std::size_t>(j)] = integrate_reverse(
              model, sched, cfg, grid, std::nullopt, static_cast<std::uint64_t>(j));
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  std::vector<TrajectoryRecord> out;
  out.reserve(static_cast<std::size_t>(n_traj));
  for (auto& slot : slots) out.push_back(std::move(*slot));
  return out;
}

PitchforkTrace integrate_pitchfork(const PitchforkParams& params, const LogTimeGrid& grid,
                                   double m0) {
  if (!(params.u > 0.0)) throw ParameterError("cubic coefficient u must be positive");
  if (!params.r_of_t) throw ParameterError("mass function r(t) required");

  const std::vector<double>& times = grid.times();
  PitchforkTrace trace;
  trace.times = times;
  trace.m.reserve(times.size());

  double m = m0;
  trace.m.push_back(m);
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    const double dtau = times[k] - times[k + 1];  // positive flow step
    const double rate = -params.g2 * params.r_of_t(times[k]) * m - params.u * m * m * m;
    m += dtau * rate;
    if (!std::isfinite(m))
      throw DivergenceError("pitchfork amplitude overflow", static_cast<long>(k + 1));
    trace.m.push_back(m);
  }
  return trace;
}

}  // namespace softmodes
