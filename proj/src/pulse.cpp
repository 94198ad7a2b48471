#include "softmodes/pulse.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "softmodes/observables.hpp"
#include "softmodes/rng.hpp"

namespace softmodes {

namespace {

constexpr std::uint64_t kCenterStreamTag = 0x70756c7365ULL;  // auxiliary center stream

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

int resolve_target(const PatchDictionary& dict, int target_id) {
  if (target_id >= 0) {
    if (target_id >= dict.size()) throw ParameterError("target pattern not in dictionary");
    return target_id;
  }
  for (int k = 0; k < dict.size(); ++k) {
    const auto& p = dict.pattern(k);
    if (std::all_of(p.begin(), p.end(), [](double e) { return e == 1.0; })) return k;
  }
  throw ParameterError("dictionary has no all-plus pattern to target");
}

}  // namespace

double sign_test_p_value(const std::vector<double>& paired_differences) {
  long positive = 0, nonzero = 0;
  for (double d : paired_differences) {
    if (d > 0.0) ++positive;
    if (d != 0.0) ++nonzero;
  }
  if (nonzero == 0) throw UndefinedTestError("sign test undefined: all paired differences are zero");
  if (nonzero < 5) throw UndefinedTestError("sign test needs at least 5 nonzero differences");

  // P[Bin(n, 1/2) >= k], exact.
  const long n = nonzero, k = positive;
  long double coeff = 1.0L;  // C(n, 0)
  long double tail = 0.0L;
  for (long i = 0; i <= n; ++i) {
    if (i >= k) tail += coeff;
    coeff = coeff * static_cast<long double>(n - i) / static_cast<long double>(i + 1);
  }
  return static_cast<double>(tail * std::pow(0.5L, static_cast<long double>(n)));
}

LatticeField tile_pattern(const LatticeGrid& grid, const PatchDictionary& dict, int pattern_id) {
  const int id = resolve_target(dict, pattern_id);
  const auto& p = dict.pattern(id);

  const bool uniform = std::all_of(p.begin(), p.end(), [&](double e) { return e == p.front(); });
  if (uniform) return LatticeField(grid, p.front());

  if (grid.dim() != dict.dim()) throw DimensionError("grid dimension does not match dictionary");
  const int w = 2 * dict.radius() + 1;
  if (grid.side() % w != 0)
    throw DimensionError("lattice side must be divisible by the patch width for tiling");

  LatticeField out(grid);
  const int L = grid.side();
  if (grid.dim() == 1) {
    for (int i = 0; i < L; ++i) out.at(i) = p[static_cast<std::size_t>(i % w)];
  } else {
    for (int i = 0; i < L; ++i)
      for (int j = 0; j < L; ++j)
        out.at(i, j) = p[static_cast<std::size_t>((i % w) * w + j % w)];
  }
  return out;
}

PulseOutcome run_pulse_experiment(const PatchDictionary& dict, const VPSchedule& sched,
                                  const LogTimeGrid& grid, const LatticeGrid& lattice,
                                  const PulseConfig& cfg, int n_workers) {
  if (cfg.trials < 1) throw ParameterError("at least one trial required");
  if (!(cfg.half_width > 0.0)) throw ParameterError("pulse half-width must be positive");
  if (!(cfg.t_center_critical > 0.0)) throw ParameterError("critical pulse center required");

  const int target = resolve_target(dict, cfg.target_id);
  const LatticeField target_field = tile_pattern(lattice, dict, target);

  const PatchPosteriorScore unconditional(dict, sched, cfg.backend);
  const PatchPosteriorScore conditional(dict.restricted_to(target), sched, cfg.backend);

  // Random pulse centers over the grid range, from a stream disjoint from the
  // trajectory noise streams.
  std::vector<double> random_centers(static_cast<std::size_t>(cfg.trials));
  const double log_lo = std::log(grid.t_min());
  const double log_hi = std::log(grid.t_max());
  for (int j = 0; j < cfg.trials; ++j) {
    GaussianRng stream(derive_seed(cfg.base_seed, kCenterStreamTag, static_cast<std::uint64_t>(j)));
    const double u = stream.next_uniform();
    random_centers[static_cast<std::size_t>(j)] =
        cfg.centers == PulseCenterDistribution::uniform_log_t
            ? std::exp(log_lo + u * (log_hi - log_lo))
            : grid.t_min() + u * (grid.t_max() - grid.t_min());
  }

  auto window_weight = [&](double t_center) {
    if (cfg.window == PulseWindowKind::log_t) {
      const double c = std::log(t_center);
      return std::function<double(double)>([c, &cfg](double t) {
        return std::abs(std::log(t) - c) <= cfg.half_width ? cfg.w_pulse : 0.0;
      });
    }
    const double sc = sched.sigma(t_center);
    const VPSchedule sched_copy = sched;
    return std::function<double(double)>([sc, sched_copy, &cfg](double t) {
      return std::abs(sched_copy.sigma(t) - sc) <= cfg.half_width ? cfg.w_pulse : 0.0;
    });
  };

  IntegratorConfig icfg{grid, /*noise_on=*/true, cfg.base_seed,
                        /*record_every=*/grid.steps() + 1, /*noise_sign=*/1.0};

  const int total_runs = 2 * cfg.trials;
  std::vector<PulseTrial> results(static_cast<std::size_t>(total_runs));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&]() {
    for (;;) {
      const int run = next.fetch_add(1);
      if (run >= total_runs) return;
      try {
        const int j = run % cfg.trials;
        const PulseCondition condition =
            run < cfg.trials ? PulseCondition::critical : PulseCondition::random_time;
        const double t_center = condition == PulseCondition::critical
                                    ? cfg.t_center_critical
                                    : random_centers[static_cast<std::size_t>(j)];
        const GuidedScore guided(conditional, unconditional, window_weight(t_center));
        const TrajectoryRecord record = integrate_reverse(
            guided, sched, icfg, lattice, std::nullopt, static_cast<std::uint64_t>(j));
        PulseTrial trial;
        trial.index = j;
        trial.condition = condition;
        trial.t_center = t_center;
        trial.alignment = alignment_overlap(record.state_at_t_min(), target_field);
        results[static_cast<std::size_t>(run)] = trial;
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  n_workers = std::max(1, std::min(n_workers, total_runs));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  PulseOutcome outcome;
  outcome.trials = std::move(results);

  std::vector<double> critical, random, diffs;
  for (int j = 0; j < cfg.trials; ++j) {
    const double a_crit = outcome.trials[static_cast<std::size_t>(j)].alignment;
    const double a_rand = outcome.trials[static_cast<std::size_t>(cfg.trials + j)].alignment;
    critical.push_back(a_crit);
    random.push_back(a_rand);
    diffs.push_back(a_crit - a_rand);
  }
  outcome.median_critical = median_of(critical);
  outcome.median_random = median_of(random);
  try {
    outcome.p_value = sign_test_p_value(diffs);
    outcome.p_defined = true;
  } catch (const UndefinedTestError& err) {
    outcome.p_defined = false;
    outcome.p_message = err.what();
  }
  return outcome;
}

}  // namespace softmodes
