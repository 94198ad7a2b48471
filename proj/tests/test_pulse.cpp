#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "softmodes/observables.hpp"
#include "softmodes/pulse.hpp"
#include "testutil.hpp"

using namespace softmodes;

TEST_CASE("exact binomial sign test") {
  SUBCASE("unanimous positives") {
    std::vector<double> diffs(10, 1.0);
    CHECK(sign_test_p_value(diffs) == doctest::Approx(std::pow(0.5, 10)).epsilon(1e-12));
  }
  SUBCASE("five against five") {
    std::vector<double> diffs = {1, 1, 1, 1, 1, -1, -1, -1, -1, -1};
    // P[X >= 5], X ~ Bin(10, 1/2) = 638/1024, computed here via Pascal's rule
    std::vector<double> row = {1.0};
    for (int n = 1; n <= 10; ++n) {
      std::vector<double> next(static_cast<std::size_t>(n) + 1, 1.0);
      for (int i = 1; i < n; ++i)
        next[static_cast<std::size_t>(i)] =
            row[static_cast<std::size_t>(i - 1)] + row[static_cast<std::size_t>(i)];
      row = next;
    }
    double tail = 0.0;
    for (int i = 5; i <= 10; ++i) tail += row[static_cast<std::size_t>(i)];
    tail /= 1024.0;
    CHECK(sign_test_p_value(diffs) == doctest::Approx(tail).epsilon(1e-12));
    CHECK(sign_test_p_value(diffs) == doctest::Approx(0.623046875).epsilon(1e-12));
  }
  SUBCASE("ties are dropped from the sample") {
    std::vector<double> diffs = {1, 1, 1, 1, 1, 0, 0};
    CHECK(sign_test_p_value(diffs) == doctest::Approx(std::pow(0.5, 5)).epsilon(1e-12));
  }
  SUBCASE("degenerate inputs") {
    CHECK_THROWS_AS(sign_test_p_value({0.0, 0.0, 0.0}), UndefinedTestError);
    CHECK_THROWS_AS(sign_test_p_value({1.0}), UndefinedTestError);
    CHECK_THROWS_AS(sign_test_p_value({1.0, 1.0, 1.0, 1.0}), UndefinedTestError);
  }
}

TEST_CASE("pattern tiling") {
  const PatchDictionary dict = make_patch_dictionary(2, 2, 3);
  LatticeGrid grid(15, 2);

  const LatticeField plus = tile_pattern(grid, dict, 8);
  for (double v : plus.values) CHECK(v == 1.0);

  const LatticeField random_tile = tile_pattern(grid, dict, 0);
  // 15 is divisible by 5: the pattern repeats with period 5 along both axes
  for (int i = 0; i < 15; ++i)
    for (int j = 0; j < 15; ++j) CHECK(random_tile.at(i, j) == random_tile.at(i + 5, j + 5));

  LatticeGrid bad(16, 2);
  CHECK_THROWS_AS(tile_pattern(bad, dict, 0), DimensionError);
  CHECK_NOTHROW(tile_pattern(bad, dict, 8));  // uniform tiles any grid
}

TEST_CASE("zero pulse strength produces identical paired trials") {
  const PatchDictionary dict = make_patch_dictionary(2, 2, 21);
  VPSchedule sched(1.0);
  const LogTimeGrid grid(50.0, 0.01, 120);
  const LatticeGrid lattice(10, 2);

  PulseConfig cfg;
  cfg.w_pulse = 0.0;
  cfg.trials = 6;
  cfg.base_seed = 19;
  cfg.t_center_critical = std::log(26.0);

  const PulseOutcome outcome = run_pulse_experiment(dict, sched, grid, lattice, cfg, 2);
  REQUIRE(outcome.trials.size() == 12);
  for (int j = 0; j < 6; ++j) {
    CHECK(outcome.trials[static_cast<std::size_t>(j)].alignment ==
          outcome.trials[static_cast<std::size_t>(6 + j)].alignment);
  }
  CHECK(!outcome.p_defined);  // all paired differences are exactly zero
  CHECK(outcome.median_critical == outcome.median_random);
}

TEST_CASE("paired trials share the seed but not the pulse center") {
  const PatchDictionary dict = make_patch_dictionary(2, 2, 21);
  VPSchedule sched(1.0);
  const LogTimeGrid grid(50.0, 0.01, 120);
  const LatticeGrid lattice(10, 2);

  PulseConfig cfg;
  cfg.w_pulse = 1.5;
  cfg.trials = 5;
  cfg.base_seed = 4;
  cfg.t_center_critical = std::log(26.0);

  const PulseOutcome outcome = run_pulse_experiment(dict, sched, grid, lattice, cfg, 2);
  for (int j = 0; j < 5; ++j) {
    const auto& crit = outcome.trials[static_cast<std::size_t>(j)];
    const auto& rand = outcome.trials[static_cast<std::size_t>(5 + j)];
    CHECK(crit.condition == PulseCondition::critical);
    CHECK(rand.condition == PulseCondition::random_time);
    CHECK(crit.index == rand.index);
    CHECK(crit.t_center == std::log(26.0));
    CHECK(rand.t_center >= 0.01);
    CHECK(rand.t_center <= 50.0);
  }
  // random centers differ across trials
  bool any_differ = false;
  for (int j = 1; j < 5; ++j)
    any_differ |= outcome.trials[static_cast<std::size_t>(5 + j)].t_center !=
                  outcome.trials[static_cast<std::size_t>(5)].t_center;
  CHECK(any_differ);
}

TEST_CASE("targeting the flipped pattern with negated noise mirrors the run") {
  const PatchDictionary dict = make_patch_dictionary(2, 2, 31);
  VPSchedule sched(1.0);
  const LogTimeGrid grid(50.0, 0.01, 150);
  const LatticeGrid lattice(10, 2);

  PatchPosteriorScore uncond(dict, sched);
  PatchPosteriorScore cond_plus(dict.restricted_to(8), sched);
  PatchPosteriorScore cond_minus(dict.restricted_to(9), sched);

  auto weight = [](double t) {
    return std::abs(std::log(t) - std::log(26.0)) <= 0.5 ? 1.5 : 0.0;
  };
  const GuidedScore guided_plus(cond_plus, uncond, weight);
  const GuidedScore guided_minus(cond_minus, uncond, weight);

  IntegratorConfig plus_cfg{grid, true, 3, 151, 1.0};
  IntegratorConfig minus_cfg = plus_cfg;
  minus_cfg.noise_sign = -1.0;

  const TrajectoryRecord a = integrate_reverse(guided_plus, sched, plus_cfg, lattice);
  const TrajectoryRecord b = integrate_reverse(guided_minus, sched, minus_cfg, lattice);
  CHECK(b.state_at_t_min() == negated(a.state_at_t_min()));  // bitwise mirror

  const LatticeField target(lattice, 1.0);
  CHECK(alignment_overlap(b.state_at_t_min(), target) ==
        doctest::Approx(-alignment_overlap(a.state_at_t_min(), target)).epsilon(1e-15));
}

TEST_CASE("an always-on strong pulse dominates the outcome") {
  const PatchDictionary dict = make_patch_dictionary(2, 2, 21);
  VPSchedule sched(1.0);
  const LogTimeGrid grid(50.0, 1e-3, 400);
  const LatticeGrid lattice(15, 2);

  PulseConfig cfg;
  cfg.w_pulse = 2.0;
  cfg.half_width = 20.0;  // covers log t over the whole grid range
  cfg.trials = 5;
  cfg.base_seed = 6;
  cfg.t_center_critical = std::log(26.0);
  const PulseOutcome outcome = run_pulse_experiment(dict, sched, grid, lattice, cfg, 2);
  CHECK(outcome.median_critical >= 0.9);
  // both conditions see the same always-on window, so they tie trial by trial
  for (int j = 0; j < cfg.trials; ++j)
    CHECK(outcome.trials[static_cast<std::size_t>(j)].alignment ==
          outcome.trials[static_cast<std::size_t>(cfg.trials + j)].alignment);
}

TEST_CASE("median critical alignment grows with the pulse strength") {
  const PatchDictionary dict = make_patch_dictionary(2, 2, 21);
  VPSchedule sched(1.0);
  const LogTimeGrid grid(50.0, 1e-3, 400);
  const LatticeGrid lattice(15, 2);

  double prev = -2.0;
  for (double w : {0.0, 0.5, 1.0, 2.0}) {
    PulseConfig cfg;
    cfg.w_pulse = w;
    cfg.half_width = 0.5;
    cfg.trials = 8;
    cfg.base_seed = 2;
    cfg.t_center_critical = std::log(26.0);
    const PulseOutcome outcome = run_pulse_experiment(dict, sched, grid, lattice, cfg, 2);
    CHECK(outcome.median_critical >= prev);
    prev = outcome.median_critical;
  }
}

TEST_CASE("pulse parameter validation") {
  const PatchDictionary dict = make_patch_dictionary(2, 2, 21);
  VPSchedule sched(1.0);
  const LogTimeGrid grid(10.0, 0.1, 20);
  const LatticeGrid lattice(10, 2);

  PulseConfig cfg;
  cfg.t_center_critical = 1.0;
  cfg.target_id = 99;
  CHECK_THROWS_AS(run_pulse_experiment(dict, sched, grid, lattice, cfg, 1), ParameterError);

  cfg.target_id = -1;
  cfg.half_width = 0.0;
  CHECK_THROWS_AS(run_pulse_experiment(dict, sched, grid, lattice, cfg, 1), ParameterError);

  cfg.half_width = 0.2;
  cfg.t_center_critical = 0.0;
  CHECK_THROWS_AS(run_pulse_experiment(dict, sched, grid, lattice, cfg, 1), ParameterError);
}
