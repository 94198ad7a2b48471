#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "softmodes/scores.hpp"
#include "testutil.hpp"

using namespace softmodes;

namespace {

PrototypeSet plus_minus_pair(const LatticeGrid& grid, double amplitude = 1.0) {
  LatticeField mu(grid, amplitude);
  return PrototypeSet({mu, negated(mu)}, {0.5, 0.5});
}

}  // namespace

TEST_CASE("empirical score vanishes at the symmetric point of a closed pair") {
  LatticeGrid grid(6, 2);
  EmpiricalPrototypeScore model(plus_minus_pair(grid), VPSchedule(1.0));
  CHECK(model.z2_closed());
  const LatticeField s = model.score(LatticeField(grid), 1.3);
  CHECK(max_abs(s) == 0.0);
}

TEST_CASE("single prototype gives the exact posterior mean") {
  LatticeGrid grid(5, 2);
  LatticeField mu = testutil::random_field(grid, 21);
  EmpiricalPrototypeScore model(PrototypeSet({mu}, {1.0}), VPSchedule(1.0));
  const LatticeField x = testutil::random_field(grid, 22);
  const double t = 0.8;
  VPSchedule sched(1.0);
  const LatticeField s = model.score(x, t);
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    const double expect = (sched.alpha(t) * mu.values[i] - x.values[i]) / sched.sigma2(t);
    CHECK(s.values[i] == doctest::Approx(expect).epsilon(1e-14));
  }
}

TEST_CASE("scalar two-prototype score matches the log-cosh closed form") {
  // beta = 1, t = log 2 so alpha^2 = sigma^2 = 1/2; x = 0.5 at the probed site
  LatticeGrid grid(2, 1);
  VPSchedule sched(1.0);
  const double t = std::log(2.0);
  const double alpha = sched.alpha(t), s2 = sched.sigma2(t);

  LatticeField mu(grid);
  mu.at(0) = 1.0;
  EmpiricalPrototypeScore model(PrototypeSet({mu, negated(mu)}, {0.5, 0.5}), sched);

  LatticeField x(grid);
  x.at(0) = 0.5;
  const LatticeField s = model.score(x, t);
  const double oracle = (alpha * std::tanh(alpha * 0.5 / s2) - 0.5) / s2;
  CHECK(s.at(0) == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(s.at(0) == doctest::Approx(-0.1389).epsilon(2e-3));
}

TEST_CASE("local tanh score basics") {
  VPSchedule sched(1.0);
  LocalTanhScore model(1, sched);
  LatticeGrid grid(8, 2);

  SUBCASE("zero state maps to zero") {
    CHECK(max_abs(model.score(LatticeField(grid), 2.0)) == 0.0);
  }
  SUBCASE("saturated limit at small t") {
    LatticeField x(grid, 1.0);
    const double t = 1e-4;
    const LatticeField s = model.score(x, t);
    const double expect = (sched.alpha(t) * 1.0 - 1.0) / sched.sigma2(t);
    for (double v : s.values) CHECK(v == doctest::Approx(expect).epsilon(1e-9));
  }
  SUBCASE("matches a direct 9-term loop") {
    const LatticeField x = testutil::random_field(grid, 31);
    const double t = 0.7;
    const LatticeField s = model.score(x, t);
    const double alpha = sched.alpha(t), s2 = sched.sigma2(t);
    for (int i = 0; i < 8; ++i) {
      for (int j = 0; j < 8; ++j) {
        double box = 0.0;
        for (int ui = -1; ui <= 1; ++ui)
          for (int uj = -1; uj <= 1; ++uj) box += x.at(i + ui, j + uj);
        const double expect = (alpha * std::tanh(alpha * box / s2) - x.at(i, j)) / s2;
        CHECK(std::abs(s.at(i, j) - expect) <= 1e-12);
      }
    }
  }
  SUBCASE("patch larger than lattice rejected") {
    LatticeGrid tiny(3, 2);
    LocalTanhScore wide(2, sched);
    CHECK_THROWS_AS(wide.score(LatticeField(tiny, 1.0), 1.0), DimensionError);
  }
  SUBCASE("t <= 0 rejected") {
    CHECK_THROWS_AS(model.score(LatticeField(grid), 0.0), SingularNoiseError);
    CHECK_THROWS_AS(model.score(LatticeField(grid), -1.0), SingularNoiseError);
  }
}

TEST_CASE("posterior score with the all-plus/all-minus pair reduces to tanh") {
  VPSchedule sched(1.0);
  const int K = 2;
  const std::size_t len = 25;
  PatchDictionary pair(K, 2, {std::vector<double>(len, 1.0), std::vector<double>(len, -1.0)},
                       {0.5, 0.5});
  PatchPosteriorScore posterior(pair, sched);
  LocalTanhScore tanh_model(K, sched);

  LatticeGrid grid(16, 2);
  GaussianRng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const LatticeField x = testutil::random_field(grid, 100 + static_cast<std::uint64_t>(trial));
    const double t = 0.1 + 4.9 * rng.next_uniform();
    CHECK(inf_norm_diff(posterior.score(x, t), tanh_model.score(x, t)) <= 1e-9);
  }
}

TEST_CASE("posterior score agrees with the independent per-site oracle") {
  VPSchedule sched(1.0);
  const PatchDictionary dict = make_patch_dictionary(2, 2, 7);
  PatchPosteriorScore direct(dict, sched, CorrelationBackend::direct);
  PatchPosteriorScore fft(dict, sched, CorrelationBackend::fft);

  LatticeGrid grid(12, 2);
  for (double t : {0.3, 2.0, 5.0}) {
    const LatticeField x = testutil::random_field(grid, static_cast<std::uint64_t>(t * 100));
    const LatticeField oracle = testutil::direct_posterior_score(dict, sched, x, t);
    CHECK(inf_norm_diff(direct.score(x, t), oracle) <= 1e-10);
    CHECK(inf_norm_diff(fft.score(x, t), oracle) <= 1e-10);
    CHECK(inf_norm_diff(direct.score(x, t), fft.score(x, t)) <= 1e-10);
  }
}

TEST_CASE("reference dictionary layout and priors") {
  const PatchDictionary ten = make_patch_dictionary(2, 2, 42);
  CHECK(ten.size() == 10);
  CHECK(ten.z2_closed());
  double total = 0.0;
  for (int k = 0; k < 8; ++k) {
    CHECK(ten.prior(k) == doctest::Approx(0.1 / 8.0).epsilon(1e-15));
    total += ten.prior(k);
  }
  CHECK(ten.prior(8) == doctest::Approx(0.45).epsilon(1e-15));
  CHECK(ten.prior(9) == doctest::Approx(0.45).epsilon(1e-15));
  for (double v : ten.pattern(8)) CHECK(v == 1.0);
  for (double v : ten.pattern(9)) CHECK(v == -1.0);
  CHECK(total == doctest::Approx(0.1).epsilon(1e-14));

  const PatchDictionary eighteen = make_patch_dictionary(2, 2, 42, DictionaryVariant::eighteen);
  CHECK(eighteen.size() == 18);
  CHECK(eighteen.z2_closed());
  for (int k = 0; k < 16; ++k)
    CHECK(eighteen.prior(k) == doctest::Approx(0.1 / 16.0).epsilon(1e-15));
}

TEST_CASE("posterior score vanishes at zero for a closed dictionary") {
  VPSchedule sched(1.0);
  const PatchDictionary dict = make_patch_dictionary(2, 2, 3);
  PatchPosteriorScore model(dict, sched);
  LatticeGrid grid(10, 2);
  CHECK(max_abs(model.score(LatticeField(grid), 2.5)) == 0.0);
}

TEST_CASE("dictionary validation") {
  CHECK_THROWS_AS(PatchDictionary(1, 2, {}, {}), ParameterError);
  CHECK_THROWS_AS(PatchDictionary(1, 2, {std::vector<double>(9, 1.0)}, {0.5}), ParameterError);
  CHECK_THROWS_AS(PatchDictionary(1, 2, {std::vector<double>(9, 0.5)}, {1.0}), ParameterError);
  CHECK_THROWS_AS(PatchDictionary(1, 2, {std::vector<double>(8, 1.0)}, {1.0}), DimensionError);
}

TEST_CASE("odd symmetry of all closed models") {
  VPSchedule sched(1.0);
  LatticeGrid grid(10, 2);

  const PatchDictionary dict = make_patch_dictionary(2, 2, 11);
  PatchPosteriorScore posterior(dict, sched, CorrelationBackend::direct);
  PatchPosteriorScore posterior_fft(dict, sched, CorrelationBackend::fft);
  LocalTanhScore tanh_model(2, sched);
  EmpiricalPrototypeScore empirical(plus_minus_pair(grid), sched);

  GaussianRng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const LatticeField x = testutil::random_field(grid, 500 + static_cast<std::uint64_t>(trial));
    const double t = 0.05 + 6.0 * rng.next_uniform();
    for (const ScoreModel* model :
         {static_cast<const ScoreModel*>(&posterior),
          static_cast<const ScoreModel*>(&posterior_fft),
          static_cast<const ScoreModel*>(&tanh_model),
          static_cast<const ScoreModel*>(&empirical)}) {
      const LatticeField s_pos = model->score(x, t);
      const LatticeField s_neg = model->score(negated(x), t);
      CHECK(inf_norm_diff(s_neg, negated(s_pos)) <= 1e-10);
    }
  }
}

TEST_CASE("translation equivariance of all three score models") {
  VPSchedule sched(1.0);
  LatticeGrid grid(12, 2);
  const PatchDictionary dict = make_patch_dictionary(2, 2, 13);
  PatchPosteriorScore posterior(dict, sched);
  LocalTanhScore tanh_model(2, sched);
  EmpiricalPrototypeScore empirical(plus_minus_pair(grid), sched);

  const LatticeField x = testutil::random_field(grid, 9);
  const double t = 1.7;
  const int di = 4, dj = 9;
  for (const ScoreModel* model :
       {static_cast<const ScoreModel*>(&posterior), static_cast<const ScoreModel*>(&tanh_model),
        static_cast<const ScoreModel*>(&empirical)}) {
    const LatticeField lhs = model->score(translated(x, di, dj), t);
    const LatticeField rhs = translated(model->score(x, t), di, dj);
    CHECK(inf_norm_diff(lhs, rhs) <= 1e-10);
  }
}

TEST_CASE("locality: a single-site perturbation only acts within the receptive field") {
  VPSchedule sched(1.0);
  const int K = 2;
  const PatchDictionary dict = make_patch_dictionary(K, 2, 19);
  PatchPosteriorScore posterior(dict, sched);
  LocalTanhScore tanh_model(K, sched);

  LatticeGrid grid(14, 2);
  const LatticeField x = testutil::random_field(grid, 55);
  LatticeField y = x;
  const int pi = 6, pj = 7;
  y.at(pi, pj) += 0.37;

  auto wrap_dist = [](int a, int b, int L) {
    const int d = std::abs(a - b) % L;
    return std::min(d, L - d);
  };
  const double t = 1.1;
  for (const ScoreModel* model :
       {static_cast<const ScoreModel*>(&posterior), static_cast<const ScoreModel*>(&tanh_model)}) {
    const LatticeField dx = model->score(x, t);
    const LatticeField dy = model->score(y, t);
    for (int i = 0; i < 14; ++i) {
      for (int j = 0; j < 14; ++j) {
        const bool inside = wrap_dist(i, pi, 14) <= K && wrap_dist(j, pj, 14) <= K;
        if (!inside) CHECK(dx.at(i, j) == dy.at(i, j));
      }
    }
  }
}

TEST_CASE("reverse drift composition") {
  VPSchedule sched(1.0);
  LatticeGrid grid(6, 2);

  SUBCASE("closed model at the symmetric point is a fixed point") {
    const PatchDictionary dict = make_patch_dictionary(1, 2, 23);
    PatchPosteriorScore model(dict, sched);
    const LatticeField b = reverse_drift(model, sched, LatticeField(grid), 2.0);
    CHECK(max_abs(b) == 0.0);
  }
  SUBCASE("single zero prototype reduces to a linear drift") {
    LatticeField mu(grid);  // mu = 0: score = -x/sigma^2, so b = -x/2 + x/sigma^2
    EmpiricalPrototypeScore model(PrototypeSet({mu}, {1.0}), sched);
    const LatticeField x = testutil::random_field(grid, 3);
    const double t = 1.9;
    const LatticeField b = reverse_drift(model, sched, x, t);
    for (std::size_t i = 0; i < b.values.size(); ++i) {
      const double expect = -0.5 * x.values[i] + x.values[i] / sched.sigma2(t);
      CHECK(b.values[i] == doctest::Approx(expect).epsilon(1e-13));
    }
  }
  SUBCASE("general beta scales both terms") {
    VPSchedule fast(2.0);
    LatticeField mu(grid);
    EmpiricalPrototypeScore model(PrototypeSet({mu}, {1.0}), fast);
    const LatticeField x = testutil::random_field(grid, 4);
    const double t = 0.9;
    const LatticeField b = reverse_drift(model, fast, x, t);
    for (std::size_t i = 0; i < b.values.size(); ++i) {
      const double expect = 2.0 * (-0.5 * x.values[i] + x.values[i] / fast.sigma2(t));
      CHECK(b.values[i] == doctest::Approx(expect).epsilon(1e-13));
    }
  }
}

namespace {

/// Fixed-output stub used for the guidance arithmetic checks.
class ConstantScore : public ScoreModel {
 public:
  ConstantScore(LatticeGrid grid, double value) : field_(grid, value) {}
  LatticeField score(const LatticeField&, double) const override { return field_; }
  bool z2_closed() const override { return false; }

 private:
  LatticeField field_;
};

}  // namespace

TEST_CASE("guided score arithmetic") {
  LatticeGrid grid(4, 2);
  ConstantScore cond(grid, 1.0);
  ConstantScore uncond(grid, 0.0);
  const LatticeField x = testutil::random_field(grid, 1);

  CHECK(max_abs(GuidedScore(cond, uncond, 0.0).score(x, 1.0)) == 0.0);
  const LatticeField at_one = GuidedScore(cond, uncond, 1.0).score(x, 1.0);
  for (double v : at_one.values) CHECK(v == 1.0);
  const LatticeField extrapolated = GuidedScore(cond, uncond, 2.0).score(x, 1.0);
  for (double v : extrapolated.values) CHECK(v == 2.0);

  // w = 0 and w = 1 reproduce the endpoint models bitwise
  VPSchedule sched(1.0);
  const PatchDictionary dict = make_patch_dictionary(2, 2, 2);
  PatchPosteriorScore full(dict, sched);
  PatchPosteriorScore restricted(dict.restricted_to(8), sched);
  LatticeGrid big(10, 2);
  const LatticeField y = testutil::random_field(big, 8);
  CHECK(inf_norm_diff(GuidedScore(restricted, full, 0.0).score(y, 1.5), full.score(y, 1.5)) == 0.0);
  CHECK(inf_norm_diff(GuidedScore(restricted, full, 1.0).score(y, 1.5),
                      restricted.score(y, 1.5)) == 0.0);
}

TEST_CASE("dispersion drift differs from the reverse drift by the score sign") {
  VPSchedule sched(1.0);
  const PatchDictionary dict = make_patch_dictionary(2, 2, 6);
  PatchPosteriorScore model(dict, sched);
  LatticeGrid grid(10, 2);
  const LatticeField x = testutil::random_field(grid, 14);
  const double t = 2.2;

  const LatticeField b = make_reverse_drift(model, sched)(x, t);
  const LatticeField g = make_dispersion_drift(model, sched)(x, t);
  const LatticeField s = model.score(x, t);
  for (std::size_t i = 0; i < x.values.size(); ++i) {
    CHECK(b.values[i] == doctest::Approx(-0.5 * x.values[i] - s.values[i]).epsilon(1e-13));
    CHECK(g.values[i] == doctest::Approx(-0.5 * x.values[i] + s.values[i]).epsilon(1e-13));
  }
}

TEST_CASE("dictionary text round trip") {
  const PatchDictionary dict = make_patch_dictionary(2, 2, 31);
  const std::string text = dictionary_to_text(dict);
  const PatchDictionary reloaded = dictionary_from_text(text);
  REQUIRE(reloaded.size() == dict.size());
  CHECK(reloaded.radius() == dict.radius());
  CHECK(reloaded.dim() == dict.dim());
  for (int k = 0; k < dict.size(); ++k) {
    CHECK(reloaded.prior(k) == dict.prior(k));
    CHECK(reloaded.pattern(k) == dict.pattern(k));
  }
  CHECK(dictionary_to_text(reloaded) == text);
}

TEST_CASE("prototype set centering check") {
  LatticeGrid grid(4, 2);
  LatticeField mu(grid, 1.0);
  CHECK_NOTHROW(PrototypeSet({mu, negated(mu)}, {0.5, 0.5}, /*require_centered=*/true));
  CHECK_THROWS_AS(PrototypeSet({mu}, {1.0}, /*require_centered=*/true), ParameterError);
}
