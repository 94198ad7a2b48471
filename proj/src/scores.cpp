#include "softmodes/scores.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "softmodes/fft.hpp"
#include "softmodes/rng.hpp"

namespace softmodes {

namespace {

constexpr double kPriorTolerance = 1e-12;

std::vector<int> find_flip_partners(const std::vector<std::vector<double>>& patterns,
                                    const std::vector<double>& priors) {
  const int m = static_cast<int>(patterns.size());
  std::vector<int> partner(static_cast<std::size_t>(m), -1);
  for (int a = 0; a < m; ++a) {
    if (partner[static_cast<std::size_t>(a)] >= 0) continue;
    for (int b = 0; b < m; ++b) {
      if (b == a || priors[static_cast<std::size_t>(b)] != priors[static_cast<std::size_t>(a)])
        continue;
      bool is_flip = true;
      for (std::size_t i = 0; i < patterns[static_cast<std::size_t>(a)].size(); ++i) {
        if (patterns[static_cast<std::size_t>(a)][i] != -patterns[static_cast<std::size_t>(b)][i]) {
          is_flip = false;
          break;
        }
      }
      if (is_flip) {
        partner[static_cast<std::size_t>(a)] = b;
        partner[static_cast<std::size_t>(b)] = a;
        break;
      }
    }
  }
  return partner;
}

void require_positive_time(double t) {
  if (!(t > 0.0)) throw SingularNoiseError("score requires t > 0 (sigma^2 > 0)");
}

}  // namespace

PatchDictionary::PatchDictionary(int radius, int dimension,
                                 std::vector<std::vector<double>> patterns,
                                 std::vector<double> priors)
    : radius_(radius), dim_(dimension), patterns_(std::move(patterns)), priors_(std::move(priors)) {
  if (dimension != 1 && dimension != 2) throw DimensionError("dictionary dimension must be 1 or 2");
  if (radius < 0) throw ParameterError("patch radius must be nonnegative");
  if (patterns_.empty()) throw ParameterError("dictionary must contain at least one pattern");
  if (patterns_.size() != priors_.size()) throw ParameterError("one prior per pattern required");

  const std::size_t len = dimension == 1
                              ? static_cast<std::size_t>(2 * radius + 1)
                              : static_cast<std::size_t>(2 * radius + 1) * (2 * radius + 1);
  double total = 0.0;
  for (std::size_t k = 0; k < patterns_.size(); ++k) {
    if (patterns_[k].size() != len) throw DimensionError("pattern length does not match radius");
    for (double e : patterns_[k])
      if (e != 1.0 && e != -1.0) throw ParameterError("pattern entries must be +-1");
    if (!(priors_[k] > 0.0)) throw ParameterError("priors must be positive");
    total += priors_[k];
  }
  if (std::abs(total - 1.0) > kPriorTolerance) throw ParameterError("priors must sum to 1");

  log_priors_.resize(priors_.size());
  for (std::size_t k = 0; k < priors_.size(); ++k) log_priors_[k] = std::log(priors_[k]);

  flip_partner_ = find_flip_partners(patterns_, priors_);
  z2_closed_ = std::all_of(flip_partner_.begin(), flip_partner_.end(), [](int p) { return p >= 0; });
}

PatchDictionary PatchDictionary::restricted_to(int k) const {
  if (k < 0 || k >= size()) throw ParameterError("pattern index out of range");
  return PatchDictionary(radius_, dim_, {pattern(k)}, {1.0});
}

PatchDictionary make_patch_dictionary(int radius, int dimension, std::uint64_t seed,
                                      DictionaryVariant variant, double random_prior_total) {
  if (!(random_prior_total > 0.0) || !(random_prior_total < 1.0))
    throw ParameterError("random prior total must lie in (0, 1)");

  const std::size_t len = dimension == 1
                              ? static_cast<std::size_t>(2 * radius + 1)
                              : static_cast<std::size_t>(2 * radius + 1) * (2 * radius + 1);
  GaussianRng rng(seed);
  std::vector<std::vector<double>> patterns;

  const std::vector<double> plus(len, 1.0);
  const std::vector<double> minus(len, -1.0);

  auto flipped = [](const std::vector<double>& p) {
    std::vector<double> q(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) q[i] = -p[i];
    return q;
  };
  auto already_present = [&](const std::vector<double>& p) {
    if (p == plus || p == minus) return true;
    return std::any_of(patterns.begin(), patterns.end(),
                       [&](const std::vector<double>& q) { return q == p; });
  };
  auto draw_distinct_pattern = [&]() {
    for (;;) {
      std::vector<double> p(len);
      for (double& e : p) e = (rng.next_raw() & 1u) ? 1.0 : -1.0;
      if (!already_present(p) && !already_present(flipped(p))) return p;
    }
  };

  const int independent_draws = variant == DictionaryVariant::ten ? 4 : 8;
  for (int n = 0; n < independent_draws; ++n) {
    auto p = draw_distinct_pattern();
    patterns.push_back(p);
    patterns.push_back(flipped(p));
  }
  patterns.push_back(plus);
  patterns.push_back(minus);

  const std::size_t n_random = patterns.size() - 2;
  std::vector<double> priors(patterns.size());
  for (std::size_t k = 0; k < n_random; ++k)
    priors[k] = random_prior_total / static_cast<double>(n_random);
  priors[n_random] = (1.0 - random_prior_total) / 2.0;
  priors[n_random + 1] = (1.0 - random_prior_total) / 2.0;

  return PatchDictionary(radius, dimension, std::move(patterns), std::move(priors));
}

std::string dictionary_to_text(const PatchDictionary& dict) {
  std::ostringstream out;
  out << dict.radius() << ' ' << dict.dim() << ' ' << dict.size() << '\n';
  char buf[64];
  for (int k = 0; k < dict.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", dict.prior(k));
    out << buf;
    for (double e : dict.pattern(k)) out << ' ' << (e > 0.0 ? 1 : -1);
    out << '\n';
  }
  return out.str();
}

PatchDictionary dictionary_from_text(const std::string& text) {
  std::istringstream in(text);
  int radius = 0, dim = 0, count = 0;
  if (!(in >> radius >> dim >> count)) throw ParameterError("bad dictionary header");
  if (count < 1) throw ParameterError("dictionary must contain at least one pattern");
  const long len = dim == 1 ? 2L * radius + 1 : static_cast<long>(2 * radius + 1) * (2 * radius + 1);

  std::vector<std::vector<double>> patterns;
  std::vector<double> priors;
  for (int k = 0; k < count; ++k) {
    double prior = 0.0;
    if (!(in >> prior)) throw ParameterError("missing prior in dictionary");
    std::vector<double> p(static_cast<std::size_t>(len));
    for (long i = 0; i < len; ++i) {
      int e = 0;
      if (!(in >> e)) throw ParameterError("truncated pattern in dictionary");
      p[static_cast<std::size_t>(i)] = static_cast<double>(e);
    }
    priors.push_back(prior);
    patterns.push_back(std::move(p));
  }
  return PatchDictionary(radius, dim, std::move(patterns), std::move(priors));
}

PrototypeSet::PrototypeSet(std::vector<LatticeField> prototypes, std::vector<double> priors,
                           bool require_centered)
    : prototypes_(std::move(prototypes)), priors_(std::move(priors)) {
  if (prototypes_.empty()) throw ParameterError("prototype set must be nonempty");
  if (prototypes_.size() != priors_.size()) throw ParameterError("one prior per prototype required");
  double total = 0.0;
  for (std::size_t m = 0; m < prototypes_.size(); ++m) {
    if (!(prototypes_[m].grid == prototypes_.front().grid))
      throw DimensionError("prototypes live on different grids");
    if (!(priors_[m] > 0.0)) throw ParameterError("priors must be positive");
    total += priors_[m];
  }
  if (std::abs(total - 1.0) > kPriorTolerance) throw ParameterError("priors must sum to 1");

  if (require_centered) {
    LatticeField mean(prototypes_.front().grid);
    for (std::size_t m = 0; m < prototypes_.size(); ++m)
      add_scaled(mean, prototypes_[m], priors_[m]);
    if (max_abs(mean) > 1e-10) throw ParameterError("prototype set is not centered");
  }

  const int m = size();
  flip_partner_.assign(static_cast<std::size_t>(m), -1);
  for (int a = 0; a < m; ++a) {
    if (flip_partner_[static_cast<std::size_t>(a)] >= 0) continue;
    for (int b = 0; b < m; ++b) {
      if (b == a || priors_[static_cast<std::size_t>(b)] != priors_[static_cast<std::size_t>(a)])
        continue;
      if (prototypes_[static_cast<std::size_t>(a)] == negated(prototypes_[static_cast<std::size_t>(b)])) {
        flip_partner_[static_cast<std::size_t>(a)] = b;
        flip_partner_[static_cast<std::size_t>(b)] = a;
        break;
      }
    }
  }
  z2_closed_ = std::all_of(flip_partner_.begin(), flip_partner_.end(), [](int p) { return p >= 0; });
}

EmpiricalPrototypeScore::EmpiricalPrototypeScore(PrototypeSet set, VPSchedule sched)
    : set_(std::move(set)), sched_(std::move(sched)) {
  norm2_.resize(static_cast<std::size_t>(set_.size()));
  for (int m = 0; m < set_.size(); ++m)
    norm2_[static_cast<std::size_t>(m)] = dot(set_.prototype(m), set_.prototype(m));
}

LatticeField EmpiricalPrototypeScore::score(const LatticeField& x, double t) const {
  require_positive_time(t);
  if (!(x.grid == set_.grid())) throw DimensionError("state grid does not match prototypes");

  const double alpha = sched_.alpha(t);
  const double s2 = sched_.sigma2(t);
  const int m_count = set_.size();

  // Bayesian log-weights; the shared -||x||^2 term cancels in the softmax.
  std::vector<double> logit(static_cast<std::size_t>(m_count));
  for (int m = 0; m < m_count; ++m) {
    logit[static_cast<std::size_t>(m)] = std::log(set_.prior(m)) +
                                         alpha * dot(set_.prototype(m), x) / s2 -
                                         alpha * alpha * norm2_[static_cast<std::size_t>(m)] / (2.0 * s2);
  }
  const double peak = *std::max_element(logit.begin(), logit.end());
  std::vector<double> expw(static_cast<std::size_t>(m_count));
  for (int m = 0; m < m_count; ++m)
    expw[static_cast<std::size_t>(m)] = std::exp(logit[static_cast<std::size_t>(m)] - peak);

  // Pairwise accumulation over flip partners keeps the posterior mean exactly
  // odd under x -> -x for closed sets.
  double denom = 0.0;
  for (int m = 0; m < m_count; ++m) {
    const int p = set_.flip_partner(m);
    if (p > m)
      denom += expw[static_cast<std::size_t>(m)] + expw[static_cast<std::size_t>(p)];
    else if (p < 0)
      denom += expw[static_cast<std::size_t>(m)];
  }

  LatticeField mean(x.grid);
  for (int m = 0; m < m_count; ++m) {
    const int p = set_.flip_partner(m);
    if (p > m) {
      const double coeff =
          (expw[static_cast<std::size_t>(m)] - expw[static_cast<std::size_t>(p)]) / denom;
      add_scaled(mean, set_.prototype(m), coeff);
    } else if (p < 0) {
      add_scaled(mean, set_.prototype(m), expw[static_cast<std::size_t>(m)] / denom);
    }
  }

  LatticeField out(x.grid);
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] = (alpha * mean.values[i] - x.values[i]) / s2;
  return out;
}

LocalTanhScore::LocalTanhScore(int radius, VPSchedule sched)
    : radius_(radius), sched_(std::move(sched)) {
  if (radius < 0) throw ParameterError("patch radius must be nonnegative");
}

LatticeField LocalTanhScore::score(const LatticeField& x, double t) const {
  require_positive_time(t);
  if (2 * radius_ + 1 > x.grid.side()) throw DimensionError("patch larger than lattice");
  const double alpha = sched_.alpha(t);
  const double s2 = sched_.sigma2(t);
  const LatticeField box = box_sum(x, radius_);
  LatticeField out(x.grid);
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] = (alpha * std::tanh(alpha * box.values[i] / s2) - x.values[i]) / s2;
  return out;
}

PatchPosteriorScore::PatchPosteriorScore(PatchDictionary dict, VPSchedule sched,
                                         CorrelationBackend backend)
    : dict_(std::move(dict)), sched_(std::move(sched)), backend_(backend) {}

LatticeField PatchPosteriorScore::score(const LatticeField& x, double t) const {
  require_positive_time(t);
  if (x.grid.dim() != dict_.dim()) throw DimensionError("state dimension does not match dictionary");
  if (2 * dict_.radius() + 1 > x.grid.side()) throw DimensionError("patch larger than lattice");

  const double alpha = sched_.alpha(t);
  const double s2 = sched_.sigma2(t);
  const double gain = alpha / s2;
  const int m_count = dict_.size();
  const std::size_t n = x.values.size();

  // <p_k, y_i> for every center i, one periodic cross-correlation per pattern.
  std::vector<LatticeField> corr;
  corr.reserve(static_cast<std::size_t>(m_count));
  for (int k = 0; k < m_count; ++k) {
    corr.push_back(backend_ == CorrelationBackend::fft
                       ? patch_cross_correlation_fft(x, dict_.pattern(k), dict_.radius())
                       : patch_cross_correlation_direct(x, dict_.pattern(k), dict_.radius()));
  }

  LatticeField out(x.grid);
  std::vector<double> logit(static_cast<std::size_t>(m_count));
  std::vector<double> expw(static_cast<std::size_t>(m_count));
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = 0; k < m_count; ++k)
      logit[static_cast<std::size_t>(k)] =
          dict_.log_prior(k) + gain * corr[static_cast<std::size_t>(k)].values[i];
    const double peak = *std::max_element(logit.begin(), logit.end());
    for (int k = 0; k < m_count; ++k)
      expw[static_cast<std::size_t>(k)] = std::exp(logit[static_cast<std::size_t>(k)] - peak);

    double denom = 0.0;
    double mean_num = 0.0;
    for (int k = 0; k < m_count; ++k) {
      const int p = dict_.flip_partner(k);
      if (p > k) {
        denom += expw[static_cast<std::size_t>(k)] + expw[static_cast<std::size_t>(p)];
        mean_num += (expw[static_cast<std::size_t>(k)] - expw[static_cast<std::size_t>(p)]) *
                    dict_.center_value(k);
      } else if (p < 0) {
        denom += expw[static_cast<std::size_t>(k)];
        mean_num += expw[static_cast<std::size_t>(k)] * dict_.center_value(k);
      }
    }
    out.values[i] = (alpha * (mean_num / denom) - x.values[i]) / s2;
  }
  return out;
}

GuidedScore::GuidedScore(const ScoreModel& conditional, const ScoreModel& unconditional,
                         double weight)
    : cond_(&conditional), uncond_(&unconditional), weight_([weight](double) { return weight; }) {}

GuidedScore::GuidedScore(const ScoreModel& conditional, const ScoreModel& unconditional,
                         std::function<double(double)> weight_of_t)
    : cond_(&conditional), uncond_(&unconditional), weight_(std::move(weight_of_t)) {
  if (!weight_) throw ParameterError("guidance weight function required");
}

LatticeField GuidedScore::score(const LatticeField& x, double t) const {
  const double w = weight_(t);
  if (w == 0.0) return uncond_->score(x, t);
  if (w == 1.0) return cond_->score(x, t);
  LatticeField su = uncond_->score(x, t);
  LatticeField sc = cond_->score(x, t);
  if (!(su.grid == sc.grid)) throw DimensionError("guided models disagree on the grid");
  for (std::size_t i = 0; i < su.values.size(); ++i)
    su.values[i] += w * (sc.values[i] - su.values[i]);
  return su;
}

bool GuidedScore::z2_closed() const { return cond_->z2_closed() && uncond_->z2_closed(); }

LatticeField reverse_drift(const ScoreModel& model, const VPSchedule& sched, const LatticeField& x,
                           double t) {
  const double beta = sched.rate(t);
  LatticeField s = model.score(x, t);
  LatticeField out(x.grid);
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] = -0.5 * beta * x.values[i] - beta * s.values[i];
  return out;
}

DriftFn make_reverse_drift(const ScoreModel& model, const VPSchedule& sched) {
  return [&model, sched](const LatticeField& x, double t) {
    return reverse_drift(model, sched, x, t);
  };
}

DriftFn make_dispersion_drift(const ScoreModel& model, const VPSchedule& sched) {
  return [&model, sched](const LatticeField& x, double t) {
    const double beta = sched.rate(t);
    LatticeField s = model.score(x, t);
    LatticeField out(x.grid);
    for (std::size_t i = 0; i < out.values.size(); ++i)
      out.values[i] = -0.5 * beta * x.values[i] + beta * s.values[i];
    return out;
  };
}

}  // namespace softmodes
