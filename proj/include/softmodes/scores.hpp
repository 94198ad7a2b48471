#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "softmodes/lattice.hpp"
#include "softmodes/schedule.hpp"

namespace softmodes {

/// Dictionary of +-1 patches with prior weights. Patterns are stored in patch
/// order (lexicographic by offset); sign-flipped partners are tracked so that
/// posterior sums can be accumulated pairwise, which keeps the score odd under
/// x -> -x to the last bit for closed dictionaries.
class PatchDictionary {
 public:
  PatchDictionary(int radius, int dimension, std::vector<std::vector<double>> patterns,
                  std::vector<double> priors);

  int radius() const noexcept { return radius_; }
  int dim() const noexcept { return dim_; }
  int size() const noexcept { return static_cast<int>(patterns_.size()); }
  long patch_len() const noexcept { return static_cast<long>(patterns_.front().size()); }

  const std::vector<double>& pattern(int k) const { return patterns_[static_cast<std::size_t>(k)]; }
  double prior(int k) const { return priors_[static_cast<std::size_t>(k)]; }
  double log_prior(int k) const { return log_priors_[static_cast<std::size_t>(k)]; }
  double center_value(int k) const {
    return patterns_[static_cast<std::size_t>(k)][static_cast<std::size_t>(patch_len() / 2)];
  }

  bool z2_closed() const noexcept { return z2_closed_; }
  /// Index of the sign-flipped partner, or -1 when none exists.
  int flip_partner(int k) const { return flip_partner_[static_cast<std::size_t>(k)]; }

  /// Single-pattern dictionary with prior 1 (used for conditioning).
  PatchDictionary restricted_to(int k) const;

 private:
  int radius_, dim_;
  std::vector<std::vector<double>> patterns_;
  std::vector<double> priors_;
  std::vector<double> log_priors_;
  std::vector<int> flip_partner_;
  bool z2_closed_;
};

enum class DictionaryVariant { ten, eighteen };

/// Patch dictionary of the reference experiment: random +-1 patterns plus the
/// two uniform patterns carrying most of the prior mass. The `ten` variant
/// lists eight random patterns closed under sign flip by construction; the
/// `eighteen` variant lists eight independent draws and their flips.
PatchDictionary make_patch_dictionary(int radius, int dimension, std::uint64_t seed,
                                      DictionaryVariant variant = DictionaryVariant::ten,
                                      double random_prior_total = 0.1);

std::string dictionary_to_text(const PatchDictionary& dict);
PatchDictionary dictionary_from_text(const std::string& text);

/// Set of real prototype fields with priors, for the empirical Bayes score.
class PrototypeSet {
 public:
  PrototypeSet(std::vector<LatticeField> prototypes, std::vector<double> priors,
               bool require_centered = false);

  int size() const noexcept { return static_cast<int>(prototypes_.size()); }
  const LatticeField& prototype(int m) const { return prototypes_[static_cast<std::size_t>(m)]; }
  double prior(int m) const { return priors_[static_cast<std::size_t>(m)]; }
  const LatticeGrid& grid() const noexcept { return prototypes_.front().grid; }

  bool z2_closed() const noexcept { return z2_closed_; }
  int flip_partner(int m) const { return flip_partner_[static_cast<std::size_t>(m)]; }

 private:
  std::vector<LatticeField> prototypes_;
  std::vector<double> priors_;
  std::vector<int> flip_partner_;
  bool z2_closed_;
};

/// Analytic score model contract: s(x, t) with t > 0.
class ScoreModel {
 public:
  virtual ~ScoreModel() = default;
  virtual LatticeField score(const LatticeField& x, double t) const = 0;
  virtual bool z2_closed() const = 0;
};

/// Exact Bayesian score of a Gaussian mixture around scaled prototypes.
class EmpiricalPrototypeScore : public ScoreModel {
 public:
  EmpiricalPrototypeScore(PrototypeSet set, VPSchedule sched);
  LatticeField score(const LatticeField& x, double t) const override;
  bool z2_closed() const override { return set_.z2_closed(); }
  const PrototypeSet& prototype_set() const noexcept { return set_; }

 private:
  PrototypeSet set_;
  VPSchedule sched_;
  std::vector<double> norm2_;  // ||mu_m||^2
};

/// Local score-matching solution for the +-1 uniform dataset restricted to a
/// (2K+1)^d receptive field: s_i = [alpha*tanh(alpha*S_i/sigma^2) - x_i]/sigma^2.
class LocalTanhScore : public ScoreModel {
 public:
  LocalTanhScore(int radius, VPSchedule sched);
  LatticeField score(const LatticeField& x, double t) const override;
  bool z2_closed() const override { return true; }
  int radius() const noexcept { return radius_; }

 private:
  int radius_;
  VPSchedule sched_;
};

enum class CorrelationBackend { direct, fft };

/// Exact per-site posterior score of the patch dictionary model.
class PatchPosteriorScore : public ScoreModel {
 public:
  PatchPosteriorScore(PatchDictionary dict, VPSchedule sched,
                      CorrelationBackend backend = CorrelationBackend::direct);
  LatticeField score(const LatticeField& x, double t) const override;
  bool z2_closed() const override { return dict_.z2_closed(); }
  const PatchDictionary& dictionary() const noexcept { return dict_; }
  CorrelationBackend backend() const noexcept { return backend_; }

 private:
  PatchDictionary dict_;
  VPSchedule sched_;
  CorrelationBackend backend_;
};

/// Classifier-free combination s_u + w(t) * (s_c - s_u).
class GuidedScore : public ScoreModel {
 public:
  GuidedScore(const ScoreModel& conditional, const ScoreModel& unconditional, double weight);
  GuidedScore(const ScoreModel& conditional, const ScoreModel& unconditional,
              std::function<double(double)> weight_of_t);
  LatticeField score(const LatticeField& x, double t) const override;
  bool z2_closed() const override;

 private:
  const ScoreModel* cond_;
  const ScoreModel* uncond_;
  std::function<double(double)> weight_;
};

/// Reverse-SDE drift b(x, t) = -(beta/2) x - beta * s(x, t).
LatticeField reverse_drift(const ScoreModel& model, const VPSchedule& sched, const LatticeField& x,
                           double t);

using DriftFn = std::function<LatticeField(const LatticeField&, double)>;

DriftFn make_reverse_drift(const ScoreModel& model, const VPSchedule& sched);

/// Drift -(beta/2) x + beta * s(x, t), the linearization target of the
/// analytic dispersion: its Jacobian at x = 0 is the convolution operator
/// -(1/2 + 1/sigma^2) I + (alpha^2/sigma^4) 1_Omega (for beta = 1).
DriftFn make_dispersion_drift(const ScoreModel& model, const VPSchedule& sched);

}  // namespace softmodes
