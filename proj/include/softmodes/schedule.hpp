#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "softmodes/errors.hpp"

namespace softmodes {

/// Variance-preserving noise schedule.
///
/// alpha(t) = exp(-B(t)/2) and sigma2(t) = 1 - exp(-B(t)) with B(t) the
/// cumulative noise rate. The constant-rate constructor uses B(t) = beta*t;
/// the general constructor takes user-supplied rate and cumulative functions.
class VPSchedule {
 public:
  explicit VPSchedule(double beta) : beta_(beta), constant_(true) {
    if (!(beta > 0.0)) throw ParameterError("noise rate beta must be positive");
  }

  VPSchedule(std::function<double(double)> rate, std::function<double(double)> cumulative)
      : beta_(0.0), constant_(false), rate_(std::move(rate)), cumulative_(std::move(cumulative)) {
    if (!rate_ || !cumulative_) throw ParameterError("rate and cumulative functions required");
  }

  double cumulative(double t) const { return constant_ ? beta_ * t : cumulative_(t); }
  double rate(double t) const { return constant_ ? beta_ : rate_(t); }

  double alpha(double t) const { return std::exp(-0.5 * cumulative(t)); }
  double sigma2(double t) const { return -std::expm1(-cumulative(t)); }
  double sigma(double t) const { return std::sqrt(sigma2(t)); }

  bool constant_rate() const noexcept { return constant_; }
  double beta() const noexcept { return beta_; }

 private:
  double beta_;
  bool constant_;
  std::function<double(double)> rate_;
  std::function<double(double)> cumulative_;
};

/// Geometric time grid from t_max down to t_min, both endpoints included
/// (steps + 1 times), so successive ratios are constant.
class LogTimeGrid {
 public:
  LogTimeGrid(double t_max, double t_min, int steps) : t_max_(t_max), t_min_(t_min), steps_(steps) {
    if (!(t_max > t_min) || !(t_min > 0.0)) throw ParameterError("need t_max > t_min > 0");
    if (steps < 1) throw ParameterError("need steps >= 1");
    times_.resize(static_cast<std::size_t>(steps) + 1);
    const double log_max = std::log(t_max);
    const double log_min = std::log(t_min);
    for (int k = 0; k <= steps; ++k) {
      times_[static_cast<std::size_t>(k)] =
          std::exp(log_max + (static_cast<double>(k) / steps) * (log_min - log_max));
    }
    times_.front() = t_max;
    times_.back() = t_min;
  }

  const std::vector<double>& times() const noexcept { return times_; }
  double t_max() const noexcept { return t_max_; }
  double t_min() const noexcept { return t_min_; }
  int steps() const noexcept { return steps_; }

 private:
  double t_max_, t_min_;
  int steps_;
  std::vector<double> times_;
};

}  // namespace softmodes
