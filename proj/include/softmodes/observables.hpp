#pragma once

#include <string>
#include <vector>

#include "softmodes/lattice.hpp"

namespace softmodes {

/// A scalar observable sampled along a (log-uniform) time grid.
struct ObservableSeries {
  std::vector<double> times;
  std::vector<double> values;
  std::string label;
  double smoothing_width = 0.0;  // in grid indices; 0 = raw
};

/// First-moment correlation length of the sign-binarized field:
/// xi = sum_r r C(r) / sum_r C(r) over the leading positive run of the
/// radial autocorrelation (sign(0) := +1).
double correlation_length_first_moment(const LatticeField& field);

/// Second-moment estimator on the mean-subtracted continuous field:
/// xi = sqrt(sum_r r^2 C(r) / sum_r C(r)), same positive-portion truncation.
double correlation_length_second_moment(const LatticeField& field);

/// Discrete Gaussian smoothing over the index axis, kernel truncated at four
/// widths and renormalized at the boundaries.
ObservableSeries gaussian_smooth(const ObservableSeries& series, double width);

/// Central differences in log t (one-sided at the endpoints).
ObservableSeries log_derivative(const ObservableSeries& series);

/// Mean sign agreement (1/N) sum_i sign(x_i) * target_i, in [-1, 1].
double alignment_overlap(const LatticeField& field, const LatticeField& target);

}  // namespace softmodes
