#include "softmodes/observables.hpp"

#include <algorithm>
#include <cmath>

namespace softmodes {

namespace {

// sign with sign(0) := +1, so binarization is total.
double sign_of(double v) { return v < 0.0 ? -1.0 : 1.0; }

}  // namespace

double correlation_length_first_moment(const LatticeField& field) {
  LatticeField binary(field.grid);
  for (std::size_t i = 0; i < field.values.size(); ++i)
    binary.values[i] = sign_of(field.values[i]);
  const RadialCorrelation corr = radial_autocorrelation(binary);

  // First moment over the positive portion of C: every bin with C(r) > 0
  // (r = 0 included), anti-correlated bins dropped.
  double num = 0.0, den = 0.0;
  for (std::size_t b = 0; b < corr.values.size(); ++b) {
    if (corr.values[b] <= 0.0) continue;
    num += corr.radii[b] * corr.values[b];
    den += corr.values[b];
  }
  return num / den;  // den >= C(0) = 1
}

double correlation_length_second_moment(const LatticeField& field) {
  double mean = 0.0;
  for (double v : field.values) mean += v;
  mean /= static_cast<double>(field.values.size());

  LatticeField centered(field.grid);
  bool has_variance = false;
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    centered.values[i] = field.values[i] - mean;
    if (centered.values[i] != 0.0) has_variance = true;
  }
  if (!has_variance) throw DegenerateFieldError("field has zero variance after centering");

  const RadialCorrelation corr = radial_autocorrelation(centered);
  double num = 0.0, den = 0.0;
  for (std::size_t b = 0; b < corr.values.size(); ++b) {
    if (corr.values[b] <= 0.0) continue;
    num += corr.radii[b] * corr.radii[b] * corr.values[b];
    den += corr.values[b];
  }
  return std::sqrt(num / den);
}

ObservableSeries gaussian_smooth(const ObservableSeries& series, double width) {
  if (width < 0.0) throw ParameterError("smoothing width must be nonnegative");
  ObservableSeries out = series;
  out.smoothing_width = width;
  if (width == 0.0 || series.values.size() < 2) return out;

  const long n = static_cast<long>(series.values.size());
  const long reach = static_cast<long>(std::ceil(4.0 * width));
  std::vector<double> kernel(static_cast<std::size_t>(2 * reach + 1));
  for (long d = -reach; d <= reach; ++d)
    kernel[static_cast<std::size_t>(d + reach)] =
        std::exp(-0.5 * (static_cast<double>(d) / width) * (static_cast<double>(d) / width));

  for (long i = 0; i < n; ++i) {
    double acc = 0.0, norm = 0.0;
    for (long d = -reach; d <= reach; ++d) {
      const long j = i + d;
      if (j < 0 || j >= n) continue;
      const double w = kernel[static_cast<std::size_t>(d + reach)];
      acc += w * series.values[static_cast<std::size_t>(j)];
      norm += w;
    }
    out.values[static_cast<std::size_t>(i)] = acc / norm;
  }
  return out;
}

ObservableSeries log_derivative(const ObservableSeries& series) {
  const std::size_t n = series.values.size();
  if (n < 3) throw ParameterError("log derivative needs at least 3 points");
  ObservableSeries out = series;
  out.label = series.label.empty() ? "dlog" : "d(" + series.label + ")/dlogt";

  std::vector<double> logt(n);
  for (std::size_t i = 0; i < n; ++i) logt[i] = std::log(series.times[i]);

  out.values[0] = (series.values[1] - series.values[0]) / (logt[1] - logt[0]);
  for (std::size_t i = 1; i + 1 < n; ++i)
    out.values[i] = (series.values[i + 1] - series.values[i - 1]) / (logt[i + 1] - logt[i - 1]);
  out.values[n - 1] = (series.values[n - 1] - series.values[n - 2]) / (logt[n - 1] - logt[n - 2]);
  return out;
}

double alignment_overlap(const LatticeField& field, const LatticeField& target) {
  if (!(field.grid == target.grid)) throw DimensionError("field and target grids differ");
  for (double v : target.values)
    if (v != 1.0 && v != -1.0) throw ParameterError("target entries must be +-1");
  double acc = 0.0;
  for (std::size_t i = 0; i < field.values.size(); ++i)
    acc += sign_of(field.values[i]) * target.values[i];
  return acc / static_cast<double>(field.values.size());
}

}  // namespace softmodes
