#include "softmodes/spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace softmodes {

double directional_derivative(const DriftFn& drift, const LatticeField& x, double t,
                              const FourierProbe& probe, const VPSchedule& sched,
                              double eps_floor) {
  const LatticeField& v = probe.values;
  if (!(v.grid == x.grid)) throw DimensionError("probe grid does not match state");
  if (std::abs(dot(v, v) - 1.0) > 1e-9) throw ParameterError("probe must have unit norm");

  const double eps = std::max(eps_floor, 1e-3 * sched.sigma2(t));
  LatticeField plus = x;
  add_scaled(plus, v, eps);
  LatticeField minus = x;
  add_scaled(minus, v, -eps);

  const LatticeField b_plus = drift(plus, t);
  const LatticeField b_minus = drift(minus, t);
  if (!all_finite(b_plus) || !all_finite(b_minus))
    throw DivergenceError("drift produced a non-finite value during probing", -1);

  double acc = 0.0;
  for (std::size_t i = 0; i < v.values.size(); ++i)
    acc += v.values[i] * (b_plus.values[i] - b_minus.values[i]);
  return acc / (2.0 * eps);
}

DispersionSpectrum shell_spectrum(const DriftFn& drift, const std::vector<double>& times,
                                  const std::vector<LatticeField>& states, const VPSchedule& sched,
                                  int n_max, const std::vector<ProbeDirection>& directions,
                                  double eps_floor) {
  if (times.size() != states.size()) throw DimensionError("one state per time required");
  if (states.empty()) throw ParameterError("empty trajectory");
  const LatticeGrid grid = states.front().grid;
  if (2 * n_max > grid.side()) throw AliasingError("n_max beyond Nyquist index L/2");
  if (directions.empty()) throw ParameterError("at least one probe direction required");

  std::vector<std::vector<FourierProbe>> probes(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n)
    for (ProbeDirection dir : directions)
      probes[static_cast<std::size_t>(n)].push_back(make_fourier_probe(grid, n, dir));

  DispersionSpectrum spec;
  spec.times = times;
  spec.n_max = n_max;
  spec.k_min = 2.0 * std::numbers::pi / grid.side();
  spec.lambda.assign(static_cast<std::size_t>(n_max) + 1,
                     std::vector<double>(times.size(), 0.0));
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    for (int n = 0; n <= n_max; ++n) {
      double acc = 0.0;
      for (const FourierProbe& p : probes[static_cast<std::size_t>(n)])
        acc += directional_derivative(drift, states[ti], times[ti], p, sched, eps_floor);
      spec.lambda[static_cast<std::size_t>(n)][ti] =
          acc / static_cast<double>(probes[static_cast<std::size_t>(n)].size());
    }
  }
  return spec;
}

double convolution_symbol(int radius, int dimension, std::array<double, 2> k) {
  double product = 1.0;
  for (int mu = 0; mu < dimension; ++mu) {
    const double half_sin = std::sin(0.5 * k[static_cast<std::size_t>(mu)]);
    if (half_sin == 0.0) {
      product *= 2.0 * radius + 1.0;
    } else {
      product *= std::sin((radius + 0.5) * k[static_cast<std::size_t>(mu)]) / half_sin;
    }
  }
  return product;
}

double convolution_symbol_sum(int radius, int dimension, std::array<double, 2> k) {
  double sum = 0.0;
  if (dimension == 1) {
    for (int u = -radius; u <= radius; ++u) sum += std::cos(k[0] * u);
  } else {
    for (int ux = -radius; ux <= radius; ++ux)
      for (int uy = -radius; uy <= radius; ++uy) sum += std::cos(k[0] * ux + k[1] * uy);
  }
  return sum;
}

double analytic_dispersion(int radius, int dimension, const VPSchedule& sched,
                           std::array<double, 2> k, double t) {
  const double s2 = sched.sigma2(t);
  const double alpha = sched.alpha(t);
  return -(0.5 + 1.0 / s2) + alpha * alpha / (s2 * s2) * convolution_symbol(radius, dimension, k);
}

std::vector<double> dense_jacobian_oracle(int radius, int dimension, const VPSchedule& sched,
                                          const LatticeGrid& grid, double t) {
  if (grid.dim() != dimension) throw DimensionError("grid dimension mismatch");
  if (2 * radius + 1 > grid.side()) throw DimensionError("patch larger than lattice");
  const long n = grid.sites();
  if (n > 4096) throw SizeError("dense Jacobian limited to 4096 sites");

  const double s2 = sched.sigma2(t);
  const double alpha = sched.alpha(t);
  const double diag = -(0.5 + 1.0 / s2);
  const double hop = alpha * alpha / (s2 * s2);
  const int L = grid.side();

  auto in_window = [&](int d) {
    d %= L;
    if (d < 0) d += L;
    if (d > L / 2) d -= L;
    return std::abs(d) <= radius;
  };

  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (long a = 0; a < n; ++a) {
    for (long b = 0; b < n; ++b) {
      bool member;
      if (dimension == 1) {
        member = in_window(static_cast<int>(b - a));
      } else {
        const int ai = static_cast<int>(a / L), aj = static_cast<int>(a % L);
        const int bi = static_cast<int>(b / L), bj = static_cast<int>(b % L);
        member = in_window(bi - ai) && in_window(bj - aj);
      }
      if (member) jac(a, b) += hop;
    }
    jac(a, a) += diag;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jac, Eigen::EigenvaluesOnly);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = solver.eigenvalues()[i];
  std::sort(out.begin(), out.end());
  return out;
}

double fit_xi_eq(const DispersionSpectrum& spectrum, std::size_t t_index,
                 const std::vector<int>& shells) {
  if (t_index >= spectrum.times.size()) throw ParameterError("time index out of range");
  if (shells.empty()) throw ParameterError("at least one shell required for the fit");
  const double lambda0 = spectrum.lambda[0][t_index];
  if (std::abs(lambda0) < 1e-12)
    throw EstimationError("degenerate normalization: lambda_0 within 1e-12 of zero");

  double num = 0.0, den = 0.0;
  for (int n : shells) {
    if (n < 1 || n > spectrum.n_max) throw ParameterError("fit shell out of range");
    const double x = (n * spectrum.k_min) * (n * spectrum.k_min);
    const double y = spectrum.lambda[static_cast<std::size_t>(n)][t_index] / lambda0 - 1.0;
    num += y * x;
    den += x * x;
  }
  const double xi2 = num / den;
  return xi2 > 0.0 ? std::sqrt(xi2) : 0.0;
}

void fill_xi_eq(DispersionSpectrum& spectrum, const std::vector<int>& shells) {
  spectrum.xi_eq.assign(spectrum.times.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t ti = 0; ti < spectrum.times.size(); ++ti) {
    try {
      spectrum.xi_eq[ti] = fit_xi_eq(spectrum, ti, shells);
    } catch (const EstimationError&) {
      // skipped time point, stays NaN
    }
  }
}

double estimate_critical_scale(const std::vector<DispersionSpectrum>& ensemble) {
  if (ensemble.empty()) throw ParameterError("at least one trajectory spectrum required");
  const std::vector<double>& times = ensemble.front().times;
  for (const auto& spec : ensemble) {
    if (spec.times != times) throw DimensionError("trajectory spectra disagree on the time grid");
    if (spec.xi_eq.size() != times.size())
      throw ParameterError("xi_eq not filled; call fill_xi_eq first");
  }

  double best_t = 0.0, best_median = -1.0;
  bool found = false;
  std::vector<double> sample;
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    sample.clear();
    for (const auto& spec : ensemble)
      if (std::isfinite(spec.xi_eq[ti])) sample.push_back(spec.xi_eq[ti]);
    if (sample.empty()) continue;
    std::sort(sample.begin(), sample.end());
    const std::size_t h = sample.size() / 2;
    const double median =
        sample.size() % 2 == 1 ? sample[h] : 0.5 * (sample[h - 1] + sample[h]);
    if (!found || median > best_median) {
      found = true;
      best_median = median;
      best_t = times[ti];
    }
  }
  if (!found) throw EstimationError("all spectra degenerate; no critical scale");
  return best_t;
}

SoftModeReport classify_dispersion_maxima(
    const std::function<double(std::array<double, 2>)>& lambda_of_k, int dimension,
    const LatticeGrid& resolution, double t) {
  const int L = resolution.side();
  const double k_unit = 2.0 * std::numbers::pi / L;

  struct Entry {
    int mi, mj;
    double value;
  };
  std::vector<Entry> zone;
  if (dimension == 1) {
    for (int m = 0; m < L; ++m) zone.push_back({m, 0, lambda_of_k({k_unit * m, 0.0})});
  } else {
    for (int mi = 0; mi < L; ++mi)
      for (int mj = 0; mj < L; ++mj)
        zone.push_back({mi, mj, lambda_of_k({k_unit * mi, k_unit * mj})});
  }

  double peak = -std::numeric_limits<double>::infinity();
  for (const Entry& e : zone) peak = std::max(peak, e.value);

  SoftModeReport report;
  report.t = t;
  report.max_lambda = peak;
  bool zero_in_set = false;
  for (const Entry& e : zone) {
    if (std::abs(e.value - peak) <= 1e-9) {
      report.maximizers.push_back({k_unit * e.mi, k_unit * e.mj});
      if (e.mi == 0 && e.mj == 0) zero_in_set = true;
    }
  }
  report.flat = report.maximizers.size() == zone.size();
  if (report.maximizers.size() == 1)
    report.classification =
        zero_in_set ? SoftModeClass::uniform_k0 : SoftModeClass::single_nonzero_k;
  else
    report.classification = SoftModeClass::multiple_maxima;
  return report;
}

SoftModeReport soft_mode_set(int radius, int dimension, const VPSchedule& sched, double t,
                             const LatticeGrid& resolution) {
  if (!(t > 0.0)) throw SingularNoiseError("soft-mode scan requires t > 0");
  return classify_dispersion_maxima(
      [&](std::array<double, 2> k) { return analytic_dispersion(radius, dimension, sched, k, t); },
      dimension, resolution, t);
}

}  // namespace softmodes
