#pragma once

#include <array>
#include <functional>
#include <vector>

#include "softmodes/lattice.hpp"
#include "softmodes/schedule.hpp"
#include "softmodes/scores.hpp"

namespace softmodes {

/// Directional derivatives along Fourier shells, per recorded time.
struct DispersionSpectrum {
  std::vector<double> times;
  std::vector<std::vector<double>> lambda;  // [shell][time index]
  std::vector<double> xi_eq;                // NaN where the fit is degenerate
  double k_min = 0.0;                       // 2*pi / L
  int n_max = 0;
};

/// Symmetric finite-difference Rayleigh quotient v^T [b(x+eps v) - b(x-eps v)] / (2 eps)
/// with the adaptive step eps = max(eps_floor, 1e-3 * sigma^2(t)).
double directional_derivative(const DriftFn& drift, const LatticeField& x, double t,
                              const FourierProbe& probe, const VPSchedule& sched,
                              double eps_floor = 5e-5);

/// Shell-resolved spectrum along a recorded trajectory; derivatives are
/// averaged over the probe directions per shell.
DispersionSpectrum shell_spectrum(const DriftFn& drift, const std::vector<double>& times,
                                  const std::vector<LatticeField>& states, const VPSchedule& sched,
                                  int n_max,
                                  const std::vector<ProbeDirection>& directions =
                                      {ProbeDirection::axis0, ProbeDirection::axis1},
                                  double eps_floor = 5e-5);

/// Fourier symbol of the hypercubic indicator kernel, product form
/// prod_mu sin((K+1/2) k_mu) / sin(k_mu / 2), with the k_mu -> 0 limit 2K+1.
double convolution_symbol(int radius, int dimension, std::array<double, 2> k);

/// Same symbol as the explicit finite sum over the receptive field.
double convolution_symbol_sum(int radius, int dimension, std::array<double, 2> k);

/// Dispersion of the linearized dynamics at the symmetric state (unit noise
/// rate): lambda(k, t) = -(1/2 + 1/sigma^2) + alpha^2/sigma^4 * symbol(k).
double analytic_dispersion(int radius, int dimension, const VPSchedule& sched,
                           std::array<double, 2> k, double t);

/// Explicit N x N convolution operator built entry by entry and eigensolved;
/// the independent check of the analytic dispersion. N <= 4096.
std::vector<double> dense_jacobian_oracle(int radius, int dimension, const VPSchedule& sched,
                                          const LatticeGrid& grid, double t);

/// Least-squares fit through the origin of lambda_n/lambda_0 - 1 against
/// (n k_min)^2 over the given shells; negative slopes clamp to xi = 0.
double fit_xi_eq(const DispersionSpectrum& spectrum, std::size_t t_index,
                 const std::vector<int>& shells = {1, 2, 3});

/// Fills spectrum.xi_eq for every time, NaN where the fit is degenerate.
void fill_xi_eq(DispersionSpectrum& spectrum, const std::vector<int>& shells = {1, 2, 3});

/// argmax over grid times of the across-trajectory median xi_eq.
double estimate_critical_scale(const std::vector<DispersionSpectrum>& ensemble);

enum class SoftModeClass { uniform_k0, single_nonzero_k, multiple_maxima };

struct SoftModeReport {
  double t = 0.0;
  std::vector<std::array<double, 2>> maximizers;
  SoftModeClass classification = SoftModeClass::uniform_k0;
  double max_lambda = 0.0;
  bool flat = false;  // the whole zone maximizes (dispersion is constant)
};

/// Scans a dispersion function over the discrete Brillouin zone of the given
/// grid and classifies the maximizer set.
SoftModeReport classify_dispersion_maxima(
    const std::function<double(std::array<double, 2>)>& lambda_of_k, int dimension,
    const LatticeGrid& resolution, double t);

SoftModeReport soft_mode_set(int radius, int dimension, const VPSchedule& sched, double t,
                             const LatticeGrid& resolution);

}  // namespace softmodes
