#pragma once

#include <vector>

#include "softmodes/lattice.hpp"

namespace softmodes {

/// Unnormalized circular autocorrelation c(delta) = sum_i x_i * x_{i+delta},
/// computed through the power spectrum. Output is indexed like a field
/// (row-major displacement).
std::vector<double> periodic_autocorrelation(const LatticeField& x);

/// Periodic cross-correlation with a centered (2K+1)^d kernel given in patch
/// order: out_i = sum_{u in Omega} kernel[u] * x_{i+u}. FFT-backed.
LatticeField patch_cross_correlation_fft(const LatticeField& x, const std::vector<double>& kernel,
                                         int radius);

/// Same contract as the FFT variant, evaluated with explicit loops.
LatticeField patch_cross_correlation_direct(const LatticeField& x, const std::vector<double>& kernel,
                                            int radius);

/// Box sum S_i = sum_{u in Omega} x_{i+u} over the full (2K+1)^d neighborhood,
/// computed separably per axis.
LatticeField box_sum(const LatticeField& x, int radius);

}  // namespace softmodes
