#pragma once

#include <cmath>
#include <map>
#include <vector>

#include "softmodes/lattice.hpp"
#include "softmodes/rng.hpp"
#include "softmodes/schedule.hpp"
#include "softmodes/scores.hpp"

namespace testutil {

inline softmodes::LatticeField random_field(const softmodes::LatticeGrid& grid, std::uint64_t seed,
                                            double amplitude = 1.0) {
  softmodes::LatticeField x(grid);
  softmodes::GaussianRng rng(seed);
  for (double& v : x.values) v = amplitude * rng.next();
  return x;
}

inline softmodes::LatticeField random_sign_field(const softmodes::LatticeGrid& grid,
                                                 std::uint64_t seed) {
  softmodes::LatticeField x(grid);
  softmodes::GaussianRng rng(seed);
  for (double& v : x.values) v = (rng.next_raw() & 1u) ? 1.0 : -1.0;
  return x;
}

// O(N^2) pair-sum radial autocorrelation, fully independent of the FFT path:
// correlations accumulated displacement by displacement with explicit loops,
// binned by nearest integer of the min-image distance, C(0)-normalized.
inline softmodes::RadialCorrelation brute_force_radial(const softmodes::LatticeField& x,
                                                       double max_radius = -1.0) {
  const int L = x.grid.side();
  const double r_cut = max_radius < 0.0 ? L / 2.0 : max_radius;
  auto min_image = [L](int d) {
    d %= L;
    if (d < 0) d += L;
    return d > L / 2 ? d - L : d;
  };

  std::map<int, std::pair<double, long>> bins;
  const double n_sites = static_cast<double>(x.size());
  if (x.grid.dim() == 1) {
    for (int di = 0; di < L; ++di) {
      double c = 0.0;
      for (int i = 0; i < L; ++i) c += x.at(i) * x.at(i + di);
      const int bin = static_cast<int>(std::lround(std::abs(min_image(di))));
      if (bin > r_cut) continue;
      bins[bin].first += c / n_sites;
      bins[bin].second += 1;
    }
  } else {
    for (int di = 0; di < L; ++di) {
      for (int dj = 0; dj < L; ++dj) {
        double c = 0.0;
        for (int i = 0; i < L; ++i)
          for (int j = 0; j < L; ++j) c += x.at(i, j) * x.at(i + di, j + dj);
        const int bin =
            static_cast<int>(std::lround(std::hypot(min_image(di), min_image(dj))));
        if (bin > r_cut) continue;
        bins[bin].first += c / n_sites;
        bins[bin].second += 1;
      }
    }
  }
  const double c0 = bins.at(0).first / bins.at(0).second;
  softmodes::RadialCorrelation out;
  for (const auto& [bin, acc] : bins) {
    out.radii.push_back(static_cast<double>(bin));
    out.values.push_back(acc.first / acc.second / c0);
  }
  return out;
}

// Direct per-site posterior score with explicitly looped neighborhood sums and
// the full Bayesian exponent including the -alpha^2 ||p||^2 / (2 sigma^2) term
// that the production path drops as constant for +-1 patterns.
inline softmodes::LatticeField direct_posterior_score(const softmodes::PatchDictionary& dict,
                                                      const softmodes::VPSchedule& sched,
                                                      const softmodes::LatticeField& x, double t) {
  const double alpha = sched.alpha(t);
  const double s2 = sched.sigma2(t);
  softmodes::LatticeField out(x.grid);
  const long n = x.size();
  for (long site = 0; site < n; ++site) {
    const std::vector<double> y = softmodes::extract_patch(x, site, dict.radius());
    double peak = -1e300;
    std::vector<double> logits(static_cast<std::size_t>(dict.size()));
    for (int k = 0; k < dict.size(); ++k) {
      double ip = 0.0, norm2 = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) {
        ip += dict.pattern(k)[i] * y[i];
        norm2 += dict.pattern(k)[i] * dict.pattern(k)[i];
      }
      logits[static_cast<std::size_t>(k)] =
          std::log(dict.prior(k)) + alpha * ip / s2 - alpha * alpha * norm2 / (2.0 * s2);
      peak = std::max(peak, logits[static_cast<std::size_t>(k)]);
    }
    double denom = 0.0, mean = 0.0;
    for (int k = 0; k < dict.size(); ++k) {
      const double w = std::exp(logits[static_cast<std::size_t>(k)] - peak);
      denom += w;
      mean += w * dict.center_value(k);
    }
    out.values[static_cast<std::size_t>(site)] =
        (alpha * mean / denom - x.values[static_cast<std::size_t>(site)]) / s2;
  }
  return out;
}

}  // namespace testutil
