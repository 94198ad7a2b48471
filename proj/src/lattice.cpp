#include "softmodes/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "softmodes/fft.hpp"

namespace softmodes {

LatticeField& add_scaled(LatticeField& y, const LatticeField& x, double a) {
  if (!(y.grid == x.grid)) throw DimensionError("fields live on different grids");
  for (std::size_t n = 0; n < y.values.size(); ++n) y.values[n] += a * x.values[n];
  return y;
}

LatticeField& scale(LatticeField& y, double a) {
  for (double& v : y.values) v *= a;
  return y;
}

LatticeField negated(const LatticeField& x) {
  LatticeField out = x;
  for (double& v : out.values) v = -v;
  return out;
}

double max_abs(const LatticeField& x) {
  double m = 0.0;
  for (double v : x.values) m = std::max(m, std::abs(v));
  return m;
}

double inf_norm_diff(const LatticeField& a, const LatticeField& b) {
  if (!(a.grid == b.grid)) throw DimensionError("fields live on different grids");
  double m = 0.0;
  for (std::size_t n = 0; n < a.values.size(); ++n)
    m = std::max(m, std::abs(a.values[n] - b.values[n]));
  return m;
}

bool all_finite(const LatticeField& x) {
  for (double v : x.values)
    if (!std::isfinite(v)) return false;
  return true;
}

double dot(const LatticeField& a, const LatticeField& b) {
  if (!(a.grid == b.grid)) throw DimensionError("fields live on different grids");
  double s = 0.0;
  for (std::size_t n = 0; n < a.values.size(); ++n) s += a.values[n] * b.values[n];
  return s;
}

LatticeField translated(const LatticeField& x, int di, int dj) {
  LatticeField out(x.grid);
  const int L = x.grid.side();
  if (x.grid.dim() == 1) {
    for (int i = 0; i < L; ++i) out.at(i) = x.at(i - di);
  } else {
    for (int i = 0; i < L; ++i)
      for (int j = 0; j < L; ++j) out.at(i, j) = x.at(i - di, j - dj);
  }
  return out;
}

FourierProbe make_fourier_probe(const LatticeGrid& grid, int shell, ProbeDirection direction) {
  if (shell < 0) throw ParameterError("probe shell must be nonnegative");
  if (2 * shell > grid.side()) throw AliasingError("probe shell beyond Nyquist index L/2");
  if (grid.dim() == 1 && direction == ProbeDirection::axis1)
    throw DimensionError("axis-1 probe on a 1-d lattice");

  const double k = 2.0 * std::numbers::pi * shell / grid.side();
  LatticeField v(grid);
  const int L = grid.side();
  if (grid.dim() == 1) {
    for (int i = 0; i < L; ++i) v.at(i) = std::cos(k * i);
  } else {
    for (int i = 0; i < L; ++i) {
      for (int j = 0; j < L; ++j) {
        const int c = direction == ProbeDirection::axis0   ? i
                      : direction == ProbeDirection::axis1 ? j
                                                           : i + j;
        v.at(i, j) = std::cos(k * c);
      }
    }
  }
  const double norm = std::sqrt(dot(v, v));
  scale(v, 1.0 / norm);
  return FourierProbe{shell, direction, std::move(v)};
}

namespace {

int min_image(int d, int L) {
  d %= L;
  if (d < 0) d += L;
  return d > L / 2 ? d - L : d;
}

}  // namespace

RadialCorrelation radial_autocorrelation(const LatticeField& field, double max_radius) {
  bool nonzero = false;
  for (double v : field.values)
    if (v != 0.0) nonzero = true;
  if (!nonzero) throw DegenerateFieldError("autocorrelation of an identically zero field");

  const int L = field.grid.side();
  const double r_cut = max_radius < 0.0 ? L / 2.0 : max_radius;

  std::vector<double> c = periodic_autocorrelation(field);
  const double n_sites = static_cast<double>(field.size());
  for (double& v : c) v /= n_sites;

  // Accumulate displacements into nearest-integer distance bins.
  std::map<int, std::pair<double, long>> bins;  // bin -> (sum, count)
  auto deposit = [&](double dist, double value) {
    const int bin = static_cast<int>(std::lround(dist));
    if (bin > r_cut) return;
    auto& [sum, count] = bins[bin];
    sum += value;
    ++count;
  };
  if (field.grid.dim() == 1) {
    for (int di = 0; di < L; ++di)
      deposit(std::abs(min_image(di, L)), c[static_cast<std::size_t>(di)]);
  } else {
    for (int di = 0; di < L; ++di) {
      for (int dj = 0; dj < L; ++dj) {
        const double dist = std::hypot(min_image(di, L), min_image(dj, L));
        deposit(dist, c[static_cast<std::size_t>(di) * L + dj]);
      }
    }
  }

  const double c0 = bins.at(0).first / bins.at(0).second;
  if (c0 == 0.0) throw DegenerateFieldError("zero-lag correlation vanished");

  RadialCorrelation out;
  for (const auto& [bin, acc] : bins) {
    out.radii.push_back(static_cast<double>(bin));
    out.values.push_back(acc.first / acc.second / c0);
  }
  return out;
}

std::vector<double> extract_patch(const LatticeField& field, long center_site, int radius) {
  if (radius < 0) throw ParameterError("patch radius must be nonnegative");
  if (2 * radius + 1 > field.grid.side()) throw DimensionError("patch larger than lattice");
  const int L = field.grid.side();
  const int K = radius;
  std::vector<double> out;
  if (field.grid.dim() == 1) {
    const int ci = static_cast<int>(center_site);
    out.reserve(static_cast<std::size_t>(2 * K + 1));
    for (int u = -K; u <= K; ++u) out.push_back(field.at(ci + u));
  } else {
    const int ci = static_cast<int>(center_site / L);
    const int cj = static_cast<int>(center_site % L);
    out.reserve(static_cast<std::size_t>(2 * K + 1) * (2 * K + 1));
    for (int ui = -K; ui <= K; ++ui)
      for (int uj = -K; uj <= K; ++uj) out.push_back(field.at(ci + ui, cj + uj));
  }
  return out;
}

}  // namespace softmodes
