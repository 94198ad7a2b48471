#pragma once

#include <cmath>
#include <vector>

#include "softmodes/errors.hpp"

namespace softmodes {

/// Periodic hypercubic lattice, d in {1, 2}, sites in row-major order.
class LatticeGrid {
 public:
  LatticeGrid(int side_length, int dimension) : side_(side_length), dim_(dimension) {
    if (dimension != 1 && dimension != 2) throw DimensionError("lattice dimension must be 1 or 2");
    if (side_length < 2) throw DimensionError("lattice side must be at least 2");
  }

  int side() const noexcept { return side_; }
  int dim() const noexcept { return dim_; }
  long sites() const noexcept { return dim_ == 1 ? side_ : static_cast<long>(side_) * side_; }

  /// Periodic wrap of a single coordinate.
  int wrap(int c) const noexcept {
    c %= side_;
    return c < 0 ? c + side_ : c;
  }

  long index(int i, int j = 0) const noexcept {
    return dim_ == 1 ? wrap(i) : static_cast<long>(wrap(i)) * side_ + wrap(j);
  }

  bool operator==(const LatticeGrid&) const = default;

 private:
  int side_, dim_;
};

/// Real scalar field on a periodic lattice.
struct LatticeField {
  explicit LatticeField(LatticeGrid g, double fill = 0.0)
      : grid(g), values(static_cast<std::size_t>(g.sites()), fill) {}

  LatticeGrid grid;
  std::vector<double> values;

  long size() const noexcept { return grid.sites(); }
  double& at(int i, int j = 0) { return values[static_cast<std::size_t>(grid.index(i, j))]; }
  double at(int i, int j = 0) const { return values[static_cast<std::size_t>(grid.index(i, j))]; }

  bool operator==(const LatticeField&) const = default;
};

// Small field arithmetic used throughout the reverse-dynamics code.
LatticeField& add_scaled(LatticeField& y, const LatticeField& x, double a);  // y += a*x
LatticeField& scale(LatticeField& y, double a);
LatticeField negated(const LatticeField& x);
double max_abs(const LatticeField& x);
double inf_norm_diff(const LatticeField& a, const LatticeField& b);
bool all_finite(const LatticeField& x);
double dot(const LatticeField& a, const LatticeField& b);
LatticeField translated(const LatticeField& x, int di, int dj = 0);  // x(i - di, j - dj)

enum class ProbeDirection { axis0, axis1, diagonal };

/// Unit-norm cosine field cos(n * k_min * c), with c the coordinate along the
/// chosen direction (sum of coordinates for the diagonal) and k_min = 2*pi/L.
struct FourierProbe {
  int shell;
  ProbeDirection direction;
  LatticeField values;
};

FourierProbe make_fourier_probe(const LatticeGrid& grid, int shell, ProbeDirection direction);

/// Radially averaged periodic autocorrelation, normalized so C(0) = 1.
/// Radii are integer bins (nearest lattice unit of the min-image distance).
struct RadialCorrelation {
  std::vector<double> radii;
  std::vector<double> values;
};

/// Power-spectrum autocorrelation followed by a radial average over nearest-
/// integer distance bins. max_radius < 0 means the default L/2.
RadialCorrelation radial_autocorrelation(const LatticeField& field, double max_radius = -1.0);

/// Flat patch of half-width K around a site, entries ordered lexicographically
/// by offset u in [-K, K]^d, with periodic wraparound.
std::vector<double> extract_patch(const LatticeField& field, long center_site, int radius);

}  // namespace softmodes
