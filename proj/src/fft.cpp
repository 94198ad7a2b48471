#include "softmodes/fft.hpp"

#include <fftw3.h>

#include <complex>
#include <map>
#include <memory>
#include <mutex>

namespace softmodes {

namespace {

struct FftwBuffer {
  explicit FftwBuffer(std::size_t bytes) : p(fftw_malloc(bytes)) {}
  ~FftwBuffer() { fftw_free(p); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  void* p;
};

// One forward/backward plan pair per grid shape. Plan creation is not
// thread-safe in FFTW, execution on caller-owned arrays is.
struct PlanPair {
  fftw_plan forward;
  fftw_plan backward;
  std::size_t n_complex;
};

const PlanPair& plans_for(const LatticeGrid& grid) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, PlanPair> cache;

  std::lock_guard<std::mutex> lock(mutex);
  const auto key = std::make_pair(grid.side(), grid.dim());
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  const int L = grid.side();
  const std::size_t n_real = static_cast<std::size_t>(grid.sites());
  const std::size_t n_complex =
      grid.dim() == 1 ? static_cast<std::size_t>(L / 2 + 1)
                      : static_cast<std::size_t>(L) * (L / 2 + 1);

  FftwBuffer real_buf(sizeof(double) * n_real);
  FftwBuffer cplx_buf(sizeof(fftw_complex) * n_complex);
  auto* r = static_cast<double*>(real_buf.p);
  auto* c = static_cast<fftw_complex*>(cplx_buf.p);

  PlanPair pair{};
  pair.n_complex = n_complex;
  if (grid.dim() == 1) {
    pair.forward = fftw_plan_dft_r2c_1d(L, r, c, FFTW_ESTIMATE);
    pair.backward = fftw_plan_dft_c2r_1d(L, c, r, FFTW_ESTIMATE);
  } else {
    pair.forward = fftw_plan_dft_r2c_2d(L, L, r, c, FFTW_ESTIMATE);
    pair.backward = fftw_plan_dft_c2r_2d(L, L, c, r, FFTW_ESTIMATE);
  }
  return cache.emplace(key, pair).first->second;
}

}  // namespace

std::vector<double> periodic_autocorrelation(const LatticeField& x) {
  const auto& plans = plans_for(x.grid);
  const std::size_t n_real = x.values.size();

  FftwBuffer real_buf(sizeof(double) * n_real);
  FftwBuffer cplx_buf(sizeof(fftw_complex) * plans.n_complex);
  auto* r = static_cast<double*>(real_buf.p);
  auto* c = static_cast<fftw_complex*>(cplx_buf.p);

  std::copy(x.values.begin(), x.values.end(), r);
  fftw_execute_dft_r2c(plans.forward, r, c);
  for (std::size_t p = 0; p < plans.n_complex; ++p) {
    c[p][0] = c[p][0] * c[p][0] + c[p][1] * c[p][1];
    c[p][1] = 0.0;
  }
  fftw_execute_dft_c2r(plans.backward, c, r);

  std::vector<double> out(n_real);
  const double inv_n = 1.0 / static_cast<double>(n_real);
  for (std::size_t i = 0; i < n_real; ++i) out[i] = r[i] * inv_n;
  return out;
}

namespace {

void check_kernel(const LatticeField& x, const std::vector<double>& kernel, int radius) {
  if (radius < 0) throw ParameterError("kernel radius must be nonnegative");
  if (2 * radius + 1 > x.grid.side()) throw DimensionError("kernel larger than lattice");
  const std::size_t expect = x.grid.dim() == 1
                                 ? static_cast<std::size_t>(2 * radius + 1)
                                 : static_cast<std::size_t>(2 * radius + 1) * (2 * radius + 1);
  if (kernel.size() != expect) throw DimensionError("kernel size does not match radius");
}

}  // namespace

LatticeField patch_cross_correlation_fft(const LatticeField& x, const std::vector<double>& kernel,
                                         int radius) {
  check_kernel(x, kernel, radius);
  const auto& plans = plans_for(x.grid);
  const std::size_t n_real = x.values.size();
  const int K = radius;

  // Kernel placed periodically around the origin.
  LatticeField g(x.grid);
  std::size_t p = 0;
  if (x.grid.dim() == 1) {
    for (int u = -K; u <= K; ++u) g.at(u) = kernel[p++];
  } else {
    for (int ui = -K; ui <= K; ++ui)
      for (int uj = -K; uj <= K; ++uj) g.at(ui, uj) = kernel[p++];
  }

  FftwBuffer real_buf(sizeof(double) * n_real);
  FftwBuffer x_buf(sizeof(fftw_complex) * plans.n_complex);
  FftwBuffer g_buf(sizeof(fftw_complex) * plans.n_complex);
  auto* r = static_cast<double*>(real_buf.p);
  auto* xc = static_cast<fftw_complex*>(x_buf.p);
  auto* gc = static_cast<fftw_complex*>(g_buf.p);

  std::copy(x.values.begin(), x.values.end(), r);
  fftw_execute_dft_r2c(plans.forward, r, xc);
  std::copy(g.values.begin(), g.values.end(), r);
  fftw_execute_dft_r2c(plans.forward, r, gc);

  // X * conj(G)
  for (std::size_t q = 0; q < plans.n_complex; ++q) {
    const double re = xc[q][0] * gc[q][0] + xc[q][1] * gc[q][1];
    const double im = xc[q][1] * gc[q][0] - xc[q][0] * gc[q][1];
    xc[q][0] = re;
    xc[q][1] = im;
  }
  fftw_execute_dft_c2r(plans.backward, xc, r);

  LatticeField out(x.grid);
  const double inv_n = 1.0 / static_cast<double>(n_real);
  for (std::size_t i = 0; i < n_real; ++i) out.values[i] = r[i] * inv_n;
  return out;
}

namespace {

// wrapped neighbor coordinates c+u for u in [-K, K], per base coordinate
std::vector<int> wrap_table(int L, int K) {
  std::vector<int> table(static_cast<std::size_t>(L) * (2 * K + 1));
  for (int c = 0; c < L; ++c)
    for (int u = -K; u <= K; ++u) {
      int w = (c + u) % L;
      if (w < 0) w += L;
      table[static_cast<std::size_t>(c) * (2 * K + 1) + (u + K)] = w;
    }
  return table;
}

}  // namespace

LatticeField patch_cross_correlation_direct(const LatticeField& x, const std::vector<double>& kernel,
                                            int radius) {
  check_kernel(x, kernel, radius);
  const int L = x.grid.side();
  const int K = radius;
  const int W = 2 * K + 1;
  const std::vector<int> wrap = wrap_table(L, K);
  LatticeField out(x.grid);
  if (x.grid.dim() == 1) {
    for (int i = 0; i < L; ++i) {
      const int* row = wrap.data() + static_cast<std::size_t>(i) * W;
      double s = 0.0;
      for (int u = 0; u < W; ++u) s += kernel[static_cast<std::size_t>(u)] * x.values[static_cast<std::size_t>(row[u])];
      out.values[static_cast<std::size_t>(i)] = s;
    }
  } else {
    const double* src = x.values.data();
    double* dst = out.values.data();
    for (int i = 0; i < L; ++i) {
      const int* rows = wrap.data() + static_cast<std::size_t>(i) * W;
      for (int j = 0; j < L; ++j) {
        const int* cols = wrap.data() + static_cast<std::size_t>(j) * W;
        double s = 0.0;
        const double* kp = kernel.data();
        for (int ui = 0; ui < W; ++ui) {
          const double* line = src + static_cast<std::size_t>(rows[ui]) * L;
          for (int uj = 0; uj < W; ++uj) s += kp[uj] * line[cols[uj]];
          kp += W;
        }
        dst[static_cast<std::size_t>(i) * L + j] = s;
      }
    }
  }
  return out;
}

LatticeField box_sum(const LatticeField& x, int radius) {
  if (radius < 0) throw ParameterError("box radius must be nonnegative");
  if (2 * radius + 1 > x.grid.side()) throw DimensionError("box larger than lattice");
  const int L = x.grid.side();
  const int K = radius;
  const int W = 2 * K + 1;
  const std::vector<int> wrap = wrap_table(L, K);
  if (x.grid.dim() == 1) {
    LatticeField out(x.grid);
    for (int i = 0; i < L; ++i) {
      const int* row = wrap.data() + static_cast<std::size_t>(i) * W;
      double s = 0.0;
      for (int u = 0; u < W; ++u) s += x.values[static_cast<std::size_t>(row[u])];
      out.values[static_cast<std::size_t>(i)] = s;
    }
    return out;
  }
  LatticeField rows(x.grid);
  for (int i = 0; i < L; ++i) {
    const double* line = x.values.data() + static_cast<std::size_t>(i) * L;
    double* dst = rows.values.data() + static_cast<std::size_t>(i) * L;
    for (int j = 0; j < L; ++j) {
      const int* cols = wrap.data() + static_cast<std::size_t>(j) * W;
      double s = 0.0;
      for (int u = 0; u < W; ++u) s += line[cols[u]];
      dst[j] = s;
    }
  }
  LatticeField out(x.grid);
  for (int i = 0; i < L; ++i) {
    const int* rws = wrap.data() + static_cast<std::size_t>(i) * W;
    double* dst = out.values.data() + static_cast<std::size_t>(i) * L;
    for (int j = 0; j < L; ++j) {
      double s = 0.0;
      for (int u = 0; u < W; ++u) s += rows.values[static_cast<std::size_t>(rws[u]) * L + j];
      dst[j] = s;
    }
  }
  return out;
}

}  // namespace softmodes
