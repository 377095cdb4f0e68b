#include "fft_series.hpp"

#include <algorithm>
#include <complex>
#include <mutex>

#include <fftw3.h>

#include "nullrec/errors.hpp"

namespace nullrec::detail {

namespace {

// FFTW planning is not thread safe.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b,
                             std::size_t n) {
  const std::size_t la = std::min(a.size(), n);
  const std::size_t lb = std::min(b.size(), n);
  std::vector<double> out(n, 0.0);
  if (la == 0 || lb == 0) return out;
  if (la * lb <= 4096) {
    for (std::size_t i = 0; i < la; ++i) {
      for (std::size_t j = 0; j < lb && i + j < n; ++j) out[i + j] += a[i] * b[j];
    }
    return out;
  }
  const std::size_t size = next_pow2(la + lb - 1);
  const std::size_t bins = size / 2 + 1;
  double* x = fftw_alloc_real(size);
  double* y = fftw_alloc_real(size);
  fftw_complex* fx = fftw_alloc_complex(bins);
  fftw_complex* fy = fftw_alloc_complex(bins);
  fftw_plan px, py, back;
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    px = fftw_plan_dft_r2c_1d(static_cast<int>(size), x, fx, FFTW_ESTIMATE);
    py = fftw_plan_dft_r2c_1d(static_cast<int>(size), y, fy, FFTW_ESTIMATE);
    back = fftw_plan_dft_c2r_1d(static_cast<int>(size), fx, x, FFTW_ESTIMATE);
  }
  std::fill(x, x + size, 0.0);
  std::fill(y, y + size, 0.0);
  std::copy(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(la), x);
  std::copy(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(lb), y);
  fftw_execute(px);
  fftw_execute(py);
  for (std::size_t k = 0; k < bins; ++k) {
    const std::complex<double> u(fx[k][0], fx[k][1]);
    const std::complex<double> v(fy[k][0], fy[k][1]);
    const auto w = u * v;
    fx[k][0] = w.real();
    fx[k][1] = w.imag();
  }
  fftw_execute(back);
  const double scale = 1.0 / static_cast<double>(size);
  for (std::size_t i = 0; i < n && i < size; ++i) out[i] = x[i] * scale;
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(px);
    fftw_destroy_plan(py);
    fftw_destroy_plan(back);
  }
  fftw_free(x);
  fftw_free(y);
  fftw_free(fx);
  fftw_free(fy);
  return out;
}

std::vector<double> series_inverse(const std::vector<double>& a, std::size_t n) {
  require(!a.empty() && a[0] != 0.0, "series inverse needs a nonzero constant term");
  std::vector<double> b{1.0 / a[0]};
  std::size_t len = 1;
  while (len < n) {
    len = std::min(2 * len, n);
    // b <- b (2 - a b) mod z^len
    std::vector<double> ab = convolve(a, b, len);
    for (auto& c : ab) c = -c;
    ab[0] += 2.0;
    b = convolve(b, ab, len);
  }
  b.resize(n);
  return b;
}

}  // namespace nullrec::detail
