#pragma once

// Truncated power-series products and inverses backed by FFTW.

#include <vector>

namespace nullrec::detail {

/// First n coefficients of a * b.
[[nodiscard]] std::vector<double> convolve(const std::vector<double>& a,
                                           const std::vector<double>& b, std::size_t n);

/// First n coefficients of 1 / a (a[0] != 0), by Newton iteration.
[[nodiscard]] std::vector<double> series_inverse(const std::vector<double>& a, std::size_t n);

}  // namespace nullrec::detail
