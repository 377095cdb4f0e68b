#pragma once

// Closed forms and small numerical routines used as independent oracles.
// Nothing here calls into the library under test.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

namespace oracle {

/// E M_beta(t)^q = t^{q beta} Gamma(1+q) / Gamma(1+q beta).
inline double ml_moment(double beta, double q, double t) {
  return std::pow(t, q * beta) * std::tgamma(1.0 + q) / std::tgamma(1.0 + q * beta);
}

/// (1-a) / (Gamma(2-a) cos(pi a / 2)), with its limit 2/pi at a = 1.
inline double tail_constant(double a) {
  if (a == 1.0) return 2.0 / std::numbers::pi;
  return (1.0 - a) / (std::tgamma(2.0 - a) * std::cos(std::numbers::pi * a / 2.0));
}

/// E|X|^p for X with CF exp(-|theta|^g), 0 < p < g < 2.
inline double sas_abs_moment(double g, double p) {
  return std::pow(2.0, p) * std::tgamma((1.0 + p) / 2.0) * std::tgamma(1.0 - p / g) /
         (std::sqrt(std::numbers::pi) * std::tgamma(1.0 - p / 2.0));
}

/// E|N|^p for a standard normal N.
inline double normal_abs_moment(double p) {
  return std::pow(2.0, p / 2.0) * std::tgamma((1.0 + p) / 2.0) / std::sqrt(std::numbers::pi);
}

inline double beta_fn(double a, double b) {
  return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

/// Exponent I with E exp(i theta Y(1)) = exp(-I |theta|^alpha) under the
/// characteristic normalization: I = E|S_g(1)|^alpha E M_beta(1)^{alpha/g}
/// (1-beta) B(1-beta, 1 + beta alpha/g). S_2 is a standard Brownian motion.
inline double y_exponent(double alpha, double beta, double g) {
  const double q = alpha / g;
  const double endpoint = g == 2.0 ? normal_abs_moment(alpha) : sas_abs_moment(g, alpha);
  return endpoint * ml_moment(beta, q, 1.0) * (1.0 - beta) * beta_fn(1.0 - beta, 1.0 + q * beta);
}

/// CDF of the r = 1 overshoot at beta = 1/2: (2/pi) atan(sqrt x).
inline double overshoot_cdf_half(double x) {
  return x <= 0.0 ? 0.0 : 2.0 / std::numbers::pi * std::atan(std::sqrt(x));
}

/// E N^p for N ~ Poisson(lambda).
inline double poisson_abs_moment(double lambda, double p) {
  double sum = 0.0;
  for (int k = 1; k < 200; ++k) {
    sum += std::exp(p * std::log(static_cast<double>(k)) + k * std::log(lambda) - lambda -
                    std::lgamma(k + 1.0));
  }
  return sum;
}

/// E|N1 - N2|^p for independent Poisson(lambda) variables.
inline double skellam_abs_moment(double lambda, double p) {
  std::vector<double> w(120);
  for (std::size_t k = 0; k < w.size(); ++k) {
    w[k] = std::exp(k * std::log(lambda) - lambda - std::lgamma(k + 1.0));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (std::size_t j = 0; j < w.size(); ++j) {
      const double d = std::abs(static_cast<double>(i) - static_cast<double>(j));
      if (d > 0.0) sum += w[i] * w[j] * std::pow(d, p);
    }
  }
  return sum;
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// a_n of the Gaussian walk with D = [0,1]: sum_{k=1..n} P(U + sqrt(k) N in [0,1]),
/// U uniform on [0,1], by midpoint quadrature in U.
inline double gaussian_walk_an(long long n) {
  constexpr int nodes = 400;
  double total = 0.0;
  for (long long k = 1; k <= n; ++k) {
    const double s = std::sqrt(static_cast<double>(k));
    double p = 0.0;
    for (int i = 0; i < nodes; ++i) {
      const double x = (i + 0.5) / nodes;
      p += normal_cdf((1.0 - x) / s) - normal_cdf(-x / s);
    }
    total += p / nodes;
  }
  return total;
}

/// 1.95 sqrt((n+m)/(n m)): the two-sample KS distance exceeded with probability 0.001.
inline double ks_critical(std::size_t n, std::size_t m) {
  const double a = static_cast<double>(n), b = static_cast<double>(m);
  return 1.95 * std::sqrt((a + b) / (a * b));
}

/// One-sample version.
inline double ks_critical(std::size_t n) { return 1.95 / std::sqrt(static_cast<double>(n)); }

}  // namespace oracle
