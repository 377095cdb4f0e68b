#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "nullrec/rng.hpp"

namespace nullrec::stats {

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

[[nodiscard]] MeanEstimate mean_and_stderr(std::span<const double> xs);

/// sup |F_n - F| against a continuous reference CDF.
[[nodiscard]] double ks_one_sample(std::span<const double> samples,
                                   const std::function<double(double)>& cdf);

/// Two-sample Kolmogorov-Smirnov distance.
[[nodiscard]] double ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Asymptotic Kolmogorov survival function P(K > lambda).
[[nodiscard]] double kolmogorov_survival(double lambda);

/// Empirical characteristic function with the standard error of its real part.
struct EcfPoint {
  double theta = 0.0;
  std::complex<double> value;
  double std_error = 0.0;
};

[[nodiscard]] EcfPoint ecf(std::span<const double> samples, double theta);
[[nodiscard]] std::vector<EcfPoint> ecf(std::span<const double> samples,
                                        std::span<const double> thetas);

/// max_theta |ecf_a(theta) - ecf_b(theta)|.
[[nodiscard]] double max_ecf_distance(std::span<const double> a, std::span<const double> b,
                                      std::span<const double> thetas);

/// max_theta |ecf(theta) - cf(theta)| for a real-valued reference CF.
[[nodiscard]] double max_ecf_distance(std::span<const double> samples,
                                      const std::function<double(double)>& cf,
                                      std::span<const double> thetas);

/// Evenly spaced theta grid on [lo, hi].
[[nodiscard]] std::vector<double> linspace(double lo, double hi, std::size_t count);

/// Log-spaced integers (deduplicated) from lo to hi.
[[nodiscard]] std::vector<long long> log_spaced(long long lo, long long hi, std::size_t count);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

[[nodiscard]] LineFit least_squares(std::span<const double> x, std::span<const double> y);

/// Slope of log(y) against log(x).
[[nodiscard]] LineFit loglog_fit(std::span<const double> x, std::span<const double> y);

/// Pearson chi-square goodness of fit; returns the upper-tail p-value.
/// Cells with expected count below `min_expected` are pooled into their neighbour.
[[nodiscard]] double chi_square_pvalue(std::span<const double> observed,
                                       std::span<const double> expected,
                                       double min_expected = 5.0);

/// Two-sided p-value of a standard normal statistic.
[[nodiscard]] double normal_two_sided_pvalue(double z);

/// Sign test for symmetry about zero (zeros are ignored).
[[nodiscard]] double sign_test_pvalue(std::span<const double> xs);

/// Spearman rank correlation.
[[nodiscard]] double spearman(std::span<const double> x, std::span<const double> y);

/// Permutation test of serial independence for a sequence of pairs (x_k, y_k).
/// Statistic: sum of absolute lag-1 rank autocorrelations of x, y and the two
/// cross lags. The p-value counts permutations at least as extreme.
[[nodiscard]] double serial_independence_pvalue(std::span<const double> x,
                                                std::span<const double> y,
                                                std::size_t permutations, Rng& rng);

[[nodiscard]] double quantile(std::vector<double> xs, double q);

}  // namespace nullrec::stats
