#include "nullrec/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "nullrec/errors.hpp"

namespace nullrec::stats {

MeanEstimate mean_and_stderr(std::span<const double> xs) {
  require(!xs.empty(), "mean of empty sample");
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double var = xs.size() > 1 ? ss / (n - 1.0) : 0.0;
  return {mean, std::sqrt(var / n)};
}

double ks_one_sample(std::span<const double> samples, const std::function<double(double)>& cdf) {
  require(!samples.empty(), "KS of empty sample");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = cdf(s[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  require(!a.empty() && !b.empty(), "KS of empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return d;
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

EcfPoint ecf(std::span<const double> samples, double theta) {
  require(!samples.empty(), "ECF of empty sample");
  double re = 0.0, im = 0.0, re2 = 0.0;
  for (double x : samples) {
    const double c = std::cos(theta * x);
    re += c;
    re2 += c * c;
    im += std::sin(theta * x);
  }
  const double n = static_cast<double>(samples.size());
  re /= n;
  im /= n;
  const double var = std::max(0.0, re2 / n - re * re);
  return {theta, {re, im}, std::sqrt(var / n)};
}

std::vector<EcfPoint> ecf(std::span<const double> samples, std::span<const double> thetas) {
  std::vector<EcfPoint> out;
  out.reserve(thetas.size());
  for (double t : thetas) out.push_back(ecf(samples, t));
  return out;
}

double max_ecf_distance(std::span<const double> a, std::span<const double> b,
                        std::span<const double> thetas) {
  double d = 0.0;
  for (double t : thetas) d = std::max(d, std::abs(ecf(a, t).value - ecf(b, t).value));
  return d;
}

double max_ecf_distance(std::span<const double> samples, const std::function<double(double)>& cf,
                        std::span<const double> thetas) {
  double d = 0.0;
  for (double t : thetas) d = std::max(d, std::abs(ecf(samples, t).value - cf(t)));
  return d;
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  require(count >= 2, "linspace needs at least two points");
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return out;
}

std::vector<long long> log_spaced(long long lo, long long hi, std::size_t count) {
  require(lo >= 1 && hi >= lo && count >= 2, "log_spaced needs 1 <= lo <= hi, count >= 2");
  std::vector<long long> out;
  const double a = std::log(static_cast<double>(lo));
  const double b = std::log(static_cast<double>(hi));
  for (std::size_t i = 0; i < count; ++i) {
    const double v = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
    const long long k = std::llround(v);
    if (out.empty() || k > out.back()) out.push_back(k);
  }
  return out;
}

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, "least squares needs matched samples");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  require(sxx > 0.0, "least squares with constant regressor");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

LineFit loglog_fit(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(x[i] > 0.0 && y[i] > 0.0, "log-log fit needs positive data");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return least_squares(lx, ly);
}

double chi_square_pvalue(std::span<const double> observed, std::span<const double> expected,
                         double min_expected) {
  require(observed.size() == expected.size() && !observed.empty(), "chi-square size mismatch");
  std::vector<double> obs, exp;
  double acc_o = 0.0, acc_e = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    acc_o += observed[i];
    acc_e += expected[i];
    if (acc_e >= min_expected) {
      obs.push_back(acc_o);
      exp.push_back(acc_e);
      acc_o = acc_e = 0.0;
    }
  }
  if (acc_e > 0.0) {
    if (exp.empty()) {
      obs.push_back(acc_o);
      exp.push_back(acc_e);
    } else {
      obs.back() += acc_o;
      exp.back() += acc_e;
    }
  }
  if (exp.size() < 2) return 1.0;
  double stat = 0.0;
  for (std::size_t i = 0; i < exp.size(); ++i) {
    stat += (obs[i] - exp[i]) * (obs[i] - exp[i]) / exp[i];
  }
  const double dof = static_cast<double>(exp.size() - 1);
  return boost::math::gamma_q(dof / 2.0, stat / 2.0);
}

double normal_two_sided_pvalue(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

double sign_test_pvalue(std::span<const double> xs) {
  double pos = 0.0, n = 0.0;
  for (double x : xs) {
    if (x == 0.0) continue;
    n += 1.0;
    if (x > 0.0) pos += 1.0;
  }
  if (n == 0.0) return 1.0;
  return normal_two_sided_pvalue((pos - 0.5 * n) / std::sqrt(0.25 * n));
}

namespace {

std::vector<double> ranks(std::span<const double> x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j);
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

double lag1(std::span<const double> a, std::span<const double> b) {
  return pearson(a.subspan(0, a.size() - 1), b.subspan(1));
}

double serial_statistic(std::span<const double> rx, std::span<const double> ry) {
  return std::abs(lag1(rx, rx)) + std::abs(lag1(ry, ry)) + std::abs(lag1(rx, ry)) +
         std::abs(lag1(ry, rx));
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, "spearman size mismatch");
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  return pearson(rx, ry);
}

double serial_independence_pvalue(std::span<const double> x, std::span<const double> y,
                                  std::size_t permutations, Rng& rng) {
  require(x.size() == y.size() && x.size() >= 4, "serial test needs at least 4 pairs");
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double observed = serial_statistic(rx, ry);
  std::vector<std::size_t> order(rx.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> px(rx.size()), py(ry.size());
  std::size_t extreme = 0;
  for (std::size_t p = 0; p < permutations; ++p) {
    for (std::size_t i = order.size() - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(rng() % (i + 1));
      std::swap(order[i], order[j]);
    }
    for (std::size_t i = 0; i < order.size(); ++i) {
      px[i] = rx[order[i]];
      py[i] = ry[order[i]];
    }
    if (serial_statistic(px, py) >= observed) ++extreme;
  }
  return (1.0 + static_cast<double>(extreme)) / (1.0 + static_cast<double>(permutations));
}

double quantile(std::vector<double> xs, double q) {
  require(!xs.empty(), "quantile of empty sample");
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= xs.size()) return xs.back();
  const double w = pos - static_cast<double>(i);
  return (1.0 - w) * xs[i] + w * xs[i + 1];
}

}  // namespace nullrec::stats
