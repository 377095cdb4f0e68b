#include <array>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "nullrec/errors.hpp"
#include "nullrec/limits.hpp"
#include "nullrec/stats.hpp"
#include "oracles.hpp"

using namespace nullrec;
using limits::ControlScale;
using limits::YParams;

TEST_CASE("analytic CF exponent of Y(1) matches the closed form") {
  for (const auto& [alpha, beta, gamma] :
       std::vector<std::array<double, 3>>{{0.8, 0.5, 2.0}, {1.2, 0.5, 1.6}, {1.5, 0.3, 2.0}}) {
    const YParams yp(alpha, beta, gamma);
    const double one = 1.0, theta = 1.0;
    limits::CfOptions opt;
    opt.inner_samples = 20000;
    Rng rng(41);
    const auto v = limits::analytic_cf_Y(yp, std::span<const double>(&one, 1),
                                         std::span<const double>(&theta, 1), opt, rng);
    const double target = oracle::y_exponent(alpha, beta, gamma);
    CHECK(std::abs(v.exponent - target) < 5.0 * v.exponent_se + 1e-9);
    CHECK(v.cf == doctest::Approx(std::exp(-v.exponent)));
  }
}

TEST_CASE("analytic CF scales with theta and t as an H-sssi process") {
  const YParams yp(1.2, 0.5, 1.6);
  limits::CfOptions opt;
  opt.inner_samples = 20000;
  const double base = oracle::y_exponent(1.2, 0.5, 1.6);
  const double t = 2.5, theta = 1.7;
  Rng rng(42);
  const auto v = limits::analytic_cf_Y(yp, std::span<const double>(&t, 1),
                                       std::span<const double>(&theta, 1), opt, rng);
  const double target = base * std::pow(theta, 1.2) * std::pow(t, 1.2 * yp.hurst());
  CHECK(std::abs(v.exponent - target) < 5.0 * v.exponent_se);
}

TEST_CASE("LePage realization of Y(1) has the closed-form CF") {
  const YParams yp(0.8, 0.5, 2.0);
  limits::YOptions yo;
  yo.terms = 200;
  constexpr std::size_t n = 10000;
  std::vector<double> y(n);
  const Rng master(43);
  const double one = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    Rng r = master.split(i);
    limits::sample_Y_at(yp, std::span<const double>(&one, 1), 1.0, yo, std::span<double>(&y[i], 1), r);
  }
  const double e = oracle::y_exponent(0.8, 0.5, 2.0);
  const auto cf = [&](double th) { return std::exp(-e * std::pow(std::abs(th), 0.8)); };
  CHECK(stats::max_ecf_distance(y, cf, stats::linspace(-3.0, 3.0, 25)) < 0.04);
}

TEST_CASE("tail normalization multiplies Y by 2^{1/alpha}") {
  CHECK(limits::control_scale_factor(ControlScale::characteristic, 0.8) == 1.0);
  CHECK(limits::control_scale_factor(ControlScale::tail, 0.8) == doctest::Approx(std::pow(2.0, 1.25)));
  const YParams yp(0.8, 0.5, 2.0);
  limits::YOptions a, b;
  a.terms = b.terms = 50;
  b.scale = ControlScale::tail;
  const std::vector<double> times{0.5, 1.0};
  std::vector<double> ya(2), yb(2);
  Rng r1(44), r2(44);
  limits::sample_Y_at(yp, times, 1.0, a, ya, r1);
  limits::sample_Y_at(yp, times, 1.0, b, yb, r2);
  for (int i = 0; i < 2; ++i) CHECK(yb[i] == doctest::Approx(std::pow(2.0, 1.25) * ya[i]).epsilon(1e-12));
}

TEST_CASE("beta = 1: the series and the direct sub-stable draw agree") {
  const YParams yp(1.2, 1.0, 1.6);
  limits::YOptions yo;
  yo.terms = 500;
  constexpr std::size_t n = 10000;
  std::vector<double> s(n), d(n);
  const Rng a(45), b(46);
  const double one = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    Rng r = a.split(i);
    limits::sample_Y_at(yp, std::span<const double>(&one, 1), 1.0, yo, std::span<double>(&s[i], 1), r);
    Rng q = b.split(i);
    d[i] = limits::sample_substable(yp, 1.0, ControlScale::characteristic, q);
  }
  CHECK(stats::ks_two_sample(s, d) < oracle::ks_critical(n, n));
}

TEST_CASE("BM time-changed by M_beta") {
  constexpr double beta = 0.5, sigma = 1.7;
  constexpr std::size_t n = 50000;
  const std::vector<double> grid{0.0, 0.5, 1.0};
  std::vector<double> x(n), x2(n);
  const Rng master(47);
  for (std::size_t i = 0; i < n; ++i) {
    Rng r = master.split(i);
    x[i] = limits::sample_bm_ml(beta, sigma, grid, r).values[2];
    x2[i] = x[i] * x[i];
  }
  // Var = Gamma(beta+1) sigma^2 E M(1) = sigma^2.
  const auto v = stats::mean_and_stderr(x2);
  CHECK(std::abs(v.mean - sigma * sigma) < 5.0 * v.std_error);
  CHECK(stats::sign_test_pvalue(x) > 1e-3);
}

TEST_CASE("entrance time law") {
  constexpr double beta = 0.4, L = 2.0;
  constexpr std::size_t n = 20000;
  const std::vector<double> grid{0.0, 1.0, 2.0};
  std::vector<double> t(n);
  const Rng master(48);
  for (std::size_t i = 0; i < n; ++i) {
    Rng r = master.split(i);
    const auto s = limits::sample_entrance_limit(beta, 1.0, L, grid, r);
    t[i] = s.entrance;
    if (s.entrance >= 1.0) CHECK(s.path.values[1] == 0.0);
  }
  const auto cdf = [&](double x) { return x <= 0.0 ? 0.0 : x >= L ? 1.0 : std::pow(x / L, 1.0 - beta); };
  CHECK(stats::ks_one_sample(t, cdf) < oracle::ks_critical(n));
}

TEST_CASE("endpoint moments") {
  CHECK(limits::endpoint_abs_moment(2.0, 0.8) == doctest::Approx(oracle::normal_abs_moment(0.8)).epsilon(1e-12));
  CHECK(limits::endpoint_abs_moment(1.6, 1.2) == doctest::Approx(oracle::sas_abs_moment(1.6, 1.2)).epsilon(1e-10));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(YParams(2.5, 0.5, 2.0), ParameterError);
  CHECK_THROWS_AS(YParams(0.8, 1.5, 2.0), ParameterError);
  CHECK_THROWS_AS(YParams(0.8, 0.5, 0.5), ParameterError);
  const YParams boundary(0.8, 1.0, 2.0);
  const double one = 1.0, theta = 1.0;
  Rng rng(49);
  CHECK_THROWS_AS((void)limits::analytic_cf_Y(boundary, std::span<const double>(&one, 1),
                                        std::span<const double>(&theta, 1), {}, rng),
                  ParameterError);
}
