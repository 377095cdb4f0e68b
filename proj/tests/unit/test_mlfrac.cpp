#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "nullrec/errors.hpp"
#include "nullrec/mlfrac.hpp"
#include "nullrec/stats.hpp"
#include "oracles.hpp"

using namespace nullrec;

TEST_CASE("positive stable variate has Laplace transform exp(-theta^beta)") {
  for (const double beta : {0.3, 0.5, 0.8}) {
    const Rng master(11);
    constexpr std::size_t n = 200000;
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
      Rng r = master.split(i);
      s[i] = mlfrac::sample_positive_stable(beta, r);
    }
    for (const double theta : {0.5, 1.0, 2.0}) {
      std::vector<double> e(n);
      for (std::size_t i = 0; i < n; ++i) e[i] = std::exp(-theta * s[i]);
      const auto est = stats::mean_and_stderr(e);
      CHECK(std::abs(est.mean - std::exp(-std::pow(theta, beta))) < 5.0 * est.std_error);
    }
  }
}

TEST_CASE("first passage time has the Mittag-Leffler mean and second moment") {
  for (const double beta : {0.3, 0.5, 0.8}) {
    const Rng master(12);
    constexpr std::size_t n = 100000;
    std::vector<double> m(n), m2(n);
    for (std::size_t i = 0; i < n; ++i) {
      Rng r = master.split(i);
      m[i] = mlfrac::sample_first_passage(beta, 1.0, r).time;
      m2[i] = m[i] * m[i];
    }
    const auto e1 = stats::mean_and_stderr(m);
    const auto e2 = stats::mean_and_stderr(m2);
    CHECK(std::abs(e1.mean - 1.0 / std::tgamma(1.0 + beta)) < 5.0 * e1.std_error);
    CHECK(std::abs(e2.mean - oracle::ml_moment(beta, 2.0, 1.0)) < 5.0 * e2.std_error);
  }
}

TEST_CASE("ml_moment matches the closed form") {
  for (const double beta : {0.2, 0.5, 0.9, 1.0}) {
    for (const double q : {0.5, 1.0, 2.5}) {
      CHECK(mlfrac::ml_moment(beta, q, 1.7) == doctest::Approx(oracle::ml_moment(beta, q, 1.7)).epsilon(1e-12));
    }
  }
}

TEST_CASE("overshoot law at beta = 1/2") {
  const mlfrac::OvershootSampler os(0.5);
  CHECK(os.cdf(1.0) == doctest::Approx(0.5).epsilon(1e-6));
  for (const double x : {0.01, 0.3, 3.0, 40.0}) {
    CHECK(os.cdf(x) == doctest::Approx(oracle::overshoot_cdf_half(x)).epsilon(1e-5));
  }
  CHECK(os.total_mass() == doctest::Approx(1.0).epsilon(1e-6));

  // Tabulated sampler and the exact first-passage overshoot, both at level r = 2.
  constexpr std::size_t n = 50000;
  std::vector<double> tab(n), fp(n);
  const Rng a(13), b(14);
  for (std::size_t i = 0; i < n; ++i) {
    Rng r = a.split(i);
    tab[i] = os.sample(2.0, r) / 2.0;
    Rng q = b.split(i);
    fp[i] = mlfrac::sample_first_passage(0.5, 2.0, q).overshoot / 2.0;
  }
  CHECK(stats::ks_one_sample(tab, oracle::overshoot_cdf_half) < oracle::ks_critical(n));
  CHECK(stats::ks_one_sample(fp, oracle::overshoot_cdf_half) < oracle::ks_critical(n));
}

TEST_CASE("Mittag-Leffler paths") {
  const auto grid = uniform_grid(2.0, 50);
  Rng rng(15);
  SUBCASE("paths start at zero and are nondecreasing") {
    for (const double beta : {0.2, 0.5, 0.9}) {
      const auto p = mlfrac::sample_mittag_leffler(mlfrac::MLParams(beta), grid, rng);
      CHECK(is_nondecreasing_from_zero(p));
    }
  }
  SUBCASE("beta = 1 is the identity") {
    const auto p = mlfrac::sample_mittag_leffler(mlfrac::MLParams(1.0), grid, rng);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(p.values[i] == doctest::Approx(grid[i]));
  }
  SUBCASE("levels dominate the grid times") {
    const auto lp = mlfrac::sample_mittag_leffler_levels(mlfrac::MLParams(0.5), grid, rng);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(lp.levels[i] >= grid[i]);
  }
  SUBCASE("invalid beta is rejected") {
    CHECK_THROWS_AS(mlfrac::MLParams(1.5), ParameterError);
    CHECK_THROWS_AS(mlfrac::MLParams(-0.1), ParameterError);
  }
}

TEST_CASE("self-similarity M(c t) = c^beta M(t) in law") {
  constexpr double beta = 0.6, c = 3.0;
  constexpr std::size_t n = 40000;
  std::vector<double> x(n), y(n);
  const Rng a(16), b(17);
  for (std::size_t i = 0; i < n; ++i) {
    const double t1 = 1.0, tc = c;
    Rng r = a.split(i);
    mlfrac::mittag_leffler_at(beta, std::span<const double>(&t1, 1), std::span<double>(&x[i], 1), r);
    Rng q = b.split(i);
    mlfrac::mittag_leffler_at(beta, std::span<const double>(&tc, 1), std::span<double>(&y[i], 1), q);
    y[i] /= std::pow(c, beta);
  }
  CHECK(stats::ks_two_sample(x, y) < oracle::ks_critical(n, n));
}

TEST_CASE("skeleton inversion agrees with the exact sampler") {
  constexpr double beta = 0.5;
  constexpr std::size_t n = 5000;
  const std::vector<double> grid{0.0, 1.0};
  std::vector<double> skel(n), exact(n);
  const Rng a(18), b(19);
  for (std::size_t i = 0; i < n; ++i) {
    Rng r = a.split(i);
    const auto inv = mlfrac::invert_subordinator_skeleton(beta, grid, 1e-3, r);
    skel[i] = inv.ml.values[1];
    // The inverse is the first skeleton time with S >= t.
    const auto& s = inv.subordinator;
    const double m = skel[i];
    const auto it = std::find_if(s.grid.begin(), s.grid.end(), [&](double u) { return u >= m - 1e-12; });
    REQUIRE(it != s.grid.end());
    CHECK(s.values[static_cast<std::size_t>(it - s.grid.begin())] >= 1.0);
    Rng q = b.split(i);
    exact[i] = mlfrac::sample_first_passage(beta, 1.0, q).time;
  }
  CHECK(stats::ks_two_sample(skel, exact) < oracle::ks_critical(n, n));
}
