#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "nullrec/errors.hpp"
#include "nullrec/stable.hpp"
#include "nullrec/stats.hpp"
#include "oracles.hpp"

using namespace nullrec;

TEST_CASE("symmetric stable samples have CF exp(-s^alpha |theta|^alpha)") {
  const auto thetas = stats::linspace(-3.0, 3.0, 25);
  for (const double alpha : {0.8, 1.0, 1.5, 2.0}) {
    constexpr double s = 1.3;
    constexpr std::size_t n = 100000;
    std::vector<double> x(n);
    const Rng master(21);
    for (std::size_t i = 0; i < n; ++i) {
      Rng r = master.split(i);
      x[i] = stable::sample_sas(alpha, s, r);
    }
    const auto cf = [&](double th) { return std::exp(-std::pow(s * std::abs(th), alpha)); };
    CHECK(stats::max_ecf_distance(x, cf, thetas) < 0.012);
  }
}

TEST_CASE("tail constant") {
  for (const double a : {0.3, 0.8, 1.0, 1.2, 1.9}) {
    CHECK(stable::tail_constant(a) == doctest::Approx(oracle::tail_constant(a)).epsilon(1e-12));
  }
  CHECK(stable::tail_constant(1.0 - 1e-9) == doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-6));
}

TEST_CASE("absolute moments against Monte Carlo") {
  CHECK(stable::sas_abs_moment(2.0, 1.0, true) == doctest::Approx(std::sqrt(2.0 / std::numbers::pi)));
  constexpr double g = 1.5, p = 0.5;
  constexpr std::size_t n = 200000;
  std::vector<double> x(n);
  const Rng master(22);
  for (std::size_t i = 0; i < n; ++i) {
    Rng r = master.split(i);
    x[i] = std::pow(std::abs(stable::sample_sas(g, 1.0, r)), p);
  }
  const auto est = stats::mean_and_stderr(x);
  CHECK(std::abs(est.mean - oracle::sas_abs_moment(g, p)) < 5.0 * est.std_error);
  CHECK(stable::sas_abs_moment(g, p, false) == doctest::Approx(oracle::sas_abs_moment(g, p)).epsilon(1e-10));
}

TEST_CASE("Levy tail specifications") {
  const auto ps = stable::LevyTailSpec::pure_stable(0.8);
  const auto pc = stable::LevyTailSpec::pareto_cutoff(1.5);
  const auto ud = stable::LevyTailSpec::user_defined(0.8, 1.0, [](double x) { return std::pow(x, -0.8); });
  for (const double y : {0.01, 0.5, 2.0, 50.0}) {
    CHECK(ps.inverse(y) == doctest::Approx(std::pow(y, -1.0 / 0.8)).epsilon(1e-12));
    CHECK(ud.inverse(y) == doctest::Approx(ps.inverse(y)).epsilon(1e-8));
    CHECK(pc.inverse(y) == doctest::Approx(y < 1.0 ? std::pow(y, -1.0 / 1.5) : 0.0).epsilon(1e-12));
  }
  // int_{y0}^inf y^{-2/alpha} dy = y0^{1 - 2/alpha} / (2/alpha - 1).
  for (const double alpha : {0.8, 1.5}) {
    const auto spec = stable::LevyTailSpec::pure_stable(alpha);
    const double r = 2.0 / alpha;
    CHECK(spec.inverse_square_tail(3.0) == doctest::Approx(std::pow(3.0, 1.0 - r) / (r - 1.0)).epsilon(1e-6));
  }
  CHECK(ps.small_tail_condition_holds());
  CHECK(stable::tail_kind_from_string(stable::to_string(stable::TailKind::pareto_cutoff)) ==
        stable::TailKind::pareto_cutoff);
  CHECK_THROWS_AS((void)stable::LevyTailSpec::pure_stable(2.5), ParameterError);
}

TEST_CASE("series budgets are prefix-consistent") {
  Rng a(23), b(23);
  const auto small = stable::SeriesBudget::draw(10, a);
  const auto large = stable::SeriesBudget::draw(100, b);
  for (std::size_t j = 0; j < 10; ++j) {
    CHECK(small.arrivals[j] == large.arrivals[j]);
    CHECK(small.signs[j] == large.signs[j]);
  }
  for (std::size_t j = 1; j < large.J; ++j) CHECK(large.arrivals[j] > large.arrivals[j - 1]);
}

TEST_CASE("LePage series of a constant integrand is SaS with scale mass^{1/alpha}") {
  constexpr double alpha = 0.8, mass = 2.0;
  constexpr std::size_t n = 20000;
  std::vector<double> x(n);
  const Rng master(24);
  for (std::size_t i = 0; i < n; ++i) {
    Rng r = master.split(i);
    Rng arrivals = r.split(0);
    const auto budget = stable::SeriesBudget::draw(1000, arrivals);
    Rng marks = r.split(1);
    x[i] = stable::lepage_sas_integral([](double) { return 1.0; }, [](Rng&) { return 0.0; }, mass,
                                       alpha, budget, marks);
  }
  const auto thetas = stats::linspace(-3.0, 3.0, 25);
  const auto cf = [&](double th) { return std::exp(-mass * std::pow(std::abs(th), alpha)); };
  CHECK(stats::max_ecf_distance(x, cf, thetas) < 0.03);
}

TEST_CASE("small-x condition on user-defined tails") {
  const auto slow = [](double x) { return std::pow(x, -0.8); };
  CHECK(stable::LevyTailSpec::user_defined(0.8, 1.0, slow).small_tail_condition_holds());
  CHECK_THROWS_AS((void)stable::LevyTailSpec::user_defined(0.8, 0.5, slow), ParameterError);
  CHECK_THROWS_AS((void)stable::LevyTailSpec::user_defined(0.8, 0.8, slow), ParameterError);
}
