#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "nullrec/errors.hpp"
#include "nullrec/momentbounds.hpp"
#include "oracles.hpp"

using namespace nullrec;
using momentbounds::PosLevySpec;
using momentbounds::SymLevySpec;

TEST_CASE("moments of atoms and power pieces") {
  PosLevySpec s;
  s.add_atom(2.0, 0.5).add_power(3.0, 1.5, 0.5, 4.0);
  for (const double q : {0.0, 1.0, 2.5}) {
    const double piece = 3.0 * (std::pow(4.0, q - 1.5) - std::pow(0.5, q - 1.5)) / (q - 1.5);
    CHECK(s.moment(q) == doctest::Approx(0.5 * std::pow(2.0, q) + piece).epsilon(1e-12));
  }
  PosLevySpec heavy;
  heavy.add_power(1.0, 1.0, 0.0, 10.0);
  CHECK(std::isinf(heavy.total_mass()));
  CHECK(std::isinf(heavy.first_moment()));
  CHECK(heavy.moment(2.0) == doctest::Approx(10.0).epsilon(1e-12));
  PosLevySpec m;
  m.add_power_mass(2.0, 0.7, 1.0, 50.0);
  CHECK(m.total_mass() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(heavy.truncated(10.0).total_mass() == doctest::Approx(10.0 - 0.1).epsilon(1e-12));
}

TEST_CASE("Poisson(1) fractional moment") {
  PosLevySpec s;
  s.add_atom(1.0, 1.0);
  Rng rng(61);
  const auto r = momentbounds::check_pos_bound(s, 1.5, 400000, rng);
  CHECK(std::abs(r.lhs - oracle::poisson_abs_moment(1.0, 1.5)) < 5.0 * r.lhs_se);
  CHECK(r.rhs == doctest::Approx(2.0));
}

TEST_CASE("Skellam fractional moment") {
  PosLevySpec half;
  half.add_atom(1.0, 1.0);
  Rng rng(62);
  const auto r = momentbounds::check_sym_bound(SymLevySpec(half), 2.5, 400000, rng);
  CHECK(std::abs(r.lhs - oracle::skellam_abs_moment(1.0, 2.5)) < 5.0 * r.lhs_se);
}

TEST_CASE("scale homogeneity on pinned seeds") {
  PosLevySpec s;
  s.add_atom(0.5, 1.0).add_power_mass(0.4, 1.2, 0.1, 20.0);
  constexpr double c = 3.0, p = 1.5;
  Rng a(63), b(63);
  const auto base = momentbounds::check_pos_bound(s, p, 20000, a);
  const auto scaled = momentbounds::check_pos_bound(s.scaled(c), p, 20000, b);
  CHECK(scaled.lhs == doctest::Approx(std::pow(c, p) * base.lhs).epsilon(1e-10));
  CHECK(scaled.rhs >= c * base.rhs * (1.0 - 1e-12));
  CHECK(scaled.rhs <= std::pow(c, p) * base.rhs * (1.0 + 1e-12));

  constexpr double q = 2.5;
  Rng d(64), e(64);
  const auto sb = momentbounds::check_sym_bound(SymLevySpec(s), q, 20000, d);
  const auto ss = momentbounds::check_sym_bound(SymLevySpec(s).scaled(c), q, 20000, e);
  CHECK(ss.lhs == doctest::Approx(std::pow(c, q) * sb.lhs).epsilon(1e-10));
  CHECK(ss.rhs >= c * c * sb.rhs * (1.0 - 1e-12));
  CHECK(ss.rhs <= std::pow(c, q) * sb.rhs * (1.0 + 1e-12));
}

TEST_CASE("reflection invariance on pinned seeds") {
  PosLevySpec s;
  s.add_atom(1.0, 0.8).add_power_mass(0.5, 2.5, 1.0, 30.0);
  Rng a(65), b(65);
  const auto plain = momentbounds::check_sym_bound(SymLevySpec(s), 2.5, 20000, a);
  const auto refl = momentbounds::check_sym_bound(SymLevySpec(s).reflected(), 2.5, 20000, b);
  CHECK(plain.lhs == refl.lhs);
  CHECK(plain.rhs == refl.rhs);
}

TEST_CASE("invalid measures are rejected") {
  PosLevySpec heavy;
  heavy.add_power(1.0, 1.0, 0.0, 10.0);
  Rng rng(66);
  CHECK_THROWS_AS((void)momentbounds::check_pos_bound(heavy, 1.5, 100, rng), ParameterError);
  CHECK_THROWS_AS(PosLevySpec().add_atom(-1.0, 1.0), ParameterError);
  CHECK_THROWS_AS(PosLevySpec().add_power(1.0, 0.0, 1.0, 2.0), ParameterError);
  PosLevySpec ok;
  ok.add_atom(1.0, 1.0);
  CHECK_THROWS_AS((void)momentbounds::check_pos_bound(ok, 2.5, 100, rng), ParameterError);
  CHECK_THROWS_AS((void)momentbounds::check_sym_bound(SymLevySpec(ok), 1.5, 100, rng), ParameterError);
}

TEST_CASE("calibration reports holdout violations") {
  std::vector<momentbounds::BoundReport> cal(10), hold(2);
  for (std::size_t i = 0; i < cal.size(); ++i) {
    cal[i].ratio = 0.5 + 0.03 * static_cast<double>(i);
    cal[i].ratio_se = 0.01;
  }
  hold[0].ratio = 0.8;
  hold[0].ratio_se = 0.01;
  hold[1].ratio = 0.9;
  hold[1].ratio_se = 0.01;
  const auto c = momentbounds::calibrate_cp(cal, hold);
  CHECK(c.constant == doctest::Approx(0.77));
  CHECK(c.argmax == 9);
  CHECK(c.holdout_excess[0] == doctest::Approx(0.03 / std::hypot(0.01, 0.01)));
  REQUIRE(c.violations.size() == 2);
  CHECK_FALSE(c.passed());
  cal.pop_back();
  CHECK_THROWS_AS((void)momentbounds::calibrate_cp(cal, hold), ParameterError);
}

TEST_CASE("standard family") {
  const auto fam = momentbounds::standard_family();
  CHECK(fam.members.size() == 10);
  CHECK(fam.holdout.size() == 5);
  CHECK(fam.names.size() == 10);
  for (const auto& m : fam.members) CHECK_NOTHROW(m.validate());
  for (const auto& m : fam.holdout) CHECK_NOTHROW(SymLevySpec(m).validate());
}

TEST_CASE("truncation study uses common random numbers") {
  PosLevySpec half;
  half.add_power(1.0, 1.0, 0.0, 10.0);
  Rng rng(67);
  const auto steps = momentbounds::truncation_study(SymLevySpec(half), 2.5, {1.0, 4.0, 16.0}, 5000, rng);
  REQUIRE(steps.size() == 3);
  for (const auto& s : steps) {
    CHECK(std::isfinite(s.report.lhs));
    CHECK(s.report.ratio > 0.0);
  }
}
