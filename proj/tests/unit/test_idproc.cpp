#include <cmath>
#include <vector>

#include "doctest.h"
#include "nullrec/chains.hpp"
#include "nullrec/errors.hpp"
#include "nullrec/idproc.hpp"
#include "oracles.hpp"

using namespace nullrec;

namespace {

idproc::IdProcessSpec renewal_spec(double alpha, long long n) {
  idproc::IdProcessSpec spec;
  spec.chain = chains::builtin_renewal_chain(0.5);
  spec.f = chains::two_atom_mean_zero(*spec.chain);
  spec.levy = stable::LevyTailSpec::pure_stable(alpha);
  spec.n = n;
  return spec;
}

}  // namespace

TEST_CASE("c_n = C_alpha^{-1/alpha} sqrt(a_n) rho^{<-}(1/mu(tau_D <= n))") {
  for (const double alpha : {0.8, 1.5}) {
    const auto spec = renewal_spec(alpha, 10000);
    Rng rng(51);
    const auto r = idproc::compute_cn(spec, rng);
    const double an = *spec.chain->exact_an(spec.n);
    const double mu = *spec.chain->exact_wandering(spec.n);
    // pure stable: rho^{<-}(y) = y^{-1/alpha}.
    const double cn = std::pow(oracle::tail_constant(alpha), -1.0 / alpha) * std::sqrt(an) * std::pow(mu, 1.0 / alpha);
    CHECK(r.exact);
    CHECK(r.c_n == doctest::Approx(cn).epsilon(1e-12));
    CHECK(r.consistency == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("c_n is regularly varying with index beta/2 + (1-beta)/alpha") {
  constexpr double alpha = 0.8;
  std::vector<double> lx, ly;
  for (const long long n : {1000LL, 10000LL, 100000LL}) {
    Rng rng(52);
    lx.push_back(std::log(static_cast<double>(n)));
    ly.push_back(std::log(idproc::compute_cn(renewal_spec(alpha, n), rng).c_n));
  }
  const double slope = (ly.back() - ly.front()) / (lx.back() - lx.front());
  CHECK(slope == doctest::Approx(0.25 + 0.5 / alpha).epsilon(0.03));
}

TEST_CASE("partial-sum paths are linear in f on identical seeds") {
  auto spec = renewal_spec(0.8, 2000);
  const std::vector<double> grid{0.0, 0.25, 0.5, 1.0};
  idproc::SeriesOptions opt;
  opt.terms = 50;
  opt.pilot_paths = 500;
  Rng a(53), b(53);
  Rng ba(54), bb(54);
  const auto budget_a = stable::SeriesBudget::draw(50, ba);
  const auto budget_b = stable::SeriesBudget::draw(50, bb);
  const auto p1 = idproc::sample_partial_sum_path(spec, grid, budget_a, a, opt);
  spec.f = spec.f.scaled(2.0);
  const auto p2 = idproc::sample_partial_sum_path(spec, grid, budget_b, b, opt);
  REQUIRE(p1.values.size() == grid.size());
  CHECK(p1.values[0] == 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(p2.values[i] == doctest::Approx(2.0 * p1.values[i]).epsilon(1e-10).scale(1e-12));
  }
}

TEST_CASE("serial and parallel FCLT ensembles are bit-identical") {
  const auto spec = renewal_spec(1.5, 1000);
  idproc::FcltOptions opt;
  opt.times = {0.5, 1.0};
  opt.thetas = {-1.0, 0.5, 2.0};
  opt.lhs.terms = 30;
  opt.lhs.pilot_paths = 300;
  opt.rhs.terms = 30;
  opt.exec = Execution::serial;
  Rng r1(55);
  const auto serial = idproc::fclt_experiment(spec, 200, opt, r1);
  opt.exec = Execution::parallel;
  set_thread_count(4);
  Rng r2(55);
  const auto parallel = idproc::fclt_experiment(spec, 200, opt, r2);
  CHECK(serial.lhs == parallel.lhs);
  CHECK(serial.rhs == parallel.rhs);
  CHECK(serial.max_cf_gap == parallel.max_cf_gap);
}

TEST_CASE("spec validation") {
  auto spec = renewal_spec(0.8, 1000);
  spec.f = chains::FSpec{{1.0, 1.0}};
  Rng rng(56);
  CHECK_THROWS_AS((void)idproc::compute_cn(spec, rng), ParameterError);
  spec = renewal_spec(0.8, 0);
  CHECK_THROWS_AS(spec.validate(), ParameterError);
  spec = renewal_spec(0.8, 1000);
  spec.horizon = -1.0;
  CHECK_THROWS_AS(spec.validate(), ParameterError);
}
