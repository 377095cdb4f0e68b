#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "nullrec/chains.hpp"
#include "nullrec/errors.hpp"
#include "nullrec/stats.hpp"
#include "oracles.hpp"

using namespace nullrec;
using chains::RenewalChain;

namespace {

/// Renewal sequence u_k from the jump law P(J = j) = P(J > j-1) - P(J > j).
std::vector<double> renewal_sequence(const RenewalChain& c, std::size_t k_max) {
  std::vector<double> p(k_max + 2, 0.0), u(k_max + 1, 0.0);
  for (std::size_t j = 1; j < p.size(); ++j) p[j] = c.survival(j - 1.0) - c.survival(static_cast<double>(j));
  u[0] = 1.0;
  for (std::size_t k = 1; k <= k_max; ++k) {
    for (std::size_t j = 1; j <= k; ++j) u[k] += p[j] * u[k - j];
  }
  return u;
}

}  // namespace

TEST_CASE("renewal lag terms agree with a first-renewal decomposition") {
  const RenewalChain chain(RenewalChain::Family::power, 0.5, 1.0, 2, 1 << 14);
  const auto f = chains::two_atom_mean_zero(chain);
  constexpr std::size_t k_max = 300;
  const auto u = renewal_sequence(chain, k_max + 1);
  const auto pj = [&](std::size_t j) { return chain.survival(j - 1.0) - chain.survival(static_cast<double>(j)); };
  // P^k(0,1) = sum_{m<k} u_m P(J = k - m + 1); P^k(1,0) = u_{k-1}; P^k(1,1) = P^{k-1}(0,1).
  const auto p01 = [&](std::size_t k) {
    double s = 0.0;
    for (std::size_t m = 0; m < k; ++m) s += u[m] * pj(k - m + 1);
    return s;
  };
  const double pi0 = chain.survival(0.0), pi1 = chain.survival(1.0);
  CHECK(chain.atom_weight(0) == doctest::Approx(pi0));
  CHECK(chain.atom_weight(1) == doctest::Approx(pi1));
  const auto lags = chain.exact_lag_terms(f.values, k_max);
  REQUIRE(lags);
  REQUIRE(lags->size() == k_max + 1);
  const double f0 = f.values[0], f1 = f.values[1];
  CHECK((*lags)[0] == doctest::Approx(pi0 * f0 * f0 + pi1 * f1 * f1).epsilon(1e-12));
  for (std::size_t k = 1; k <= k_max; ++k) {
    const double p00 = u[k], p10 = u[k - 1], p11 = k == 1 ? 0.0 : p01(k - 1);
    const double c = pi0 * f0 * (p00 * f0 + p01(k) * f1) + pi1 * f1 * (p10 * f0 + p11 * f1);
    CHECK((*lags)[k] == doctest::Approx(c).epsilon(1e-9).scale(1e-12));
  }
}

TEST_CASE("exact renewal a_n against Monte Carlo") {
  const auto chain = chains::builtin_renewal_chain(0.5);
  constexpr long long n = 1000;
  Rng rng(31);
  const auto est = chains::estimate_an(*chain, n, 20000, rng);
  REQUIRE(est.exact);
  CHECK(std::abs(est.estimate - *est.exact) < 5.0 * est.std_error);
}

TEST_CASE("exact wandering rate sums the invariant measure of states reaching D") {
  const auto chain = chains::builtin_renewal_chain(0.5);
  const auto* r = dynamic_cast<const RenewalChain*>(chain.get());
  REQUIRE(r != nullptr);
  constexpr long long n = 5000;
  double s = 0.0;
  for (long long m = 0; m <= n + 1; ++m) s += r->survival(static_cast<double>(m));
  CHECK(*chain->exact_wandering(n) == doctest::Approx(s).epsilon(1e-12));
}

TEST_CASE("wandering-rate constant n / (a_n w_n) approaches Gamma(1+beta) Gamma(2-beta)") {
  for (const double beta : {0.3, 0.5, 0.7}) {
    const auto chain = chains::builtin_renewal_chain(beta);
    constexpr long long n = 100000;
    const double ratio = static_cast<double>(n) / (*chain->exact_an(n) * *chain->exact_wandering(n));
    const double target = std::tgamma(1.0 + beta) * std::tgamma(2.0 - beta);
    CHECK(ratio == doctest::Approx(target).epsilon(0.05));
  }
  CHECK(std::tgamma(1.5) * std::tgamma(1.5) == doctest::Approx(std::numbers::pi / 4.0));
}

TEST_CASE("Gaussian walk occupation: a_n / sqrt(n) tends to sqrt(2/pi)") {
  constexpr long long n = 10000;
  const double exact = oracle::gaussian_walk_an(n);
  const double target = std::sqrt(2.0 / std::numbers::pi);
  CHECK(exact / std::sqrt(static_cast<double>(n)) == doctest::Approx(target).epsilon(0.03));
  const auto chain = chains::builtin_gaussian_walk();
  Rng rng(32);
  const auto est = chains::estimate_an(*chain, n, 500, rng);
  CHECK(std::abs(est.estimate - exact) < 5.0 * est.std_error);
  // The reference 1/sqrt(2 pi) is off by a factor of two.
  CHECK(std::abs(est.estimate / std::sqrt(static_cast<double>(n)) - 1.0 / std::sqrt(2.0 * std::numbers::pi)) >
        0.3);
}

TEST_CASE("simple random walk occupation of {0, 1}") {
  constexpr long long n = 2000;
  // From either atom exactly one of {0, 1} is reachable at each step.
  double visits = 0.0;
  for (long long k = 1; k <= n; ++k) {
    const long long j = (k + 1) / 2;
    visits += std::exp(std::lgamma(k + 1.0) - std::lgamma(j + 1.0) - std::lgamma(k - j + 1.0) -
                       k * std::log(2.0));
  }
  const double exact = visits / 2.0;
  const auto chain = chains::builtin_ssrw_chain();
  Rng rng(33);
  const auto est = chains::estimate_an(*chain, n, 20000, rng);
  CHECK(std::abs(est.estimate - exact) < 5.0 * est.std_error);
}

TEST_CASE("finite chain sigma_f^2 matches the fundamental-matrix formula") {
  const std::vector<std::vector<double>> p{
      {0.1, 0.6, 0.3, 0.0}, {0.4, 0.2, 0.2, 0.2}, {0.3, 0.3, 0.1, 0.3}, {0.25, 0.25, 0.25, 0.25}};
  const auto chain = std::make_shared<chains::FiniteChain>(p, 2);
  Eigen::Matrix4d P;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) P(i, j) = p[i][j];
  const auto& pi = chain->stationary();
  Eigen::Vector4d piv(pi[0], pi[1], pi[2], pi[3]);
  CHECK((piv.transpose() * P - piv.transpose()).norm() < 1e-12);
  CHECK(piv.sum() == doctest::Approx(1.0));

  const auto f = chains::two_atom_mean_zero(*chain);
  Eigen::Vector4d fv(f.values[0], f.values[1], 0.0, 0.0);
  const Eigen::Matrix4d Z = (Eigen::Matrix4d::Identity() - P + Eigen::Vector4d::Ones() * piv.transpose()).inverse();
  const Eigen::Matrix4d Pi = piv.asDiagonal();
  const double oracle_sigma2 =
      fv.dot(Pi * fv) + 2.0 * fv.dot(Pi * (Z - Eigen::Matrix4d::Identity()) * fv);
  Rng rng(34);
  const auto rep = chains::sigma_f(*chain, f, 4096, rng);
  CHECK(rep.exact);
  CHECK(rep.sigma2 == doctest::Approx(oracle_sigma2).epsilon(2e-3));
}

TEST_CASE("test functions") {
  const auto chain = chains::builtin_renewal_chain(0.5);
  CHECK_NOTHROW(chains::two_atom_mean_zero(*chain).validate(*chain));
  CHECK_THROWS_AS((chains::FSpec{{1.0, 1.0}}.validate(*chain)), ParameterError);
  CHECK_THROWS_AS((chains::FSpec{{1.0}}.validate(*chain)), ParameterError);
  const auto f = chains::two_atom_mean_zero(*chain);
  CHECK(f.scaled(2.0).values[1] == doctest::Approx(2.0 * f.values[1]));
}

TEST_CASE("chain runs record consistent partial sums and returns") {
  const auto chain = chains::builtin_renewal_chain(0.5);
  const auto f = chains::two_atom_mean_zero(*chain);
  Rng rng(35);
  const auto run = chains::run_chain(*chain, 0.0, 5000, f, rng);
  double s = 0.0;
  for (std::size_t k = 1; k < run.states.size(); ++k) {
    s += f(*chain, run.states[k]);
    CHECK(run.partial_sums.values[k] == doctest::Approx(s));
  }
  double excursions = run.record.boundary;
  for (const double e : run.record.excursions) excursions += e;
  CHECK(excursions == doctest::Approx(s));
  CHECK(run.record.local_time(5000) == static_cast<long long>(run.record.tau.size()));

  // Jumping between visits gives the same law as stepping.
  constexpr std::size_t reps = 4000;
  std::vector<double> a(reps), b(reps);
  const std::vector<long long> times{2000};
  const Rng m1(36), m2(37);
  for (std::size_t i = 0; i < reps; ++i) {
    Rng r = m1.split(i);
    chains::partial_sums_at(*chain, 0.0, f, times, std::span<double>(&a[i], 1), r);
    Rng q = m2.split(i);
    b[i] = chains::run_chain(*chain, 0.0, 2000, f, q).partial_sums.values.back();
  }
  CHECK(stats::ks_two_sample(a, b) < oracle::ks_critical(reps, reps));
}

TEST_CASE("resolvent chain gaps are geometric") {
  const auto base = chains::builtin_ssrw_chain();
  const auto res = chains::resolvent_chain(base, 0.75);
  const auto* rc = dynamic_cast<const chains::ResolventChain*>(res.get());
  REQUIRE(rc != nullptr);
  Rng rng(38);
  constexpr std::size_t n = 100000;
  std::vector<double> g(n);
  for (auto& x : g) x = static_cast<double>(rc->sample_gap(rng));
  const auto est = stats::mean_and_stderr(g);
  CHECK(std::abs(est.mean - 4.0) < 5.0 * est.std_error);
  CHECK_THROWS_AS((void)chains::resolvent_chain(base, 1.0), ParameterError);
}

TEST_CASE("hitting times") {
  const auto chain = chains::builtin_renewal_chain(0.5);
  Rng rng(39);
  CHECK(chains::hitting_time(*chain, 0.0, 10, rng) == 0);
  CHECK(chains::hitting_time(*chain, 50.0, 100, rng) == 49);
  CHECK(chains::hitting_time(*chain, 500.0, 100, rng) == -1);
}
