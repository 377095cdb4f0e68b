#pragma once

// Symmetric alpha-stable sampling and LePage series.
//
// Convention: an SaS variable with scale s has CF exp(-s^alpha |theta|^alpha).
// For alpha = 2 this is N(0, 2 s^2).

#include <functional>
#include <string>
#include <vector>

#include "nullrec/errors.hpp"
#include "nullrec/rng.hpp"

namespace nullrec::stable {

/// Chambers-Mallows-Stuck symmetric alpha-stable variate, 0 < alpha <= 2.
[[nodiscard]] double sample_sas(double alpha, double scale, Rng& rng);

/// C_alpha = (1-alpha) / (Gamma(2-alpha) cos(pi alpha / 2)), 2/pi at alpha = 1.
[[nodiscard]] double tail_constant(double alpha);

/// E|X|^p for X SaS(gamma) with unit scale (gamma < 2), or for a standard
/// normal when gamma = 2 and `standard_gaussian` is set. Requires p < gamma (gamma < 2).
[[nodiscard]] double sas_abs_moment(double gamma, double p, bool standard_gaussian);

enum class TailKind { pure_stable, pareto_cutoff, user_defined };

[[nodiscard]] std::string to_string(TailKind kind);
[[nodiscard]] TailKind tail_kind_from_string(const std::string& name);

/// One-sided tail rho(x, inf) of a symmetric local Levy measure.
class LevyTailSpec {
 public:
  /// rho(x, inf) = x^{-alpha}.
  static LevyTailSpec pure_stable(double alpha);
  /// rho(x, inf) = min(1, x^{-alpha}).
  static LevyTailSpec pareto_cutoff(double alpha);
  /// Arbitrary nonincreasing tail; its inverse is found by bisection.
  static LevyTailSpec user_defined(double alpha, double p0, std::function<double(double)> tail);

  [[nodiscard]] TailKind kind() const noexcept { return kind_; }
  [[nodiscard]] double alpha() const noexcept { return alpha_; }
  [[nodiscard]] double p0() const noexcept { return p0_; }

  [[nodiscard]] double tail(double x) const;

  /// rho^{<-}(y) = inf{x >= 0 : rho(x, inf) <= y}.
  [[nodiscard]] double inverse(double y) const;

  /// int_{y0}^inf rho^{<-}(y)^2 dy (variance of the discarded series terms per
  /// unit arrival rate).
  [[nodiscard]] double inverse_square_tail(double y0) const;

  /// Numerical check of x^{p0} rho(x, inf) -> 0 on a grid approaching 0.
  [[nodiscard]] bool small_tail_condition_holds() const;

 private:
  LevyTailSpec(TailKind kind, double alpha, double p0, std::function<double(double)> tail)
      : kind_(kind), alpha_(alpha), p0_(p0), tail_(std::move(tail)) {}

  TailKind kind_;
  double alpha_;
  double p0_;
  std::function<double(double)> tail_;
};

[[nodiscard]] inline double levy_tail_inverse(const LevyTailSpec& spec, double y) {
  return spec.inverse(y);
}

/// Arrival times and signs of a LePage series. Marks are drawn by the caller
/// from a separate stream so that the first J terms do not depend on J.
struct SeriesBudget {
  std::size_t J = 0;
  std::vector<double> arrivals;
  std::vector<int> signs;

  static SeriesBudget draw(std::size_t J, Rng& rng);
};

/// C_alpha^{1/alpha} sum_j eps_j (Gamma_j / total_mass)^{-1/alpha} integrand(mark_j).
/// `mark_sampler(rng)` draws a mark; marks use `mark_rng`.
template <class Integrand, class MarkSampler>
[[nodiscard]] double lepage_sas_integral(Integrand&& integrand, MarkSampler&& mark_sampler,
                                         double total_mass, double alpha,
                                         const SeriesBudget& budget, Rng& mark_rng) {
  require(total_mass > 0.0, "lepage_sas_integral: total mass must be positive");
  require(alpha > 0.0 && alpha < 2.0, "lepage_sas_integral: alpha must lie in (0,2)");
  require(budget.J >= 1, "lepage_sas_integral: budget needs at least one term");
  const double c = std::pow(tail_constant(alpha) * total_mass, 1.0 / alpha);
  double sum = 0.0;
  for (std::size_t j = 0; j < budget.J; ++j) {
    const auto mark = mark_sampler(mark_rng);
    sum += budget.signs[j] * std::pow(budget.arrivals[j], -1.0 / alpha) * integrand(mark);
  }
  return c * sum;
}

}  // namespace nullrec::stable
