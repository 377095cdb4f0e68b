#pragma once

// Limit objects: sqrt(Gamma(beta+1)) sigma_f B(M_beta(t)), its entrance-time
// variant, and the self-similar class Y_{alpha,beta,gamma}.
//
// Y(t) = int S_gamma(M_beta((t-x)_+))(w') dZ(w', x), Z SaS(alpha) with control
// measure P' x nu_beta, nu_beta(dx) = (1-beta) x^{-beta} dx. Inside
// Y_{alpha,beta,2} the endpoint S_2 is a standard Brownian motion.

#include <span>
#include <vector>

#include "nullrec/rng.hpp"
#include "nullrec/sample_path.hpp"
#include "nullrec/stable.hpp"

namespace nullrec::limits {

class YParams {
 public:
  YParams(double alpha, double beta, double gamma);
  [[nodiscard]] double alpha() const noexcept { return alpha_; }
  [[nodiscard]] double beta() const noexcept { return beta_; }
  [[nodiscard]] double gamma() const noexcept { return gamma_; }
  /// H = beta/gamma + (1-beta)/alpha.
  [[nodiscard]] double hurst() const noexcept { return beta_ / gamma_ + (1.0 - beta_) / alpha_; }

 private:
  double alpha_, beta_, gamma_;
};

/// How the SaS random measure is normalized.
/// characteristic: E exp(i theta Z(A)) = exp(-m(A) |theta|^alpha); the Levy
///   measure of Z(A) has one-sided tail C_alpha m(A) x^{-alpha} / 2.
/// tail: the Levy measure has one-sided tail C_alpha m(A) x^{-alpha}, which
///   doubles the exponent, i.e. multiplies Y by 2^{1/alpha}. This is the
///   normalization reached by the partial sums c_n^{-1} sum X_k.
enum class ControlScale { characteristic, tail };

[[nodiscard]] double control_scale_factor(ControlScale scale, double alpha);

struct YOptions {
  std::size_t terms = 1000;
  /// Add the conditional-LLN approximation of the discarded series tail.
  bool remainder = true;
  ControlScale scale = ControlScale::characteristic;
};

/// E|S_gamma(1)|^p for the endpoint used inside Y (standard BM when gamma = 2).
[[nodiscard]] double endpoint_abs_moment(double gamma, double p);

/// One increment of the endpoint process over a time span dt >= 0.
[[nodiscard]] double endpoint_increment(double gamma, double dt, Rng& rng);

/// sqrt(Gamma(beta+1)) sigma_f B(M_beta(t)) on a grid.
[[nodiscard]] SamplePath sample_bm_ml(double beta, double sigma_f, std::span<const double> grid,
                                      Rng& rng);

struct EntranceSample {
  SamplePath path;
  double entrance = 0.0;  // T = L U^{1/(1-beta)}, 0 when beta = 1
};

/// sqrt(Gamma(beta+1)) sigma_f B(M_beta((t-T)_+)), P(T <= x) = (x/L)^{1-beta}.
[[nodiscard]] EntranceSample sample_entrance_limit(double beta, double sigma_f, double L,
                                                   std::span<const double> grid, Rng& rng);

/// LePage realization of Y on nondecreasing times in [0, horizon], written
/// into `out`. Terms draw marks from `rng.split(j + 1)`; arrivals and signs
/// come from `rng.split(0)`, so the first J terms do not depend on J.
void sample_Y_at(const YParams& params, std::span<const double> times, double horizon,
                 const YOptions& options, std::span<double> out, Rng& rng);

/// Y on a validated grid with horizon grid.back(), using the supplied budget.
/// The discarded tail is approximated when `options.remainder` is set.
[[nodiscard]] SamplePath sample_Y(const YParams& params, std::span<const double> grid,
                                  const stable::SeriesBudget& budget, const YOptions& options,
                                  Rng& rng);

/// Direct draw of Y_{alpha,1,gamma}(t) = W^{1/gamma} S_gamma(t): W positive
/// (alpha/gamma)-stable, normalized so the law equals the beta = 1 series.
[[nodiscard]] double sample_substable(const YParams& params, double t, ControlScale scale,
                                      Rng& rng);

struct CfOptions {
  std::size_t inner_samples = 4000;
  /// Maximum relative standard error of the exponent.
  double rel_tol = 0.02;
  ControlScale scale = ControlScale::characteristic;
};

struct CfValue {
  double cf = 1.0;
  double exponent = 0.0;
  double exponent_se = 0.0;
};

/// E exp(i sum_j theta_j Y(t_j)) by outer 30-point Gauss-Legendre quadrature
/// in x^{1-beta} between consecutive times, inner Monte Carlo over M_beta
/// with S_gamma integrated out in closed form. Requires 0 < beta < 1.
/// PrecisionError when the exponent's relative standard error exceeds rel_tol.
[[nodiscard]] CfValue analytic_cf_Y(const YParams& params, std::span<const double> times,
                                    std::span<const double> thetas, const CfOptions& options,
                                    Rng& rng);

}  // namespace nullrec::limits
