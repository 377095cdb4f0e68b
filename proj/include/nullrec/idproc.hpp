#pragma once

// Stationary symmetric ID process X_k = int f(x_k) dM over the chain's path
// space, its normalization c_n, and normalized partial-sum paths built from
// the series sum_j eps_j rho^{<-}(Gamma_j / (2 mu(tau_D <= n))) S^_{nt}(f)(V_j),
// V_j i.i.d. from mu_n.

#include <memory>
#include <span>
#include <vector>

#include "nullrec/chains.hpp"
#include "nullrec/limits.hpp"
#include "nullrec/parallel.hpp"
#include "nullrec/sample_path.hpp"
#include "nullrec/stable.hpp"

namespace nullrec::idproc {

struct IdProcessSpec {
  chains::ChainPtr chain;
  chains::FSpec f;
  stable::LevyTailSpec levy = stable::LevyTailSpec::pure_stable(1.0);
  long long n = 1000;
  double horizon = 1.0;  // L
  /// Replicates for Monte Carlo a_n / wandering estimates when no closed form exists.
  std::size_t estimator_replicates = 20000;

  void validate() const;
};

struct NormalizationReport {
  double a_n = 0.0;
  double mu_tau_n = 0.0;
  double C_alpha = 0.0;
  double rho_inv_value = 0.0;
  double c_n = 0.0;
  /// rho(c_n a_n^{-1/2}, inf) mu(tau_D <= n) / C_alpha, close to 1 for large n.
  double consistency = 0.0;
  bool exact = false;
};

/// c_n = C_alpha^{-1/alpha} a_n^{1/2} rho^{<-}(1 / mu(tau_D <= n)).
[[nodiscard]] NormalizationReport compute_cn(const IdProcessSpec& spec, Rng& rng);

struct SeriesOptions {
  std::size_t terms = 1000;
  /// Gaussian approximation of the discarded terms, with covariance
  /// 2 mu int_{Gamma_J/(2 mu)}^inf rho^{<-}(y)^2 dy E_{mu_n}[S^_s S^_t].
  bool remainder = true;
  std::size_t pilot_paths = 20000;
};

/// Reusable state for repeated partial-sum paths on fixed times: mu_{nL}
/// sampler, normalization, integer evaluation times and the remainder factor.
class PartialSumSampler {
 public:
  PartialSumSampler(const IdProcessSpec& spec, std::span<const double> grid,
                    const SeriesOptions& options, Rng& rng);

  /// c_n^{-1} sum_{k <= n t} X_k at the grid times (linear interpolation).
  void sample(std::span<double> out, Rng& rng) const;
  /// Same, from a supplied budget (its J overrides options.terms).
  void sample(const stable::SeriesBudget& budget, std::span<double> out, Rng& rng) const;

  [[nodiscard]] const NormalizationReport& normalization() const noexcept { return norm_; }
  [[nodiscard]] const std::vector<double>& grid() const noexcept { return grid_; }
  /// E_{mu_n}[S^_{nt}(f)^2] / a_n at the grid times (pilot estimate).
  [[nodiscard]] const std::vector<double>& pilot_second_moment() const noexcept { return pilot_diag_; }
  /// Expected variance of the discarded terms at the last grid time, in c_n units,
  /// for a typical Gamma_J = J.
  [[nodiscard]] double remainder_variance() const noexcept { return remainder_var_; }

 private:
  void path_at(const chains::StartSampler& sampler, std::span<double> buf, Rng& rng) const;

  IdProcessSpec spec_;
  SeriesOptions options_;
  NormalizationReport norm_;
  std::vector<double> grid_;
  std::vector<long long> ticks_;  // sorted integer times floor/ceil of n t
  std::vector<std::size_t> lo_, hi_;
  std::vector<double> frac_;
  std::unique_ptr<chains::StartSampler> mu_sampler_;
  double two_mu_ = 0.0;
  std::vector<double> pilot_diag_;
  std::vector<double> chol_;  // square root of the pilot covariance on ticks, column-major
  double remainder_var_ = 0.0;
};

/// One normalized partial-sum path on a validated grid in [0, L].
[[nodiscard]] SamplePath sample_partial_sum_path(const IdProcessSpec& spec,
                                                 std::span<const double> grid,
                                                 const stable::SeriesBudget& budget, Rng& rng,
                                                 const SeriesOptions& options = {});

struct FcltOptions {
  std::vector<double> times{0.25, 0.5, 1.0};
  std::vector<double> thetas;  // default: 61 points on [-3, 3]
  SeriesOptions lhs;
  limits::YOptions rhs{.scale = limits::ControlScale::tail};
  Execution exec = Execution::parallel;
};

struct FcltReport {
  NormalizationReport norm;
  double sigma_f = 0.0;
  std::vector<double> times;
  std::vector<double> thetas;
  /// lhs[t][r], rhs[t][r] ensembles.
  std::vector<std::vector<double>> lhs, rhs;
  std::vector<double> max_cf_gap;  // per time
  std::vector<double> ks;          // per time
};

/// Ensembles of c_n^{-1} sum_{k <= n t} X_k against sqrt(Gamma(beta+1)) sigma_f Y_{alpha,beta,2}(t).
[[nodiscard]] FcltReport fclt_experiment(const IdProcessSpec& spec, std::size_t replicates,
                                         const FcltOptions& options, Rng& rng);

}  // namespace nullrec::idproc
