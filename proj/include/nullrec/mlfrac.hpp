#pragma once

// Stable subordinators and their inverses (Mittag-Leffler processes).
//
// Conventions: S_beta is the beta-stable subordinator with
// E exp(-theta S(t)) = exp(-t theta^beta). M_beta(t) = inf{u : S(u) >= t}.
// Boundary cases: M_0(t) = E_st for t > 0 (standard exponential), M_1(t) = t.

#include <span>
#include <vector>

#include "nullrec/rng.hpp"
#include "nullrec/sample_path.hpp"

namespace nullrec::mlfrac {

/// Beta parameter of a Mittag-Leffler process, 0 <= beta <= 1.
class MLParams {
 public:
  explicit MLParams(double beta);
  [[nodiscard]] double beta() const noexcept { return beta_; }

 private:
  double beta_;
};

/// Positive strictly beta-stable variate with Laplace transform exp(-theta^beta)
/// (Kanter's representation). Requires 0 < beta < 1.
[[nodiscard]] double sample_positive_stable(double beta, Rng& rng);

/// Subordinator on a grid: independent increments (t-s)^{1/beta} S.
[[nodiscard]] SamplePath sample_stable_subordinator(double beta, std::span<const double> grid,
                                                    Rng& rng);

/// First passage of a fresh subordinator above `level`:
/// time = M(level), overshoot = S(M(level)) - level.
struct FirstPassage {
  double time = 0.0;
  double overshoot = 0.0;
};

/// Exact joint draw of (M(level), overshoot) for 0 < beta < 1, level > 0.
///
/// The undershoot Y = S(M(level)-) satisfies Y/level ~ Beta(beta, 1-beta); given
/// Y the jump is Pareto beyond level - Y, and M(level) = (Y/V)^beta with V having
/// density proportional to v^{-beta} p_1(v), p_1 the unit positive stable density.
[[nodiscard]] FirstPassage sample_first_passage(double beta, double level, Rng& rng);

/// Mittag-Leffler path on a grid together with the subordinator level reached at
/// each grid time (levels[i] = S(M(grid[i])) >= grid[i]).
struct MLPath {
  SamplePath path;
  std::vector<double> levels;
};

/// Exact Mittag-Leffler path on an increasing grid (not required to start at 0).
/// Walks the grid left to right; whenever a grid time exceeds the current
/// subordinator level the strong Markov property restarts a fresh first passage.
[[nodiscard]] MLPath sample_mittag_leffler_levels(const MLParams& params,
                                                  std::span<const double> times, Rng& rng);

/// Mittag-Leffler path M_beta(t) on a validated grid (grid[0] = 0).
[[nodiscard]] SamplePath sample_mittag_leffler(const MLParams& params,
                                               std::span<const double> grid, Rng& rng);

/// Values of M_beta at arbitrary nondecreasing times (>= 0), written into `out`.
/// Hot-path variant used by the limit samplers; no allocation.
void mittag_leffler_at(double beta, std::span<const double> times, std::span<double> out,
                       Rng& rng);

/// Serial reference: simulate S on a u-skeleton with step `step` and invert it.
/// M(t) is the first skeleton point with S >= t, so the inversion error is at
/// most `step`. Returns the skeleton too so inversion identities can be checked.
struct SkeletonInversion {
  SamplePath ml;          // M on the requested grid
  SamplePath subordinator;  // S on the u-skeleton
};

[[nodiscard]] SkeletonInversion invert_subordinator_skeleton(double beta,
                                                             std::span<const double> grid,
                                                             double step, Rng& rng);

/// E M_beta(t)^q = t^{q beta} Gamma(1+q) / Gamma(1+q beta), 0 < beta <= 1, q > 0.
[[nodiscard]] double ml_moment(double beta, double q, double t);

/// Overshoot of level r by the subordinator:
/// density (sin(beta pi)/pi) r^beta (r+x)^{-1} x^{-beta}, x > 0.
///
/// Inverse-CDF sampler on a tabulated quadrature of the r = 1 density with
/// 4096 log-spaced nodes, analytic power-law head below the first node and
/// analytic Pareto tail beyond the last. Immutable after construction.
class OvershootSampler {
 public:
  explicit OvershootSampler(double beta, std::size_t nodes = 4096);

  [[nodiscard]] double beta() const noexcept { return beta_; }

  /// Tabulated CDF of delta_1.
  [[nodiscard]] double cdf(double x) const;

  /// Density of delta_1.
  [[nodiscard]] double density(double x) const;

  /// Total mass of the tabulated density (head + nodes + tail).
  [[nodiscard]] double total_mass() const noexcept { return total_mass_; }

  /// delta_r = r * delta_1.
  [[nodiscard]] double sample(double r, Rng& rng) const;

  [[nodiscard]] double quantile(double p) const;

 private:
  double beta_;
  double norm_;  // sin(beta pi) / pi
  std::vector<double> log_x_;
  std::vector<double> cdf_;
  double total_mass_ = 0.0;
};

}  // namespace nullrec::mlfrac
