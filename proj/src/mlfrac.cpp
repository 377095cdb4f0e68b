#include "nullrec/mlfrac.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <boost/math/special_functions/gamma.hpp>

#include "nullrec/errors.hpp"

namespace nullrec::mlfrac {

namespace {

constexpr double kPi = std::numbers::pi;

// Zolotarev/Kanter function, increasing on (0, pi).
double kanter(double beta, double u) {
  const double num = std::pow(std::sin(beta * u), beta) * std::pow(std::sin((1.0 - beta) * u), 1.0 - beta);
  return std::pow(num / std::sin(u), 1.0 / (1.0 - beta));
}

double sample_gamma(double shape, Rng& rng) {
  std::gamma_distribution<double> g(shape, 1.0);
  return g(rng);
}

void check_open_beta(double beta) {
  require(beta > 0.0 && beta < 1.0, "beta must lie in (0,1)");
}

}  // namespace

MLParams::MLParams(double beta) : beta_(beta) {
  require(beta >= 0.0 && beta <= 1.0, "MLParams: beta must lie in [0,1]");
}

double sample_positive_stable(double beta, Rng& rng) {
  check_open_beta(beta);
  const double u = kPi * rng.uniform();
  const double e = rng.exponential();
  return std::pow(kanter(beta, u) / e, (1.0 - beta) / beta);
}

SamplePath sample_stable_subordinator(double beta, std::span<const double> grid, Rng& rng) {
  check_open_beta(beta);
  validate_grid(grid);
  SamplePath p;
  p.grid.assign(grid.begin(), grid.end());
  p.values.assign(grid.size(), 0.0);
  p.label = "S_beta";
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double dt = grid[i] - grid[i - 1];
    p.values[i] = p.values[i - 1] + std::pow(dt, 1.0 / beta) * sample_positive_stable(beta, rng);
  }
  return p;
}

FirstPassage sample_first_passage(double beta, double level, Rng& rng) {
  check_open_beta(beta);
  require(level > 0.0, "first passage level must be positive");
  // Undershoot.
  const double g1 = sample_gamma(beta, rng);
  const double g2 = sample_gamma(1.0 - beta, rng);
  const double y = level * g1 / (g1 + g2);
  // Jump across the level: Pareto(beta) beyond the remaining gap.
  const double z = y + (level - y) * std::pow(rng.uniform(), -1.0 / beta);
  // Time of the crossing jump: M = y^beta (E'/A(U'))^{1-beta}, with U' tilted by A^{beta-1}.
  const double a0 = (1.0 - beta) * std::pow(beta, beta / (1.0 - beta));
  double a;
  do {
    a = kanter(beta, kPi * rng.uniform());
  } while (rng.uniform() > std::pow(a / a0, beta - 1.0));
  const double e = sample_gamma(2.0 - beta, rng);
  const double time = std::pow(y, beta) * std::pow(e / a, 1.0 - beta);
  return {time, z - level};
}

MLPath sample_mittag_leffler_levels(const MLParams& params, std::span<const double> times,
                                    Rng& rng) {
  MLPath out;
  out.path.grid.assign(times.begin(), times.end());
  out.path.values.assign(times.size(), 0.0);
  out.levels.assign(times.size(), 0.0);
  out.path.label = "M_beta";
  const double beta = params.beta();
  if (beta == 1.0) {
    out.path.values = out.path.grid;
    out.levels = out.path.grid;
    return out;
  }
  if (beta == 0.0) {
    const double e = rng.exponential();
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (times[i] > 0.0) {
        out.path.values[i] = e;
        out.levels[i] = std::numeric_limits<double>::infinity();
      }
    }
    return out;
  }
  double m = 0.0;
  double level = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    require(i == 0 || t >= times[i - 1], "times must be nondecreasing");
    if (t > level) {
      const auto fp = sample_first_passage(beta, t - level, rng);
      m += fp.time;
      level = t + fp.overshoot;
    }
    out.path.values[i] = m;
    out.levels[i] = level;
  }
  return out;
}

SamplePath sample_mittag_leffler(const MLParams& params, std::span<const double> grid, Rng& rng) {
  validate_grid(grid);
  return sample_mittag_leffler_levels(params, grid, rng).path;
}

void mittag_leffler_at(double beta, std::span<const double> times, std::span<double> out,
                       Rng& rng) {
  require(out.size() == times.size(), "mittag_leffler_at: size mismatch");
  if (beta == 1.0) {
    std::copy(times.begin(), times.end(), out.begin());
    return;
  }
  if (beta == 0.0) {
    const double e = rng.exponential();
    for (std::size_t i = 0; i < times.size(); ++i) out[i] = times[i] > 0.0 ? e : 0.0;
    return;
  }
  double m = 0.0;
  double level = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    if (t > level) {
      const auto fp = sample_first_passage(beta, t - level, rng);
      m += fp.time;
      level = t + fp.overshoot;
    }
    out[i] = m;
  }
}

SkeletonInversion invert_subordinator_skeleton(double beta, std::span<const double> grid,
                                               double step, Rng& rng) {
  check_open_beta(beta);
  validate_grid(grid);
  require(step > 0.0, "skeleton step must be positive");
  SkeletonInversion out;
  out.ml.grid.assign(grid.begin(), grid.end());
  out.ml.values.assign(grid.size(), 0.0);
  out.ml.label = "M_beta (skeleton)";
  out.subordinator.label = "S_beta (skeleton)";
  out.subordinator.grid.push_back(0.0);
  out.subordinator.values.push_back(0.0);
  const double scale = std::pow(step, 1.0 / beta);
  double u = 0.0;
  double s = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    while (s < grid[i]) {
      u += step;
      s += scale * sample_positive_stable(beta, rng);
      out.subordinator.grid.push_back(u);
      out.subordinator.values.push_back(s);
    }
    out.ml.values[i] = u;
  }
  return out;
}

double ml_moment(double beta, double q, double t) {
  require(beta >= 0.0 && beta <= 1.0, "ml_moment: beta must lie in [0,1]");
  require(q > 0.0, "ml_moment: q must be positive");
  require(t >= 0.0, "ml_moment: t must be nonnegative");
  if (t == 0.0) return 0.0;
  return std::pow(t, q * beta) * std::exp(std::lgamma(1.0 + q) - std::lgamma(1.0 + q * beta));
}

// Overshoot of level 1. The density on u = log x is
// g(u) = c exp((1-beta) u) / (1 + exp(u)); tabulated by Simpson's rule per cell.
OvershootSampler::OvershootSampler(double beta, std::size_t nodes)
    : beta_(beta), norm_(std::sin(beta * kPi) / kPi) {
  check_open_beta(beta);
  require(nodes >= 16, "overshoot table needs at least 16 nodes");
  const double lo = std::log(1e-12);
  const double hi = std::log(1e12);
  log_x_.resize(nodes);
  cdf_.resize(nodes);
  const auto g = [&](double u) { return norm_ * std::exp((1.0 - beta_) * u) / (1.0 + std::exp(u)); };
  const double x0 = std::exp(lo);
  // Head: c * int_0^{x0} x^{-beta} (1 - x + ...) dx.
  double acc = norm_ * std::pow(x0, 1.0 - beta_) *
               (1.0 / (1.0 - beta_) - x0 / (2.0 - beta_));
  for (std::size_t i = 0; i < nodes; ++i) {
    const double u = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(nodes - 1);
    if (i > 0) {
      const double a = log_x_[i - 1];
      acc += (u - a) / 6.0 * (g(a) + 4.0 * g(0.5 * (a + u)) + g(u));
    }
    log_x_[i] = u;
    cdf_[i] = acc;
  }
  const double x1 = std::exp(hi);
  // Tail: c * int_{x1}^inf x^{-beta-1} (1 - 1/x + ...) dx.
  const double tail = norm_ * std::pow(x1, -beta_) * (1.0 / beta_ - 1.0 / ((1.0 + beta_) * x1));
  total_mass_ = acc + tail;
}

double OvershootSampler::density(double x) const {
  if (x <= 0.0) return 0.0;
  return norm_ * std::pow(x, -beta_) / (1.0 + x);
}

double OvershootSampler::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  const double u = std::log(x);
  if (u <= log_x_.front()) return norm_ * std::pow(x, 1.0 - beta_) / (1.0 - beta_) / total_mass_;
  if (u >= log_x_.back()) return 1.0 - norm_ * std::pow(x, -beta_) / beta_ / total_mass_;
  const auto it = std::upper_bound(log_x_.begin(), log_x_.end(), u);
  const auto i = static_cast<std::size_t>(it - log_x_.begin());
  const double w = (u - log_x_[i - 1]) / (log_x_[i] - log_x_[i - 1]);
  return ((1.0 - w) * cdf_[i - 1] + w * cdf_[i]) / total_mass_;
}

double OvershootSampler::quantile(double p) const {
  require(p > 0.0 && p < 1.0, "overshoot quantile needs p in (0,1)");
  const double mass = p * total_mass_;
  if (mass <= cdf_.front()) {
    return std::pow((1.0 - beta_) * mass / norm_, 1.0 / (1.0 - beta_));
  }
  if (mass >= cdf_.back()) {
    const double rest = total_mass_ - mass;
    return std::pow(norm_ / (beta_ * rest), 1.0 / beta_);
  }
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), mass);
  const auto i = static_cast<std::size_t>(it - cdf_.begin());
  const double w = (mass - cdf_[i - 1]) / (cdf_[i] - cdf_[i - 1]);
  return std::exp((1.0 - w) * log_x_[i - 1] + w * log_x_[i]);
}

double OvershootSampler::sample(double r, Rng& rng) const {
  require(r > 0.0, "overshoot level must be positive");
  return r * quantile(rng.uniform());
}

}  // namespace nullrec::mlfrac
