#include "nullrec/stable.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace nullrec::stable {

namespace {
constexpr double kPi = std::numbers::pi;
}

double sample_sas(double alpha, double scale, Rng& rng) {
  require(alpha > 0.0 && alpha <= 2.0, "sample_sas: alpha must lie in (0,2]");
  require(scale >= 0.0, "sample_sas: scale must be nonnegative");
  if (scale == 0.0) return 0.0;
  const double v = kPi * (rng.uniform() - 0.5);
  if (alpha == 1.0) return scale * std::tan(v);
  const double w = rng.exponential();
  const double x = std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha) *
                   std::pow(std::cos((1.0 - alpha) * v) / w, (1.0 - alpha) / alpha);
  return scale * x;
}

double tail_constant(double alpha) {
  require(alpha > 0.0 && alpha < 2.0, "tail_constant: alpha must lie in (0,2)");
  if (std::abs(alpha - 1.0) < 1e-6) return 2.0 / kPi;
  return (1.0 - alpha) / (std::tgamma(2.0 - alpha) * std::cos(kPi * alpha / 2.0));
}

double sas_abs_moment(double gamma, double p, bool standard_gaussian) {
  require(p > 0.0, "sas_abs_moment: p must be positive");
  require(gamma > 0.0 && gamma <= 2.0, "sas_abs_moment: gamma must lie in (0,2]");
  if (gamma == 2.0) {
    const double scale = standard_gaussian ? 1.0 : std::sqrt(2.0);
    return std::pow(scale, p) * std::pow(2.0, p / 2.0) * std::tgamma((1.0 + p) / 2.0) /
           std::sqrt(kPi);
  }
  require(p < gamma, "sas_abs_moment: p must be below gamma");
  return std::pow(2.0, p) * std::tgamma((1.0 + p) / 2.0) * std::tgamma(1.0 - p / gamma) /
         (std::sqrt(kPi) * std::tgamma(1.0 - p / 2.0));
}

std::string to_string(TailKind kind) {
  switch (kind) {
    case TailKind::pure_stable:
      return "pure_stable";
    case TailKind::pareto_cutoff:
      return "pareto_cutoff";
    case TailKind::user_defined:
      return "user_defined";
  }
  return "unknown";
}

TailKind tail_kind_from_string(const std::string& name) {
  if (name == "pure_stable") return TailKind::pure_stable;
  if (name == "pareto_cutoff") return TailKind::pareto_cutoff;
  if (name == "user_defined") return TailKind::user_defined;
  throw ParameterError("unknown levy kind '" + name + "'");
}

LevyTailSpec LevyTailSpec::pure_stable(double alpha) {
  require(alpha > 0.0 && alpha < 2.0, "levy alpha must lie in (0,2)");
  // x^{p0 - alpha} -> 0 needs p0 > alpha; take the midpoint of (alpha, 2).
  return {TailKind::pure_stable, alpha, 0.5 * (alpha + 2.0),
          [alpha](double x) { return x <= 0.0 ? INFINITY : std::pow(x, -alpha); }};
}

LevyTailSpec LevyTailSpec::pareto_cutoff(double alpha) {
  require(alpha > 0.0 && alpha < 2.0, "levy alpha must lie in (0,2)");
  // Finite total mass, so any p0 in (0,2) works; report 1.
  return {TailKind::pareto_cutoff, alpha, 1.0,
          [alpha](double x) { return x <= 1.0 ? 1.0 : std::pow(x, -alpha); }};
}

LevyTailSpec LevyTailSpec::user_defined(double alpha, double p0,
                                        std::function<double(double)> tail) {
  require(alpha > 0.0 && alpha < 2.0, "levy alpha must lie in (0,2)");
  require(p0 > 0.0 && p0 < 2.0, "levy p0 must lie in (0,2)");
  require(static_cast<bool>(tail), "user-defined levy tail missing");
  LevyTailSpec spec{TailKind::user_defined, alpha, p0, std::move(tail)};
  require(spec.small_tail_condition_holds(), "user-defined levy tail violates the small-x condition");
  return spec;
}

double LevyTailSpec::tail(double x) const { return tail_(x); }

double LevyTailSpec::inverse(double y) const {
  require(y > 0.0, "levy tail inverse needs y > 0");
  switch (kind_) {
    case TailKind::pure_stable:
      return std::pow(y, -1.0 / alpha_);
    case TailKind::pareto_cutoff:
      return y >= 1.0 ? 0.0 : std::pow(y, -1.0 / alpha_);
    case TailKind::user_defined:
      break;
  }
  if (tail_(1e-300) <= y) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (tail_(hi) > y) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) return INFINITY;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (tail_(mid) <= y) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double LevyTailSpec::inverse_square_tail(double y0) const {
  require(y0 > 0.0, "inverse_square_tail needs y0 > 0");
  const double e = 1.0 - 2.0 / alpha_;
  switch (kind_) {
    case TailKind::pure_stable:
      return std::pow(y0, e) / (2.0 / alpha_ - 1.0);
    case TailKind::pareto_cutoff:
      return y0 >= 1.0 ? 0.0 : (std::pow(y0, e) - 1.0) / (2.0 / alpha_ - 1.0);
    case TailKind::user_defined:
      break;
  }
  // int_{y0}^inf inverse(y)^2 dy; substitute y = y0 e^s.
  const auto f = [&](double s) {
    const double y = y0 * std::exp(s);
    const double v = inverse(y);
    return v * v * y;
  };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, 60.0, 10, 1e-8);
}

bool LevyTailSpec::small_tail_condition_holds() const {
  // x^{p0} tail(x) on x = 10^{-1..-12}: finite, decreasing over the last decades, and well below its start.
  std::array<double, 12> v{};
  for (int k = 1; k <= 12; ++k) {
    v[k - 1] = std::pow(10.0, -k * p0_) * tail_(std::pow(10.0, -k));
    if (!std::isfinite(v[k - 1]) || v[k - 1] < 0.0) return false;
  }
  for (std::size_t i = 8; i < v.size(); ++i) {
    if (v[i] > v[i - 1]) return false;
  }
  return v.back() <= 0.1 * v.front() || v.back() < 1e-12;
}

SeriesBudget SeriesBudget::draw(std::size_t J, Rng& rng) {
  require(J >= 1, "series budget needs J >= 1");
  SeriesBudget b;
  b.J = J;
  b.arrivals.resize(J);
  b.signs.resize(J);
  double g = 0.0;
  for (std::size_t j = 0; j < J; ++j) {
    g += rng.exponential();
    b.arrivals[j] = g;
    b.signs[j] = rng.sign();
  }
  return b;
}

}  // namespace nullrec::stable
