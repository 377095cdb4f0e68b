#include "nullrec/limits.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/quadrature/gauss.hpp>

#include "nullrec/errors.hpp"
#include "nullrec/mlfrac.hpp"

namespace nullrec::limits {

YParams::YParams(double alpha, double beta, double gamma)
    : alpha_(alpha), beta_(beta), gamma_(gamma) {
  require(alpha > 0.0 && alpha < 2.0, "Y: alpha must lie in (0,2)");
  require(beta >= 0.0 && beta <= 1.0, "Y: beta must lie in [0,1]");
  require(gamma > alpha && gamma <= 2.0, "Y: gamma must lie in (alpha, 2]");
}

double control_scale_factor(ControlScale scale, double alpha) {
  return scale == ControlScale::tail ? std::pow(2.0, 1.0 / alpha) : 1.0;
}

double endpoint_abs_moment(double gamma, double p) {
  return stable::sas_abs_moment(gamma, p, true);
}

double endpoint_increment(double gamma, double dt, Rng& rng) {
  if (dt <= 0.0) return 0.0;
  if (gamma == 2.0) return std::sqrt(dt) * rng.normal();
  return stable::sample_sas(gamma, std::pow(dt, 1.0 / gamma), rng);
}

namespace {

// Endpoint process evaluated at nondecreasing times, accumulated into out
// with weight w.
void add_endpoint_path(double gamma, std::span<const double> at, double w,
                       std::span<double> out, Rng& rng) {
  double prev = 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < at.size(); ++i) {
    s += endpoint_increment(gamma, at[i] - prev, rng);
    prev = at[i];
    out[i] += w * s;
  }
}

std::vector<std::size_t> sort_order(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  return idx;
}

}  // namespace

SamplePath sample_bm_ml(double beta, double sigma_f, std::span<const double> grid, Rng& rng) {
  require(sigma_f >= 0.0, "sigma_f must be nonnegative");
  validate_grid(grid);
  SamplePath p;
  p.grid.assign(grid.begin(), grid.end());
  p.values.assign(grid.size(), 0.0);
  p.label = "sqrt(Gamma(beta+1)) sigma_f B(M_beta)";
  if (sigma_f == 0.0) return p;
  std::vector<double> m(grid.size());
  mlfrac::mittag_leffler_at(beta, grid, m, rng);
  add_endpoint_path(2.0, m, std::sqrt(std::tgamma(beta + 1.0)) * sigma_f, p.values, rng);
  return p;
}

EntranceSample sample_entrance_limit(double beta, double sigma_f, double L,
                                     std::span<const double> grid, Rng& rng) {
  require(L > 0.0, "entrance limit needs L > 0");
  require(sigma_f >= 0.0, "sigma_f must be nonnegative");
  validate_grid(grid);
  EntranceSample out;
  out.entrance = beta < 1.0 ? L * std::pow(rng.uniform(), 1.0 / (1.0 - beta)) : 0.0;
  out.path.grid.assign(grid.begin(), grid.end());
  out.path.values.assign(grid.size(), 0.0);
  out.path.label = "entrance limit";
  out.path.meta["entrance"] = out.entrance;
  std::vector<double> shifted(grid.size()), m(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) shifted[i] = std::max(grid[i] - out.entrance, 0.0);
  mlfrac::mittag_leffler_at(beta, shifted, m, rng);
  add_endpoint_path(2.0, m, std::sqrt(std::tgamma(beta + 1.0)) * sigma_f, out.path.values, rng);
  return out;
}

namespace {

void sample_Y_series(const YParams& params, std::span<const double> times, double horizon,
                     const stable::SeriesBudget& budget, const YOptions& options,
                     std::span<double> out, Rng& rng) {
  require(out.size() == times.size(), "sample_Y: size mismatch");
  require(horizon > 0.0, "sample_Y: horizon must be positive");
  for (std::size_t i = 0; i < times.size(); ++i) {
    require(times[i] >= 0.0 && times[i] <= horizon * (1.0 + 1e-12), "sample_Y: time outside [0, horizon]");
    require(i == 0 || times[i] >= times[i - 1], "sample_Y: times must be nondecreasing");
  }
  const double alpha = params.alpha();
  const double beta = params.beta();
  const double gamma = params.gamma();
  const double mass = beta < 1.0 ? std::pow(horizon, 1.0 - beta) : 1.0;
  const double c = std::pow(stable::tail_constant(alpha) * mass, 1.0 / alpha) *
                   control_scale_factor(options.scale, alpha);
  std::fill(out.begin(), out.end(), 0.0);
  std::vector<double> shifted(times.size()), m(times.size());
  for (std::size_t j = 0; j < budget.J; ++j) {
    Rng term = rng.split(j + 1);
    const double x = beta < 1.0 ? horizon * std::pow(term.uniform(), 1.0 / (1.0 - beta)) : 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) shifted[i] = std::max(times[i] - x, 0.0);
    mlfrac::mittag_leffler_at(beta, shifted, m, term);
    const double w = c * budget.signs[j] * std::pow(budget.arrivals[j], -1.0 / alpha);
    add_endpoint_path(gamma, m, w, out, term);
  }
  if (options.remainder) {
    // Given the retained arrivals, the discarded terms sum to S'_gamma(sum_j a_j^gamma tau_j)
    // with a_j = c Gamma_j^{-1/alpha}; the time change is replaced by its mean.
    const double r = gamma / alpha;
    const double v = std::pow(c, gamma) * std::pow(budget.arrivals.back(), 1.0 - r) / (r - 1.0);
    const double rate = v * std::tgamma(2.0 - beta) / mass;
    Rng rem = rng.split(0x7fffffffULL);
    std::vector<double> clock(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) clock[i] = rate * times[i];
    add_endpoint_path(gamma, clock, 1.0, out, rem);
  }
}

}  // namespace

void sample_Y_at(const YParams& params, std::span<const double> times, double horizon,
                 const YOptions& options, std::span<double> out, Rng& rng) {
  Rng arrivals = rng.split(0);
  const auto budget = stable::SeriesBudget::draw(options.terms, arrivals);
  sample_Y_series(params, times, horizon, budget, options, out, rng);
}

SamplePath sample_Y(const YParams& params, std::span<const double> grid,
                    const stable::SeriesBudget& budget, const YOptions& options, Rng& rng) {
  validate_grid(grid);
  SamplePath p;
  p.grid.assign(grid.begin(), grid.end());
  p.values.assign(grid.size(), 0.0);
  p.label = "Y";
  sample_Y_series(params, grid, grid.back(), budget, options, p.values, rng);
  p.meta["hurst"] = params.hurst();
  p.meta["terms"] = static_cast<double>(budget.J);
  return p;
}

double sample_substable(const YParams& params, double t, ControlScale scale, Rng& rng) {
  require(t >= 0.0, "sample_substable: t must be nonnegative");
  const double alpha = params.alpha();
  const double gamma = params.gamma();
  const double r = alpha / gamma;
  // E exp(-W kappa |theta|^gamma) = exp(-E|S_gamma(1)|^alpha |theta|^alpha), where
  // kappa = 1 for SaS(gamma) and 1/2 for standard BM.
  const double kappa = gamma == 2.0 ? 0.5 : 1.0;
  const double cw = endpoint_abs_moment(gamma, alpha) / std::pow(kappa, r);
  const double w = std::pow(cw, 1.0 / r) * mlfrac::sample_positive_stable(r, rng);
  const double s = endpoint_increment(gamma, t, rng);
  return control_scale_factor(scale, alpha) * std::pow(w, 1.0 / gamma) * s;
}

CfValue analytic_cf_Y(const YParams& params, std::span<const double> times,
                      std::span<const double> thetas, const CfOptions& options, Rng& rng) {
  require(times.size() == thetas.size() && !times.empty(), "analytic_cf_Y: size mismatch");
  const double beta = params.beta();
  require(beta > 0.0 && beta < 1.0, "analytic_cf_Y needs 0 < beta < 1");
  require(options.inner_samples >= 2, "analytic_cf_Y needs at least two inner samples");
  for (double t : times) require(t >= 0.0, "analytic_cf_Y: times must be nonnegative");
  CfValue out;
  if (std::all_of(thetas.begin(), thetas.end(), [](double th) { return th == 0.0; })) return out;

  const auto order = sort_order(times);
  std::vector<double> t_sorted(times.size()), th_sorted(times.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    t_sorted[i] = times[order[i]];
    th_sorted[i] = thetas[order[i]];
  }
  // Segments between distinct times; nu_beta(dx) = d(x^{1-beta}), so each is
  // integrated in v = x^{1-beta} where the integrand is smooth.
  std::vector<double> cuts{0.0};
  for (double t : t_sorted) {
    if (t > cuts.back()) cuts.push_back(t);
  }
  const double alpha = params.alpha();
  const double gamma = params.gamma();
  const std::size_t inner = options.inner_samples;
  // 30-point Gauss-Legendre rule on [-1, 1].
  using Rule = boost::math::quadrature::gauss<double, 30>;
  std::vector<double> xs, ws;
  for (std::size_t k = 0; k < Rule::abscissa().size(); ++k) {
    xs.push_back(Rule::abscissa()[k]);
    ws.push_back(Rule::weights()[k]);
    xs.push_back(-Rule::abscissa()[k]);
    ws.push_back(Rule::weights()[k]);
  }
  const std::size_t nodes = xs.size();

  std::vector<double> theta_tail(times.size());
  double acc = 0.0;
  for (std::size_t i = times.size(); i-- > 0;) {
    acc += th_sorted[i];
    theta_tail[i] = acc;
  }
  const double endpoint_moment = endpoint_abs_moment(gamma, alpha);
  std::vector<double> shifted(times.size()), m(times.size());
  double total = 0.0;
  double var = 0.0;
  std::size_t node_id = 0;
  for (std::size_t seg = 0; seg + 1 < cuts.size(); ++seg) {
    const double v0 = std::pow(cuts[seg], 1.0 - beta);
    const double v1 = std::pow(cuts[seg + 1], 1.0 - beta);
    const double half = 0.5 * (v1 - v0);
    for (std::size_t k = 0; k < nodes; ++k, ++node_id) {
      const double v = v0 + half * (xs[k] + 1.0);
      const double x = std::pow(v, 1.0 / (1.0 - beta));
      Rng r = rng.split(node_id);
      for (std::size_t i = 0; i < t_sorted.size(); ++i) shifted[i] = std::max(t_sorted[i] - x, 0.0);
      double mean = 0.0, sq = 0.0;
      for (std::size_t it = 0; it < inner; ++it) {
        mlfrac::mittag_leffler_at(beta, shifted, m, r);
        // Given M, sum_j theta_j S(tau_j) is SaS(gamma) with
        // scale^gamma = sum_i |Theta_i|^gamma (tau_i - tau_{i-1}), Theta_i = sum_{j>=i} theta_j,
        // so E'|.|^alpha = E|S(1)|^alpha * scale^alpha.
        double spread = 0.0;
        double prev = 0.0;
        for (std::size_t i = 0; i < m.size(); ++i) {
          spread += std::pow(std::abs(theta_tail[i]), gamma) * (m[i] - prev);
          prev = m[i];
        }
        const double g = endpoint_moment * std::pow(spread, alpha / gamma);
        mean += g;
        sq += g * g;
      }
      mean /= static_cast<double>(inner);
      const double node_var = std::max(0.0, sq / static_cast<double>(inner) - mean * mean) /
                              static_cast<double>(inner - 1);
      total += half * ws[k] * mean;
      var += half * half * ws[k] * ws[k] * node_var;
    }
  }
  const double factor = std::pow(control_scale_factor(options.scale, alpha), alpha);
  out.exponent = factor * total;
  out.exponent_se = factor * std::sqrt(var);
  out.cf = std::exp(-out.exponent);
  if (out.exponent > 0.0 && out.exponent_se > options.rel_tol * out.exponent) {
    throw PrecisionError("analytic_cf_Y: inner Monte Carlo relative error above tolerance",
                         out.exponent_se / out.exponent);
  }
  return out;
}

}  // namespace nullrec::limits
