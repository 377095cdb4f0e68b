#include "nullrec/idproc.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "nullrec/errors.hpp"
#include "nullrec/stats.hpp"

namespace nullrec::idproc {

void IdProcessSpec::validate() const {
  require(chain != nullptr, "id process needs a chain");
  f.validate(*chain);
  require(n >= 1, "id process window n must be >= 1");
  require(horizon > 0.0, "id process horizon must be positive");
}

NormalizationReport compute_cn(const IdProcessSpec& spec, Rng& rng) {
  spec.validate();
  NormalizationReport r;
  const auto& chain = *spec.chain;
  const auto exact_an = chain.exact_an(spec.n);
  const auto wander = chains::wandering_rate(chain, spec.n, spec.estimator_replicates, rng);
  r.a_n = exact_an ? *exact_an
                   : chains::estimate_an(chain, spec.n, spec.estimator_replicates, rng).estimate;
  r.mu_tau_n = wander.value;
  r.exact = exact_an.has_value() && wander.exact;
  const double alpha = spec.levy.alpha();
  r.C_alpha = stable::tail_constant(alpha);
  r.rho_inv_value = spec.levy.inverse(1.0 / r.mu_tau_n);
  r.c_n = std::pow(r.C_alpha, -1.0 / alpha) * std::sqrt(r.a_n) * r.rho_inv_value;
  r.consistency = spec.levy.tail(r.c_n / std::sqrt(r.a_n)) * r.mu_tau_n / r.C_alpha;
  return r;
}

PartialSumSampler::PartialSumSampler(const IdProcessSpec& spec, std::span<const double> grid,
                                     const SeriesOptions& options, Rng& rng)
    : spec_(spec), options_(options) {
  spec_.validate();
  require(!grid.empty(), "partial-sum grid must not be empty");
  require(options.terms >= 1, "series needs at least one term");
  grid_.assign(grid.begin(), grid.end());
  Rng norm_rng = rng.split(0xc0);
  norm_ = compute_cn(spec_, norm_rng);

  const auto window = static_cast<long long>(std::llround(static_cast<double>(spec_.n) * spec_.horizon));
  mu_sampler_ = spec_.chain->mu_n_sampler(window);
  if (window == spec_.n) {
    two_mu_ = 2.0 * norm_.mu_tau_n;
  } else {
    Rng wr = rng.split(0xc1);
    two_mu_ = 2.0 * chains::wandering_rate(*spec_.chain, window, spec_.estimator_replicates, wr).value;
  }

  const auto n = static_cast<double>(spec_.n);
  std::vector<long long> raw;
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    require(grid_[i] >= 0.0 && grid_[i] <= spec_.horizon * (1.0 + 1e-12), "grid time outside [0, L]");
    require(i == 0 || grid_[i] >= grid_[i - 1], "grid must be nondecreasing");
    const double x = n * grid_[i];
    raw.push_back(static_cast<long long>(std::floor(x)));
    raw.push_back(static_cast<long long>(std::ceil(x)));
  }
  ticks_ = raw;
  std::sort(ticks_.begin(), ticks_.end());
  ticks_.erase(std::unique(ticks_.begin(), ticks_.end()), ticks_.end());
  const auto index_of = [&](long long k) {
    return static_cast<std::size_t>(std::lower_bound(ticks_.begin(), ticks_.end(), k) - ticks_.begin());
  };
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    const double x = n * grid_[i];
    lo_.push_back(index_of(raw[2 * i]));
    hi_.push_back(index_of(raw[2 * i + 1]));
    frac_.push_back(x - std::floor(x));
  }

  // Pilot second moments E_{mu_n}[S^_a S^_b] on the ticks.
  const std::size_t k = ticks_.size();
  const std::size_t pilots = std::max<std::size_t>(options_.pilot_paths, 2);
  std::vector<double> samples(pilots * k);
  const Rng pilot_master = rng.split(0xc2);
  for_each_replicate(pilots, Execution::parallel, [&](std::size_t p) {
    Rng r = pilot_master.split(p);
    path_at(*mu_sampler_, std::span<double>(samples.data() + p * k, k), r);
  });
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  for (std::size_t p = 0; p < pilots; ++p) {
    const Eigen::Map<const Eigen::VectorXd> v(samples.data() + p * k, static_cast<Eigen::Index>(k));
    cov.noalias() += v * v.transpose();
  }
  cov /= static_cast<double>(pilots);
  pilot_diag_.resize(grid_.size());
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    pilot_diag_[i] = cov(static_cast<Eigen::Index>(hi_[i]), static_cast<Eigen::Index>(hi_[i])) / norm_.a_n;
  }
  // Symmetric square root with negative eigenvalues clamped.
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd a = eig.eigenvectors() * root.asDiagonal();
  chol_.assign(a.data(), a.data() + a.size());  // column-major k x k

  const double y0 = static_cast<double>(options_.terms) / two_mu_;
  remainder_var_ = two_mu_ * spec_.levy.inverse_square_tail(y0) *
                   cov(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(k - 1)) /
                   (norm_.c_n * norm_.c_n);
}

void PartialSumSampler::path_at(const chains::StartSampler& sampler, std::span<double> buf,
                                Rng& rng) const {
  chains::sample_mu_n_path(*spec_.chain, sampler, spec_.f, ticks_, buf, rng);
}

void PartialSumSampler::sample(std::span<double> out, Rng& rng) const {
  Rng arrivals = rng.split(0);
  const auto budget = stable::SeriesBudget::draw(options_.terms, arrivals);
  sample(budget, out, rng);
}

void PartialSumSampler::sample(const stable::SeriesBudget& budget, std::span<double> out,
                               Rng& rng) const {
  require(out.size() == grid_.size(), "partial-sum output size mismatch");
  const std::size_t k = ticks_.size();
  std::vector<double> acc(k, 0.0), buf(k);
  for (std::size_t j = 0; j < budget.J; ++j) {
    const double coef = budget.signs[j] * spec_.levy.inverse(budget.arrivals[j] / two_mu_);
    if (coef == 0.0) break;  // arrivals increase, so every later term vanishes too
    Rng term = rng.split(j + 1);
    path_at(*mu_sampler_, buf, term);
    for (std::size_t i = 0; i < k; ++i) acc[i] += coef * buf[i];
  }
  if (options_.remainder) {
    const double y0 = budget.arrivals.back() / two_mu_;
    const double var_scale = two_mu_ * spec_.levy.inverse_square_tail(y0);
    if (var_scale > 0.0) {
      Rng rem = rng.split(0x7fffffffULL);
      std::vector<double> z(k);
      for (auto& v : z) v = rem.normal();
      const double s = std::sqrt(var_scale);
      for (std::size_t col = 0; col < k; ++col) {
        for (std::size_t row = 0; row < k; ++row) acc[row] += s * chol_[col * k + row] * z[col];
      }
    }
  }
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    out[i] = ((1.0 - frac_[i]) * acc[lo_[i]] + frac_[i] * acc[hi_[i]]) / norm_.c_n;
  }
}

SamplePath sample_partial_sum_path(const IdProcessSpec& spec, std::span<const double> grid,
                                   const stable::SeriesBudget& budget, Rng& rng,
                                   const SeriesOptions& options) {
  validate_grid(grid);
  SeriesOptions opts = options;
  opts.terms = budget.J;
  Rng setup = rng.split(0x5e7);
  const PartialSumSampler sampler(spec, grid, opts, setup);
  SamplePath p;
  p.grid.assign(grid.begin(), grid.end());
  p.values.assign(grid.size(), 0.0);
  p.label = "c_n^{-1} S_{nt}(X)";
  sampler.sample(budget, p.values, rng);
  p.meta["c_n"] = sampler.normalization().c_n;
  p.meta["remainder_variance"] = sampler.remainder_variance();
  return p;
}

FcltReport fclt_experiment(const IdProcessSpec& spec, std::size_t replicates,
                           const FcltOptions& options, Rng& rng) {
  require(replicates >= 2, "fclt experiment needs at least two replicates");
  require(!options.times.empty(), "fclt experiment needs evaluation times");
  FcltReport rep;
  rep.times = options.times;
  rep.thetas = options.thetas.empty() ? stats::linspace(-3.0, 3.0, 61) : options.thetas;
  const double beta = spec.chain->beta();
  require(beta > 0.0, "fclt experiment needs a chain with beta > 0");

  Rng setup = rng.split(1);
  const PartialSumSampler lhs_sampler(spec, options.times, options.lhs, setup);
  rep.norm = lhs_sampler.normalization();
  Rng sig_rng = rng.split(2);
  const bool zero_f = std::all_of(spec.f.values.begin(), spec.f.values.end(),
                                  [](double v) { return v == 0.0; });
  rep.sigma_f = zero_f ? 0.0 : std::sqrt(chains::sigma_f(*spec.chain, spec.f, 1 << 16, sig_rng).sigma2);

  const limits::YParams yp(spec.levy.alpha(), beta, 2.0);
  const double prefactor = std::sqrt(std::tgamma(beta + 1.0)) * rep.sigma_f;
  const std::size_t nt = options.times.size();
  rep.lhs.assign(nt, std::vector<double>(replicates));
  rep.rhs.assign(nt, std::vector<double>(replicates));
  const Rng lhs_master = rng.split(3);
  const Rng rhs_master = rng.split(4);
  for_each_replicate(replicates, options.exec, [&](std::size_t r) {
    std::vector<double> out(nt);
    Rng lr = lhs_master.split(r);
    lhs_sampler.sample(out, lr);
    for (std::size_t i = 0; i < nt; ++i) rep.lhs[i][r] = out[i];
    Rng rr = rhs_master.split(r);
    limits::sample_Y_at(yp, options.times, spec.horizon, options.rhs, out, rr);
    for (std::size_t i = 0; i < nt; ++i) rep.rhs[i][r] = prefactor * out[i];
  });
  for (std::size_t i = 0; i < nt; ++i) {
    rep.max_cf_gap.push_back(stats::max_ecf_distance(rep.lhs[i], rep.rhs[i], rep.thetas));
    rep.ks.push_back(stats::ks_two_sample(rep.lhs[i], rep.rhs[i]));
  }
  return rep;
}

}  // namespace nullrec::idproc
