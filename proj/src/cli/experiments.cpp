#include "nullrec/cli/experiments.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>

#include "nullrec/chains.hpp"
#include "nullrec/idproc.hpp"
#include "nullrec/limits.hpp"
#include "nullrec/mlfrac.hpp"
#include "nullrec/momentbounds.hpp"
#include "nullrec/stable.hpp"
#include "nullrec/stats.hpp"

namespace nullrec::cli {

namespace {

// ---- schema helpers -------------------------------------------------------

FieldSpec field(std::string key, ValueType type, std::string def, std::string help) {
  FieldSpec f;
  f.key = std::move(key);
  f.type = type;
  f.default_value = std::move(def);
  f.help = std::move(help);
  return f;
}

FieldSpec f_int(std::string key, std::string def, std::string help, double lo,
                std::optional<double> hi = std::nullopt) {
  FieldSpec f = field(std::move(key), ValueType::integer, std::move(def), std::move(help));
  f.min = lo;
  f.max = hi;
  return f;
}

FieldSpec f_real(std::string key, std::string def, std::string help,
                 std::optional<double> lo = std::nullopt, std::optional<double> hi = std::nullopt,
                 bool lo_excl = false, bool hi_excl = false) {
  FieldSpec f = field(std::move(key), ValueType::real, std::move(def), std::move(help));
  f.min = lo;
  f.max = hi;
  f.min_exclusive = lo_excl;
  f.max_exclusive = hi_excl;
  return f;
}

FieldSpec f_list(std::string key, std::string def, std::string help,
                 std::optional<double> lo = std::nullopt, std::optional<double> hi = std::nullopt,
                 bool lo_excl = false, bool hi_excl = false) {
  FieldSpec f = f_real(std::move(key), std::move(def), std::move(help), lo, hi, lo_excl, hi_excl);
  f.type = ValueType::real_list;
  return f;
}

FieldSpec f_bool(std::string key, std::string def, std::string help) {
  return field(std::move(key), ValueType::boolean, std::move(def), std::move(help));
}

FieldSpec f_choice(std::string key, std::string def, std::string help,
                   std::vector<std::string> choices) {
  FieldSpec f = field(std::move(key), ValueType::choice, std::move(def), std::move(help));
  f.choices = std::move(choices);
  return f;
}

FieldSpec f_tol(std::string key, std::string def, std::string help) {
  return f_real(std::move(key), std::move(def), std::move(help), 0.0, std::nullopt, true);
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::vector<double> theta_grid(const Params& p) {
  return stats::linspace(-p.real("theta_max"), p.real("theta_max"), p.count("theta_count"));
}

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::size_t index_of(const std::vector<double>& v, double x) {
  return static_cast<std::size_t>(std::lower_bound(v.begin(), v.end(), x) - v.begin());
}

double max_cf_gap(const std::vector<double>& samples, const std::vector<double>& thetas,
                  const std::function<double(double)>& cf) {
  double gap = 0.0;
  for (const auto& e : stats::ecf(samples, thetas)) {
    gap = std::max(gap, std::abs(e.value - std::complex<double>(cf(e.theta), 0.0)));
  }
  return gap;
}

Series function_series(std::string name, const std::vector<double>& x,
                       const std::function<double(double)>& f) {
  Series s{std::move(name), x, {}, false};
  for (const double v : x) s.y.push_back(f(v));
  return s;
}

Series ecf_real_series(std::string name, const std::vector<double>& samples,
                       const std::vector<double>& thetas) {
  Series s{std::move(name), thetas, {}, false};
  for (const auto& e : stats::ecf(samples, thetas)) s.y.push_back(e.value.real());
  return s;
}

// ---- chains ---------------------------------------------------------------

chains::ChainPtr build_chain(const Params& p) {
  const auto& c = p.text("chain");
  const std::size_t atoms = p.count("atoms");
  if (c == "renewal") return chains::builtin_renewal_chain(p.real("beta"), p.real("tail_scale"), atoms);
  if (c == "renewal-beta1") return chains::builtin_renewal_chain_beta1(atoms);
  if (c == "ssrw") return chains::builtin_ssrw_chain(atoms);
  if (c == "gaussian") return chains::builtin_gaussian_walk();
  throw ConfigError("unknown chain '" + c + "'");
}

std::vector<FieldSpec> chain_fields(std::vector<std::string> choices) {
  return {
      f_choice("chain", "renewal", "chain model", std::move(choices)),
      f_real("beta", "0.5", "regularity index of the renewal chain", 0.0, 1.0, true, true),
      f_real("tail_scale", "1", "renewal jump tail scale s in P(J > n) = (1 + n/s)^{-beta}", 0.0,
             std::nullopt, true),
      f_int("atoms", "2", "number of atoms forming D", 1, 64),
  };
}

double sigma_of(const chains::ChainModel& chain, const chains::FSpec& f, const Params& p, Rng rng) {
  return std::sqrt(chains::sigma_f(chain, f, p.count("sigma_kmax"), rng).sigma2);
}

// ---- subordinator ---------------------------------------------------------

ExperimentResult run_subordinator(const Params& p, const Rng& rng, Execution exec) {
  ExperimentResult res;
  const auto betas = p.list("betas");
  const std::size_t n = p.count("samples");
  Table moments{"ml_moments", {"beta", "mean", "std_error", "reference", "second_moment",
                               "second_reference"}, {}};
  for (std::size_t b = 0; b < betas.size(); ++b) {
    const double beta = betas[b];
    const Rng master = rng.split(100 + b);
    std::vector<double> m(n);
    for_each_replicate(n, exec, [&](std::size_t i) {
      Rng r = master.split(i);
      const double t = 1.0;
      mlfrac::mittag_leffler_at(beta, std::span<const double>(&t, 1), std::span<double>(&m[i], 1), r);
    });
    const auto est = stats::mean_and_stderr(m);
    double m2 = 0.0;
    for (const double v : m) m2 += v * v;
    m2 /= static_cast<double>(n);
    const double ref = 1.0 / std::tgamma(1.0 + beta);
    const double ref2 = mlfrac::ml_moment(beta, 2.0, 1.0);
    res.metrics.push_back(make_metric("ml_mean[beta=" + label(beta) + "]", est.mean, Rule::rel,
                                      p.real("tol.ml_mean"), ref));
    res.metrics.push_back(make_metric("ml_second_moment[beta=" + label(beta) + "]", m2, Rule::info,
                                      std::nullopt, ref2));
    moments.add_row({beta, est.mean, est.std_error, ref, m2, ref2});
  }
  res.tables.push_back(std::move(moments));

  const auto grid = uniform_grid(p.real("path_horizon"), p.count("path_points"));
  Table paths{"ml_paths", {"t"}, {}};
  LinePlot plot{"ml_paths", "Mittag-Leffler paths", "t", "M_beta(t)", false, false, {}};
  std::vector<SamplePath> sampled;
  for (std::size_t b = 0; b < betas.size(); ++b) {
    Rng r = rng.split(200 + b);
    sampled.push_back(mlfrac::sample_mittag_leffler(mlfrac::MLParams(betas[b]), grid, r));
    paths.header.push_back("M[beta=" + label(betas[b]) + "]");
    plot.series.push_back({"beta=" + label(betas[b]), grid, sampled.back().values, false});
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::vector<double> row{grid[i]};
    for (const auto& s : sampled) row.push_back(s.values[i]);
    paths.add_row(row);
  }
  res.tables.push_back(std::move(paths));
  res.plots.push_back(std::move(plot));

  if (p.boolean("overshoot")) {
    const double beta = p.real("overshoot_beta");
    const double r0 = p.real("overshoot_r");
    const double t = p.real("overshoot_t");
    const std::size_t m = p.count("overshoot_samples");
    const mlfrac::OvershootSampler os(beta);
    std::vector<double> lhs(m), rhs(m), over(m);
    const Rng lm = rng.split(300), rm = rng.split(301), om = rng.split(302);
    for_each_replicate(m, exec, [&](std::size_t i) {
      Rng rl = lm.split(i);
      const double times[2] = {r0, r0 + t};
      double vals[2];
      mlfrac::mittag_leffler_at(beta, times, vals, rl);
      lhs[i] = vals[1] - vals[0];
      Rng rr = rm.split(i);
      const double s = std::max(t - os.sample(r0, rr), 0.0);
      double v = 0.0;
      if (s > 0.0) mlfrac::mittag_leffler_at(beta, std::span<const double>(&s, 1), std::span<double>(&v, 1), rr);
      rhs[i] = v;
      Rng ro = om.split(i);
      over[i] = mlfrac::sample_first_passage(beta, r0, ro).overshoot / r0;
    });
    res.metrics.push_back(make_metric("strong_markov_ks", stats::ks_two_sample(lhs, rhs), Rule::max,
                                      p.real("tol.overshoot_ks")));
    res.metrics.push_back(make_metric("overshoot_law_ks",
                                      stats::ks_one_sample(over, [&](double x) { return os.cdf(x); }),
                                      Rule::info));
    LinePlot cdf{"strong_markov_cdf", "M(t+r)-M(r) vs M((t-delta_r)+)", "x", "CDF", false, false, {}};
    cdf.series.push_back(ecdf_series("M(t+r)-M(r)", lhs));
    cdf.series.push_back(ecdf_series("M((t-delta_r)+)", rhs));
    res.plots.push_back(std::move(cdf));
  }
  return res;
}

// ---- chain-fclt -----------------------------------------------------------

ExperimentResult run_chain_fclt(const Params& p, const Rng& rng, Execution exec) {
  ExperimentResult res;
  const auto chain = build_chain(p);
  const double beta = chain->beta();
  const long long n = p.integer("n");

  if (const long long wn = p.integer("wandering_n"); wn > 0) {
    Rng ar = rng.split(10), wr = rng.split(11);
    const auto exact = chain->exact_an(wn);
    const double an = exact ? *exact : chains::estimate_an(*chain, wn, p.count("an_replicates"), ar, exec).estimate;
    const auto w = chains::wandering_rate(*chain, wn, p.count("wandering_replicates"), wr, exec);
    const double ratio = static_cast<double>(wn) / (an * w.value);
    res.metrics.push_back(make_metric("wandering_constant", ratio, Rule::rel, p.real("tol.wandering"),
                                      std::tgamma(1.0 + beta) * std::tgamma(2.0 - beta)));
    res.metrics.push_back(make_metric("wandering_rate", w.value, Rule::info));
  }

  if (const auto ref = p.optional_real("an_reference")) {
    Rng ar = rng.split(12);
    const auto est = chains::estimate_an(*chain, n, p.count("an_replicates"), ar, exec);
    const double scale = std::sqrt(static_cast<double>(n));
    res.metrics.push_back(make_metric("an_over_sqrt_n", est.estimate / scale, Rule::rel,
                                      p.real("tol.an"), *ref));
    res.metrics.push_back(make_metric("an_over_sqrt_n_se", est.std_error / scale, Rule::info));
    if (est.exact) {
      res.metrics.push_back(make_metric("an_exact_over_sqrt_n", *est.exact / scale, Rule::info));
    }
  }

  if (p.boolean("marginal_check")) {
    require(chain->atom_count() >= 2, "marginal check needs a chain with at least two atoms");
    const auto f = chains::two_atom_mean_zero(*chain);
    const auto exact = chain->exact_an(n);
    Rng ar = rng.split(13);
    const double an = exact ? *exact : chains::estimate_an(*chain, n, p.count("an_replicates"), ar, exec).estimate;
    const double sigma = sigma_of(*chain, f, p, rng.split(14));
    const std::size_t reps = p.count("replicates");
    std::vector<double> lhs(reps), rhs(reps);
    const Rng lm = rng.split(15), rm = rng.split(16);
    const std::vector<long long> times{n};
    const std::vector<double> grid{0.0, 1.0};
    for_each_replicate(reps, exec, [&](std::size_t i) {
      Rng r = lm.split(i);
      double s = 0.0;
      chains::partial_sums_at(*chain, chain->atom_state(0), f, times, std::span<double>(&s, 1), r);
      lhs[i] = s / std::sqrt(an);
      Rng q = rm.split(i);
      rhs[i] = limits::sample_bm_ml(beta, sigma, grid, q).values[1];
    });
    res.metrics.push_back(make_metric("sigma_f2", sigma * sigma, Rule::info));
    res.metrics.push_back(make_metric("a_n", an, Rule::info));
    res.metrics.push_back(make_metric("marginal_ks", stats::ks_two_sample(lhs, rhs), Rule::max,
                                      p.real("tol.ks")));
    Table qt{"marginal_quantiles", {"q", "chain", "limit"}, {}};
    for (int k = 1; k < 100; ++k) {
      const double q = k / 100.0;
      qt.add_row({q, stats::quantile(lhs, q), stats::quantile(rhs, q)});
    }
    res.tables.push_back(std::move(qt));
    LinePlot cdf{"marginal_cdf", "S_n(f)/sqrt(a_n) vs limit", "x", "CDF", false, false, {}};
    cdf.series.push_back(ecdf_series("chain", lhs));
    cdf.series.push_back(ecdf_series("limit", rhs));
    res.plots.push_back(std::move(cdf));

    // A few normalized paths.
    const std::size_t np = p.count("path_points");
    std::vector<long long> ticks;
    std::vector<double> tgrid;
    for (std::size_t k = 0; k <= np; ++k) {
      ticks.push_back(static_cast<long long>(std::llround(static_cast<double>(n) * k / np)));
      tgrid.push_back(static_cast<double>(k) / np);
    }
    Table paths{"chain_paths", {"t"}, {}};
    LinePlot pp{"chain_paths", "S_{nt}(f)/sqrt(a_n)", "t", "value", false, false, {}};
    std::vector<std::vector<double>> vals;
    for (std::size_t j = 0; j < p.count("path_count"); ++j) {
      std::vector<double> v(ticks.size());
      Rng r = rng.split(17).split(j);
      chains::partial_sums_at(*chain, chain->atom_state(0), f, ticks, v, r);
      for (auto& x : v) x /= std::sqrt(an);
      paths.header.push_back("path" + std::to_string(j));
      pp.series.push_back({"path " + std::to_string(j), tgrid, v, false});
      vals.push_back(std::move(v));
    }
    for (std::size_t k = 0; k < ticks.size(); ++k) {
      std::vector<double> row{tgrid[k]};
      for (const auto& v : vals) row.push_back(v[k]);
      paths.add_row(row);
    }
    res.tables.push_back(std::move(paths));
    res.plots.push_back(std::move(pp));
  }
  return res;
}

// ---- entrance-fclt --------------------------------------------------------

ExperimentResult run_entrance(const Params& p, const Rng& rng, Execution exec) {
  ExperimentResult res;
  const auto chain = build_chain(p);
  require(chain->atom_count() >= 2, "entrance experiment needs a chain with at least two atoms");
  const double beta = chain->beta();
  const long long n = p.integer("n");
  const double L = p.real("L");
  const long long window = static_cast<long long>(std::llround(static_cast<double>(n) * L));
  const auto f = chains::two_atom_mean_zero(*chain);
  const auto exact = chain->exact_an(n);
  Rng ar = rng.split(10);
  const double an = exact ? *exact : chains::estimate_an(*chain, n, p.count("an_replicates"), ar, exec).estimate;
  const double sigma = sigma_of(*chain, f, p, rng.split(11));
  const auto sampler = chain->mu_n_sampler(window);
  const std::size_t reps = p.count("replicates");
  std::vector<double> T(reps), lhs(reps), rhs(reps), T_limit(reps);
  const Rng lm = rng.split(12), rm = rng.split(13);
  const std::vector<long long> times{window};
  const std::vector<double> grid{0.0, L};
  for_each_replicate(reps, exec, [&](std::size_t i) {
    Rng r = lm.split(i);
    const chains::State s = sampler->sample(r);
    Rng rh = r.split(1);
    T[i] = static_cast<double>(chains::hitting_time(*chain, s, window, rh)) / static_cast<double>(n);
    double v = 0.0;
    chains::partial_sums_at(*chain, s, f, times, std::span<double>(&v, 1), r);
    lhs[i] = v / std::sqrt(an);
    Rng q = rm.split(i);
    const auto e = limits::sample_entrance_limit(beta, sigma, L, grid, q);
    rhs[i] = e.path.values[1];
    T_limit[i] = e.entrance;
  });
  const auto law = [&](double x) { return x <= 0.0 ? 0.0 : x >= L ? 1.0 : std::pow(x / L, 1.0 - beta); };
  res.metrics.push_back(make_metric("entrance_ks", stats::ks_one_sample(T, law), Rule::max,
                                    p.real("tol.entrance_ks")));
  res.metrics.push_back(make_metric("path_ks", stats::ks_two_sample(lhs, rhs), Rule::max,
                                    p.real("tol.path_ks")));
  res.metrics.push_back(make_metric("sigma_f2", sigma * sigma, Rule::info));
  res.metrics.push_back(make_metric("sampler_acceptance", sampler->acceptance_rate(), Rule::info));
  LinePlot cdf{"entrance_cdf", "entrance fraction tau_D/n", "x", "CDF", false, false, {}};
  cdf.series.push_back(ecdf_series("simulated", T));
  cdf.series.push_back(function_series("(x/L)^(1-beta)", stats::linspace(0.0, L, 101), law));
  res.plots.push_back(std::move(cdf));
  LinePlot pc{"entrance_path_cdf", "S_{nL}(f)/sqrt(a_n) vs entrance limit", "x", "CDF", false, false, {}};
  pc.series.push_back(ecdf_series("chain", lhs));
  pc.series.push_back(ecdf_series("limit", rhs));
  res.plots.push_back(std::move(pc));
  Table qt{"entrance_quantiles", {"q", "entrance", "entrance_limit", "chain", "limit"}, {}};
  for (int k = 1; k < 100; ++k) {
    const double q = k / 100.0;
    qt.add_row({q, stats::quantile(T, q), stats::quantile(T_limit, q), stats::quantile(lhs, q),
                stats::quantile(rhs, q)});
  }
  res.tables.push_back(std::move(qt));
  return res;
}

// ---- sssi -----------------------------------------------------------------

ExperimentResult run_sssi(const Params& p, const Rng& rng, Execution exec) {
  ExperimentResult res;
  const limits::YParams yp(p.real("alpha"), p.real("beta"), p.real("gamma"));
  const double beta = yp.beta();
  const std::size_t reps = p.count("replicates");
  limits::YOptions yo;
  yo.terms = p.count("terms");
  yo.remainder = p.boolean("remainder");
  yo.scale = limits::ControlScale::characteristic;
  const auto thetas = theta_grid(p);

  // Ensemble of Y at `times` (horizon = last time), replicate i from master.split(i).
  const auto ensemble = [&](const std::vector<double>& times, const Rng& master) {
    std::vector<std::vector<double>> out(times.size(), std::vector<double>(reps));
    for_each_replicate(reps, exec, [&](std::size_t i) {
      std::vector<double> v(times.size());
      Rng r = master.split(i);
      limits::sample_Y_at(yp, times, times.back(), yo, v, r);
      for (std::size_t k = 0; k < times.size(); ++k) out[k][i] = v[k];
    });
    return out;
  };

  if (beta > 0.0 && beta < 1.0) {
    const double H = yp.hurst();
    const double c = p.real("selfsim_c");
    const auto shifts = p.list("shifts");
    std::vector<double> times{1.0, c};
    for (const double s : shifts) {
      times.push_back(s);
      times.push_back(s + 1.0);
    }
    times = sorted_unique(times);
    if (times.front() == 0.0) times.erase(times.begin());
    const auto ys = ensemble(times, rng.split(20));
    const auto value_at_time = [&](double t, std::size_t i) {
      return t == 0.0 ? 0.0 : ys[index_of(times, t)][i];
    };

    limits::CfOptions co;
    co.inner_samples = p.count("inner_samples");
    co.rel_tol = p.real("cf_rel_tol");
    Rng cr = rng.split(21);
    const double one = 1.0;
    const auto ref = limits::analytic_cf_Y(yp, std::span<const double>(&one, 1),
                                           std::span<const double>(&one, 1), co, cr);
    const double I = ref.exponent;
    const double alpha = yp.alpha();
    const auto cf = [&](double th) { return std::exp(-I * std::pow(std::abs(th), alpha)); };
    res.metrics.push_back(make_metric("cf_exponent_Y1", I, Rule::info));
    res.metrics.push_back(make_metric("cf_exponent_Y1_se", ref.exponent_se, Rule::info));

    std::vector<double> ss(reps);
    for (std::size_t i = 0; i < reps; ++i) ss[i] = value_at_time(c, i) / std::pow(c, H);
    res.metrics.push_back(make_metric("selfsim_cf_gap[c=" + label(c) + "]", max_cf_gap(ss, thetas, cf),
                                      Rule::max, p.real("tol.selfsim")));
    Table cft{"cf", {"theta", "analytic_Y1", "ecf_selfsim"}, {}};
    std::vector<std::vector<double>> incs;
    for (const double s : shifts) {
      std::vector<double> d(reps);
      for (std::size_t i = 0; i < reps; ++i) d[i] = value_at_time(s + 1.0, i) - value_at_time(s, i);
      res.metrics.push_back(make_metric("increment_cf_gap[s=" + label(s) + "]", max_cf_gap(d, thetas, cf),
                                        Rule::max, p.real("tol.increments")));
      if (s > 0.0) {
        // Analytic cross-check: the joint CF at (s, s+1) with weights (-1, 1).
        Rng ir = rng.split(22).split(static_cast<std::uint64_t>(std::llround(s * 1e6)));
        const double ts[2] = {s, s + 1.0};
        const double ws[2] = {-1.0, 1.0};
        const auto inc = limits::analytic_cf_Y(yp, ts, ws, co, ir);
        res.metrics.push_back(make_metric("increment_exponent[s=" + label(s) + "]", inc.exponent,
                                          Rule::info, std::nullopt, I));
      }
      cft.header.push_back("ecf_increment[s=" + label(s) + "]");
      incs.push_back(std::move(d));
    }
    const auto e_ss = stats::ecf(ss, thetas);
    std::vector<std::vector<stats::EcfPoint>> e_inc;
    for (const auto& d : incs) e_inc.push_back(stats::ecf(d, thetas));
    for (std::size_t k = 0; k < thetas.size(); ++k) {
      std::vector<double> row{thetas[k], cf(thetas[k]), e_ss[k].value.real()};
      for (const auto& e : e_inc) row.push_back(e[k].value.real());
      cft.add_row(row);
    }
    res.tables.push_back(std::move(cft));
    LinePlot cp{"cf_overlay", "CF of Y(1): analytic vs rescaled and increment ensembles", "theta",
                "Re CF", false, false, {}};
    cp.series.push_back(function_series("analytic", thetas, cf));
    cp.series.push_back(ecf_real_series("Y(c)/c^H", ss, thetas));
    for (std::size_t j = 0; j < incs.size(); ++j) {
      cp.series.push_back(ecf_real_series("Y(s+1)-Y(s), s=" + label(shifts[j]), incs[j], thetas));
    }
    res.plots.push_back(std::move(cp));

    // Hurst regression on median |Y(t)|.
    const auto ht = sorted_unique(p.list("hurst_times"));
    const auto yh = ensemble(ht, rng.split(23));
    std::vector<double> med;
    Table hr{"hurst", {"t", "median_abs_Y"}, {}};
    for (std::size_t k = 0; k < ht.size(); ++k) {
      std::vector<double> a(reps);
      for (std::size_t i = 0; i < reps; ++i) a[i] = std::abs(yh[k][i]);
      med.push_back(stats::quantile(a, 0.5));
      hr.add_row({ht[k], med.back()});
    }
    const auto fit = stats::loglog_fit(ht, med);
    res.metrics.push_back(make_metric("hurst", fit.slope, Rule::abs, p.real("tol.hurst"), H));
    res.tables.push_back(std::move(hr));
    LinePlot hp{"hurst_loglog", "median |Y(t)| against t", "t", "median |Y(t)|", true, true, {}};
    hp.series.push_back({"simulated", ht, med, true});
    hp.series.push_back(function_series("slope H", ht, [&](double t) {
      return std::exp(fit.intercept) * std::pow(t, H);
    }));
    res.plots.push_back(std::move(hp));
  } else {
    const double one = 1.0;
    std::vector<double> series(reps), direct(reps);
    const Rng sm = rng.split(30), dm = rng.split(31);
    double scale = 0.0;
    if (beta == 0.0) {
      // Monte Carlo value of E|S_gamma(1)|^alpha Gamma(1 + alpha/gamma).
      const std::size_t m = p.count("oracle_samples");
      std::vector<double> a(m);
      const Rng om = rng.split(32);
      for_each_replicate(m, exec, [&](std::size_t i) {
        Rng r = om.split(i);
        a[i] = std::pow(std::abs(limits::endpoint_increment(yp.gamma(), 1.0, r)), yp.alpha());
      });
      const double mc = stats::mean_and_stderr(a).mean * std::tgamma(1.0 + yp.alpha() / yp.gamma());
      const double closed = limits::endpoint_abs_moment(yp.gamma(), yp.alpha()) *
                            std::tgamma(1.0 + yp.alpha() / yp.gamma());
      scale = std::pow(mc, 1.0 / yp.alpha());
      res.metrics.push_back(make_metric("levy_motion_exponent_mc", mc, Rule::info, std::nullopt, closed));
    }
    for_each_replicate(reps, exec, [&](std::size_t i) {
      Rng r = sm.split(i);
      limits::sample_Y_at(yp, std::span<const double>(&one, 1), 1.0, yo, std::span<double>(&series[i], 1), r);
      Rng q = dm.split(i);
      direct[i] = beta == 1.0 ? limits::sample_substable(yp, 1.0, limits::ControlScale::characteristic, q)
                              : stable::sample_sas(yp.alpha(), scale, q);
    });
    res.metrics.push_back(make_metric(beta == 1.0 ? "substable_ks" : "levy_motion_ks",
                                      stats::ks_two_sample(series, direct), Rule::max,
                                      p.real("tol.boundary_ks")));
    LinePlot cdf{"boundary_cdf", "series vs direct boundary law", "x", "CDF", false, false, {}};
    cdf.series.push_back(ecdf_series("series", series));
    cdf.series.push_back(ecdf_series("direct", direct));
    res.plots.push_back(std::move(cdf));
  }

  // A few Y paths.
  const auto grid = uniform_grid(p.real("path_horizon"), p.count("path_points"));
  Table paths{"Y_paths", {"t"}, {}};
  LinePlot pp{"Y_paths", "Y paths", "t", "Y(t)", false, false, {}};
  std::vector<SamplePath> sp;
  for (std::size_t j = 0; j < p.count("path_count"); ++j) {
    Rng r = rng.split(40).split(j);
    Rng ar = r.split(0);
    const auto budget = stable::SeriesBudget::draw(yo.terms, ar);
    sp.push_back(limits::sample_Y(yp, grid, budget, yo, r));
    paths.header.push_back("path" + std::to_string(j));
    pp.series.push_back({"path " + std::to_string(j), grid, sp.back().values, false});
  }
  for (std::size_t k = 0; k < grid.size(); ++k) {
    std::vector<double> row{grid[k]};
    for (const auto& s : sp) row.push_back(s.values[k]);
    paths.add_row(row);
  }
  res.tables.push_back(std::move(paths));
  res.plots.push_back(std::move(pp));
  return res;
}

// ---- main-fclt ------------------------------------------------------------

ExperimentResult run_main_fclt(const Params& p, const Rng& rng, Execution exec) {
  ExperimentResult res;
  idproc::IdProcessSpec spec;
  spec.chain = build_chain(p);
  require(spec.chain->atom_count() >= 2, "main-fclt needs a chain with at least two atoms");
  spec.f = chains::two_atom_mean_zero(*spec.chain);
  const double alpha = p.real("alpha");
  spec.levy = p.text("levy") == "pareto_cutoff" ? stable::LevyTailSpec::pareto_cutoff(alpha)
                                                : stable::LevyTailSpec::pure_stable(alpha);
  spec.n = p.integer("n");
  spec.horizon = 1.0;
  spec.estimator_replicates = p.count("estimator_replicates");
  const double beta = spec.chain->beta();

  idproc::FcltOptions fo;
  fo.times = sorted_unique(p.list("times"));
  fo.thetas = theta_grid(p);
  fo.lhs.terms = p.count("terms");
  fo.lhs.pilot_paths = p.count("pilot_paths");
  fo.lhs.remainder = p.boolean("remainder");
  fo.rhs.terms = p.count("terms");
  fo.rhs.remainder = p.boolean("remainder");
  const bool tail = p.text("scale") == "tail";
  fo.rhs.scale = tail ? limits::ControlScale::tail : limits::ControlScale::characteristic;
  fo.exec = exec;
  Rng fr = rng.split(50);
  const auto rep = idproc::fclt_experiment(spec, p.count("replicates"), fo, fr);

  res.metrics.push_back(make_metric("c_n", rep.norm.c_n, Rule::info));
  res.metrics.push_back(make_metric("cn_consistency", rep.norm.consistency, Rule::info));
  res.metrics.push_back(make_metric("sigma_f2", rep.sigma_f * rep.sigma_f, Rule::info));
  const double alt = tail ? std::pow(2.0, -1.0 / alpha) : std::pow(2.0, 1.0 / alpha);
  for (std::size_t i = 0; i < rep.times.size(); ++i) {
    const std::string t = "[t=" + label(rep.times[i]) + "]";
    res.metrics.push_back(make_metric("cf_gap" + t, rep.max_cf_gap[i], Rule::max, p.real("tol.cf_gap")));
    res.metrics.push_back(make_metric("ks" + t, rep.ks[i], Rule::info));
    if (p.boolean("compare_conventions")) {
      std::vector<double> other = rep.rhs[i];
      for (auto& v : other) v *= alt;
      res.metrics.push_back(make_metric(
          std::string("cf_gap_") + (tail ? "characteristic" : "tail") + t,
          stats::max_ecf_distance(rep.lhs[i], other, rep.thetas), Rule::info));
    }
  }
  const std::size_t last = rep.times.size() - 1;
  Table cft{"cf", {"theta", "ecf_partial_sums", "ecf_limit"}, {}};
  const auto el = stats::ecf(rep.lhs[last], rep.thetas);
  const auto er = stats::ecf(rep.rhs[last], rep.thetas);
  for (std::size_t k = 0; k < rep.thetas.size(); ++k) {
    cft.add_row({rep.thetas[k], el[k].value.real(), er[k].value.real()});
  }
  res.tables.push_back(std::move(cft));
  LinePlot cp{"cf_overlay", "CF at t=" + label(rep.times[last]) + ": partial sums vs limit", "theta",
              "Re CF", false, false, {}};
  cp.series.push_back(ecf_real_series("c_n^-1 S_n", rep.lhs[last], rep.thetas));
  cp.series.push_back(ecf_real_series("limit", rep.rhs[last], rep.thetas));
  res.plots.push_back(std::move(cp));

  if (p.boolean("cn_check")) {
    const auto ns = stats::log_spaced(p.integer("cn_n_min"), p.integer("cn_n_max"), p.count("cn_points"));
    std::vector<double> xs, cs;
    Table ct{"cn", {"n", "a_n", "mu_tau_n", "c_n", "consistency"}, {}};
    for (std::size_t k = 0; k < ns.size(); ++k) {
      idproc::IdProcessSpec s = spec;
      s.n = ns[k];
      Rng r = rng.split(60).split(k);
      const auto nr = idproc::compute_cn(s, r);
      xs.push_back(static_cast<double>(ns[k]));
      cs.push_back(nr.c_n);
      ct.add_row({xs.back(), nr.a_n, nr.mu_tau_n, nr.c_n, nr.consistency});
    }
    const auto fit = stats::loglog_fit(xs, cs);
    res.metrics.push_back(make_metric("cn_slope", fit.slope, Rule::abs, p.real("tol.cn_slope"),
                                      beta / 2.0 + (1.0 - beta) / alpha));
    res.tables.push_back(std::move(ct));
    LinePlot lp{"cn_loglog", "c_n against n", "n", "c_n", true, true, {}};
    lp.series.push_back({"c_n", xs, cs, true});
    lp.series.push_back(function_series("fitted", xs, [&](double x) {
      return std::exp(fit.intercept) * std::pow(x, fit.slope);
    }));
    res.plots.push_back(std::move(lp));
  }
  return res;
}

// ---- moments --------------------------------------------------------------

double poisson_moment(double lambda, double p) {
  double s = 0.0;
  for (int k = 1; k < 400; ++k) {
    s += std::exp(p * std::log(k) + k * std::log(lambda) - lambda - std::lgamma(k + 1.0));
  }
  return s;
}

double skellam_abs_moment(double lambda, double p) {
  double s = 0.0;
  for (int a = 0; a < 200; ++a) {
    for (int b = 0; b < 200; ++b) {
      if (a == b) continue;
      s += std::exp(p * std::log(std::abs(a - b)) + (a + b) * std::log(lambda) - 2.0 * lambda -
                    std::lgamma(a + 1.0) - std::lgamma(b + 1.0));
    }
  }
  return s;
}

ExperimentResult run_moments(const Params& p, const Rng& rng, Execution exec) {
  using namespace momentbounds;
  ExperimentResult res;
  const std::size_t mc = p.count("mc_size");
  const auto fam = standard_family();
  Table rt{"ratios", {"set", "member", "p", "lhs", "lhs_se", "rhs", "ratio", "ratio_se"}, {}};
  LinePlot rp{"ratios", "lhs/rhs ratios (calibration then holdout)", "member", "ratio", false, false, {}};

  for (const bool symmetric : {false, true}) {
    const double pp = symmetric ? p.real("p_sym") : p.real("p_pos");
    const std::uint64_t base = symmetric ? 2000 : 1000;
    const auto check = [&](const PosLevySpec& s, std::uint64_t key) {
      Rng r = rng.split(base + key);
      return symmetric ? check_sym_bound(SymLevySpec(s), pp, mc, r, exec) : check_pos_bound(s, pp, mc, r, exec);
    };
    std::vector<BoundReport> cal, hold;
    for (std::size_t i = 0; i < fam.members.size(); ++i) cal.push_back(check(fam.members[i], i));
    for (std::size_t i = 0; i < fam.holdout.size(); ++i) hold.push_back(check(fam.holdout[i], 100 + i));
    const auto c = calibrate_cp(cal, hold, p.real("tol.holdout_se"));
    const std::string tag = "[p=" + label(pp) + "]";
    double worst = -std::numeric_limits<double>::infinity();
    for (const double e : c.holdout_excess) worst = std::max(worst, e);
    res.metrics.push_back(make_metric("calibrated_cp" + tag, c.constant, Rule::info));
    res.metrics.push_back(make_metric("holdout_max_excess_se" + tag, worst, Rule::max,
                                      p.real("tol.holdout_se")));
    Series sc{std::string(symmetric ? "symmetric" : "positive") + " p=" + label(pp), {}, {}, true};
    const auto row = [&](const std::string& set, const std::string& name, const BoundReport& b) {
      rt.add_row({set, name, format_number(pp), format_number(b.lhs), format_number(b.lhs_se),
                  format_number(b.rhs), format_number(b.ratio), format_number(b.ratio_se)});
      sc.x.push_back(static_cast<double>(sc.x.size()));
      sc.y.push_back(b.ratio);
    };
    for (std::size_t i = 0; i < cal.size(); ++i) row("calibration", fam.names[i], cal[i]);
    for (std::size_t i = 0; i < hold.size(); ++i) row("holdout", fam.holdout_names[i], hold[i]);
    rp.series.push_back(std::move(sc));
  }
  res.tables.push_back(std::move(rt));
  res.plots.push_back(std::move(rp));

  {
    const double pp = p.real("p_pos");
    Rng r = rng.split(3000);
    const auto b = check_pos_bound(PosLevySpec{}.add_atom(1.0, 1.0), pp, mc, r, exec);
    res.metrics.push_back(make_metric("poisson1_moment[p=" + label(pp) + "]", b.lhs, Rule::rel,
                                      p.real("tol.poisson"), poisson_moment(1.0, pp)));
    res.metrics.push_back(make_metric("poisson1_rhs[p=" + label(pp) + "]", b.rhs, Rule::info));
  }
  {
    const double pp = p.real("p_sym");
    Rng r = rng.split(3001);
    const auto b = check_sym_bound(SymLevySpec(PosLevySpec{}.add_atom(1.0, 1.0)), pp, mc, r, exec);
    res.metrics.push_back(make_metric("sym_poisson_moment[p=" + label(pp) + "]", b.lhs, Rule::rel,
                                      p.real("tol.poisson"), skellam_abs_moment(1.0, pp)));
  }
  if (p.boolean("mz")) {
    const double pp = p.real("p_sym");
    double worst = 0.0;
    Table mt{"mz_ratios", {"member", "ratio", "ratio_se"}, {}};
    for (std::size_t i = 0; i < fam.members.size(); ++i) {
      Rng r = rng.split(4000 + i);
      const auto b = mz_ratio(SymLevySpec(fam.members[i]), pp, mc, r, exec);
      worst = std::max(worst, b.ratio);
      mt.add_row({fam.names[i], format_number(b.ratio), format_number(b.ratio_se)});
    }
    res.metrics.push_back(make_metric("mz_max_ratio[p=" + label(pp) + "]", worst, Rule::info));
    res.tables.push_back(std::move(mt));
  }
  {
    // Infinite-mass symmetric measure k |y|^{-1-a} on 0 < |y| < upper, through nu_m.
    const double pp = p.real("p_sym");
    const SymLevySpec inf_mass(PosLevySpec{}.add_power(1.0, p.real("truncation_index"), 0.0,
                                                       p.real("truncation_upper")));
    Rng r = rng.split(5000);
    const auto steps = truncation_study(inf_mass, pp, p.list("truncation_levels"), mc, r, exec);
    Table tt{"truncation", {"m", "lhs", "lhs_se", "rhs", "ratio", "ratio_se"}, {}};
    for (const auto& s : steps) {
      tt.add_row({s.m, s.report.lhs, s.report.lhs_se, s.report.rhs, s.report.ratio, s.report.ratio_se});
      res.metrics.push_back(make_metric("truncation_ratio[m=" + label(s.m) + "]", s.report.ratio, Rule::info));
    }
    res.tables.push_back(std::move(tt));
  }
  return res;
}

std::vector<KindSpec> make_kinds() {
  std::vector<KindSpec> k;
  k.push_back({"subordinator",
               "Mittag-Leffler process moments and the overshoot identity",
               "M_beta, the inverse of a standard beta-stable subordinator, has E M_beta(1) = "
               "1/Gamma(1+beta); by the strong Markov property at the first passage over r, "
               "M(t+r) - M(r) has the law of M((t - delta_r)_+), delta_r the overshoot of level r.",
               {f_list("betas", "0.3,0.5,0.8", "beta values for the moment check", 0.0, 1.0, false, false),
                f_int("samples", "100000", "Monte Carlo samples per beta", 2),
                f_tol("tol.ml_mean", "0.02", "relative tolerance for E M_beta(1)"),
                f_bool("overshoot", "true", "run the overshoot identity check"),
                f_real("overshoot_beta", "0.5", "beta of the overshoot check", 0.0, 1.0, true, true),
                f_real("overshoot_r", "1", "passage level r", 0.0, std::nullopt, true),
                f_real("overshoot_t", "1", "time increment t", 0.0, std::nullopt, true),
                f_int("overshoot_samples", "50000", "samples per ensemble", 2),
                f_tol("tol.overshoot_ks", "0.02", "two-sample KS tolerance"),
                f_real("path_horizon", "1", "horizon of the exported paths", 0.0, std::nullopt, true),
                f_int("path_points", "400", "intervals of the exported paths", 1)}});

  auto cf = chain_fields({"renewal", "renewal-beta1", "ssrw", "gaussian"});
  cf.insert(cf.end(),
            {f_int("n", "100000", "time horizon n", 1),
             f_int("replicates", "10000", "replicates of the marginal check", 2),
             f_bool("marginal_check", "true",
                    "compare S_n(f)/sqrt(a_n) with sqrt(Gamma(beta+1)) sigma_f B(M_beta(1))"),
             f_tol("tol.ks", "0.03", "two-sample KS tolerance of the marginal check"),
             f_int("an_replicates", "1000", "Monte Carlo replicates for a_n when no closed form exists", 2),
             f_real("an_reference", "none", "reference value of a_n / sqrt(n); enables that check", 0.0,
                    std::nullopt, true),
             f_tol("tol.an", "0.1", "relative tolerance of a_n / sqrt(n)"),
             f_int("wandering_n", "1000000", "n of the wandering-rate check (0 disables)", 0),
             f_int("wandering_replicates", "20000", "importance samples when no closed form exists", 2),
             f_tol("tol.wandering", "0.1", "relative tolerance of n / (a_n mu(tau_D <= n))"),
             f_int("sigma_kmax", "65536", "largest lag of the sigma_f^2 series", 8),
             f_int("path_count", "5", "exported sample paths", 0),
             f_int("path_points", "200", "intervals of the exported paths", 1)});
  k.push_back({"chain-fclt",
               "Functional CLT for partial sums of a null-recurrent chain",
               "For a beta-regular chain and f supported on D with int f dpi = 0, "
               "S_{nt}(f)/sqrt(a_n) converges to sqrt(Gamma(beta+1)) sigma_f B(M_beta(t)); the "
               "wandering rate satisfies n / (a_n mu(tau_D <= n)) -> Gamma(1+beta) Gamma(2-beta); "
               "for walks with standard Gaussian steps a_n grows like a constant times sqrt(n).",
               cf});

  auto ef = chain_fields({"renewal", "ssrw"});
  ef.insert(ef.end(),
            {f_int("n", "1000000", "time scale n", 1),
             f_real("L", "1", "window length L (chain started from mu on {tau_D <= nL})", 0.0,
                    std::nullopt, true),
             f_int("replicates", "20000", "replicates", 2),
             f_int("an_replicates", "1000", "Monte Carlo replicates for a_n when no closed form exists", 2),
             f_int("sigma_kmax", "65536", "largest lag of the sigma_f^2 series", 8),
             f_tol("tol.entrance_ks", "0.02", "one-sample KS tolerance of the entrance fraction"),
             f_tol("tol.path_ks", "0.03", "two-sample KS tolerance of S_{nL}(f)/sqrt(a_n)")});
  k.push_back({"entrance-fclt",
               "Entrance-time law and shifted limit for chains started off D",
               "Started from mu restricted to {tau_D <= nL}, the entrance fraction tau_D/n has "
               "limit law P(T <= x) = (x/L)^{1-beta}, and S_{nt}(f)/sqrt(a_n) converges to "
               "sqrt(Gamma(beta+1)) sigma_f B(M_beta((t - T)_+)).",
               ef});

  k.push_back({"sssi",
               "Self-similarity, stationary increments and boundary cases of Y_{alpha,beta,gamma}",
               "Y_{alpha,beta,gamma} is H-self-similar with stationary increments, "
               "H = beta/gamma + (1-beta)/alpha. At beta = 1 it is sub-stable, W^{1/gamma} S_gamma "
               "with W positive (alpha/gamma)-stable; at beta = 0 it is an SaS Levy motion whose "
               "scale^alpha is E|S_gamma(1)|^alpha Gamma(1 + alpha/gamma).",
               {f_real("alpha", "", "stability index of the random measure", 0.0, 2.0, true, true),
                f_real("beta", "", "Mittag-Leffler index", 0.0, 1.0),
                f_real("gamma", "2", "stability index of the endpoint process", 0.0, 2.0, true, false),
                f_int("replicates", "20000", "ensemble size", 2),
                f_int("terms", "1000", "LePage series terms J", 1),
                f_bool("remainder", "true", "approximate the discarded series tail"),
                f_real("theta_max", "3", "CF grid is [-theta_max, theta_max]", 0.0, std::nullopt, true),
                f_int("theta_count", "61", "CF grid points", 2),
                f_real("selfsim_c", "2", "self-similarity factor c", 0.0, std::nullopt, true),
                f_list("shifts", "0,0.5,1", "stationary-increment shifts s", 0.0),
                f_list("hurst_times", "0.25,0.5,1,2,4", "times of the Hurst regression", 0.0,
                       std::nullopt, true),
                f_int("inner_samples", "4000", "inner Monte Carlo size of the analytic CF", 16),
                f_tol("cf_rel_tol", "0.02", "maximum relative standard error of the analytic CF exponent"),
                f_int("oracle_samples", "1000000", "Monte Carlo size of the beta = 0 scale oracle", 2),
                f_tol("tol.selfsim", "0.03", "max CF gap of Y(c)/c^H against Y(1)"),
                f_tol("tol.increments", "0.03", "max CF gap of Y(s+1)-Y(s) against Y(1)"),
                f_tol("tol.hurst", "0.05", "absolute tolerance of the fitted Hurst index"),
                f_tol("tol.boundary_ks", "0.02", "two-sample KS tolerance at beta = 0 or 1"),
                f_real("path_horizon", "1", "horizon of the exported paths", 0.0, std::nullopt, true),
                f_int("path_points", "200", "intervals of the exported paths", 1),
                f_int("path_count", "3", "exported sample paths", 0)}});

  auto mf = chain_fields({"renewal", "ssrw"});
  mf.insert(mf.end(),
            {f_real("alpha", "", "stability index of the local Levy measure", 0.0, 2.0, true, true),
             f_choice("levy", "pure_stable", "local Levy tail rho", {"pure_stable", "pareto_cutoff"}),
             f_int("n", "100000", "time scale n", 1),
             f_int("replicates", "10000", "ensemble size", 2),
             f_int("terms", "1000", "LePage series terms J on both sides", 1),
             f_int("pilot_paths", "20000", "paths for the remainder covariance", 2),
             f_bool("remainder", "true", "approximate the discarded series tails"),
             f_int("estimator_replicates", "20000", "Monte Carlo size when a_n or mu(tau_D <= n) has no closed form", 2),
             f_choice("scale", "tail", "normalization of the limiting SaS random measure",
                      {"tail", "characteristic"}),
             f_bool("compare_conventions", "true", "also report the CF gap under the other normalization"),
             f_list("times", "1", "evaluation times in (0, 1]", 0.0, 1.0, true, false),
             f_real("theta_max", "3", "CF grid is [-theta_max, theta_max]", 0.0, std::nullopt, true),
             f_int("theta_count", "61", "CF grid points", 2),
             f_int("sigma_kmax", "65536", "largest lag of the sigma_f^2 series", 8),
             f_tol("tol.cf_gap", "0.05", "max CF discrepancy"),
             f_bool("cn_check", "true", "fit the log-log slope of c_n"),
             f_int("cn_n_min", "1000", "smallest n of the c_n fit", 1),
             f_int("cn_n_max", "1000000", "largest n of the c_n fit", 2),
             f_int("cn_points", "7", "points of the c_n fit", 2),
             f_tol("tol.cn_slope", "0.05", "absolute tolerance of the c_n slope")});
  k.push_back({"main-fclt",
               "FCLT for stationary SaS processes driven by a null-recurrent chain",
               "For X_k = int f(x_k) M(dx) with M an SaS random measure over the path space and "
               "local Levy tail rho, c_n^{-1} sum_{k<=nt} X_k converges to sqrt(Gamma(beta+1)) "
               "sigma_f Y_{alpha,beta,2}(t). The normalization is c_n = C_alpha^{-1/alpha} "
               "a_n^{1/2} rho^{<-}(1/mu(tau_D <= n)), with C_alpha the SaS tail constant, a_n "
               "the occupation sum and mu(tau_D <= n) the wandering rate; c_n is regularly "
               "varying with index beta/2 + (1-beta)/alpha.",
               mf});

  k.push_back({"moments",
               "Fractional-moment bounds for infinitely divisible variables",
               "For positive ID X with Levy measure nu and 1 < p < 2, E X^p <= c_p (int y^p dnu + "
               "(int y dnu)^p); for symmetric ID Y and 2 < p < 4, E|Y|^p <= c_p (int |y|^p dnu + "
               "(int y^2 dnu)^{p/2}). c_p is calibrated as the largest ratio over ten measures and "
               "checked on five holdout measures; infinite-mass measures enter through their "
               "truncations to |y| > 1/m.",
               {f_real("p_pos", "1.5", "moment order for positive variables", 1.0, 2.0, true, true),
                f_real("p_sym", "2.5", "moment order for symmetric variables", 2.0, 4.0, true, true),
                f_int("mc_size", "200000", "compound-Poisson samples per measure", 2),
                f_tol("tol.holdout_se", "2", "allowed holdout excess over c_p in standard errors"),
                f_tol("tol.poisson", "0.02", "relative tolerance of the Poisson moments"),
                f_bool("mz", "true", "report Marcinkiewicz-Zygmund ratios"),
                f_list("truncation_levels", "1,4,16", "truncation levels m", 0.0, std::nullopt, true),
                f_real("truncation_index", "1", "index a of the infinite-mass measure |y|^{-1-a}", 0.0,
                       2.0, true, true),
                f_real("truncation_upper", "10", "support bound of the infinite-mass measure", 0.0,
                       std::nullopt, true)}});
  return k;
}

}  // namespace

const std::vector<KindSpec>& experiment_kinds() {
  static const std::vector<KindSpec> kinds = make_kinds();
  return kinds;
}

const KindSpec& find_kind(const std::string& kind) {
  for (const auto& k : experiment_kinds()) {
    if (k.kind == kind) return k;
  }
  std::string names;
  for (const auto& k : experiment_kinds()) names += (names.empty() ? "" : ", ") + k.kind;
  throw ConfigError("unknown experiment kind '" + kind + "' (known: " + names + ")");
}

std::string describe_kind(const std::string& kind) {
  const auto& k = find_kind(kind);
  std::ostringstream os;
  os << k.kind << ": " << k.summary << "\n\n" << k.verifies << "\n\nKeys:\n";
  for (const auto& f : k.fields) {
    os << "  " << f.key << " (" << type_name(f.type);
    if (!f.choices.empty()) {
      os << ":";
      for (const auto& c : f.choices) os << " " << c;
    }
    os << ")";
    if (f.default_value.empty()) {
      os << " required";
    } else if (f.default_value == "none") {
      os << " optional";
    } else {
      os << " default " << f.default_value;
    }
    os << "\n      " << f.help << "\n";
  }
  return os.str();
}

std::uint64_t fnv1a64(const std::string& s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

ExperimentResult run_experiment(const std::string& kind, const Params& params, Rng rng,
                                Execution exec) {
  if (kind == "subordinator") return run_subordinator(params, rng, exec);
  if (kind == "chain-fclt") return run_chain_fclt(params, rng, exec);
  if (kind == "entrance-fclt") return run_entrance(params, rng, exec);
  if (kind == "sssi") return run_sssi(params, rng, exec);
  if (kind == "main-fclt") return run_main_fclt(params, rng, exec);
  if (kind == "moments") return run_moments(params, rng, exec);
  (void)find_kind(kind);
  throw ConfigError("kind '" + kind + "' has no runner");
}

int run_config(const std::string& config_path, const RunOptions& options) {
  namespace fs = std::filesystem;
  const ConfigFile cfg = parse_config(config_path);
  const GlobalSettings globals = validate_globals(cfg);
  const std::uint64_t seed = options.seed.value_or(globals.seed);
  const bool plots = options.plots && globals.plots;

  struct Planned {
    std::string name, kind;
    Params params;
  };
  std::vector<Planned> plan;
  for (const auto& s : cfg.sections) {
    const auto it = s.entries.find("kind");
    if (it == s.entries.end()) {
      throw ConfigError(cfg.path + ":" + std::to_string(s.line) + ": [experiment." + s.name +
                        "]: missing required key 'kind'");
    }
    const KindSpec* spec = nullptr;
    try {
      spec = &find_kind(it->second.value);
    } catch (const ConfigError& e) {
      throw ConfigError(cfg.path + ":" + std::to_string(it->second.line) + ": kind: " + e.what());
    }
    plan.push_back({s.name, spec->kind, validate_section(s, *spec, cfg.path)});
  }

  if (options.jobs) omp_set_num_threads(std::max(1, *options.jobs));
  const Execution exec = Execution::parallel;
  fs::create_directories(options.out_dir);
  if (plots) fs::create_directories(fs::path(options.out_dir) / "plots");

  const Rng master(seed);
  std::vector<ExperimentResult> results;
  std::vector<double> seconds;
  for (const auto& e : plan) {
    if (!options.quiet) std::cout << "[" << e.name << "] " << e.kind << " ..." << std::flush;
    const auto start = std::chrono::steady_clock::now();
    results.push_back(run_experiment(e.kind, e.params, master.split(fnv1a64(e.name)), exec));
    seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    if (!options.quiet) {
      std::cout << (results.back().passed() ? " PASS" : " FAIL") << " (" << std::fixed
                << std::setprecision(1) << seconds.back() << " s)" << std::defaultfloat << std::endl;
    }
  }
  // Wall-clock times live outside results.csv so that file stays reproducible.
  Table timing{"timing", {"experiment", "seconds"}, {}};
  for (std::size_t i = 0; i < plan.size(); ++i) timing.add_row({plan[i].name, format_number(seconds[i])});
  std::ofstream(fs::path(options.out_dir) / "timing.csv", std::ios::binary) << render_csv(timing);

  Table rt{"results", {"experiment", "kind", "metric", "value", "reference", "tolerance", "rule", "pass"}, {}};
  std::ostringstream summary;
  summary << "config: " << config_path << "\nseed: " << seed << "\n\n";
  std::size_t total = 0, failed = 0;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const auto& r = results[i];
    summary << "[" << plan[i].name << "] " << plan[i].kind << ": " << (r.passed() ? "PASS" : "FAIL") << "\n";
    for (const auto& m : r.metrics) {
      rt.add_row({plan[i].name, plan[i].kind, m.name, format_number(m.value),
                  m.reference ? format_number(*m.reference) : "",
                  m.tolerance ? format_number(*m.tolerance) : "", to_string(m.rule),
                  m.pass ? "true" : "false"});
      if (m.rule == Rule::info) {
        summary << "  info  " << m.name << " = " << format_number(m.value);
        if (m.reference) summary << " (reference " << format_number(*m.reference) << ")";
        summary << "\n";
        continue;
      }
      ++total;
      if (!m.pass) ++failed;
      summary << "  " << (m.pass ? "PASS" : "FAIL") << "  " << m.name << " = " << format_number(m.value);
      if (m.rule == Rule::max) {
        summary << " <= " << format_number(*m.tolerance);
      } else {
        summary << " vs " << format_number(*m.reference) << " (" << to_string(m.rule) << " tol "
                << format_number(*m.tolerance) << ")";
      }
      summary << "\n";
    }
    for (const auto& t : r.tables) {
      std::ofstream(fs::path(options.out_dir) / (plan[i].name + "__" + t.name + ".csv"), std::ios::binary)
          << render_csv(t);
    }
    if (plots) {
      for (const auto& pl : r.plots) {
        std::ofstream(fs::path(options.out_dir) / "plots" / (plan[i].name + "__" + pl.name + ".svg"))
            << render_svg(pl);
      }
    }
  }
  summary << "\noverall: " << (failed == 0 ? "PASS" : "FAIL") << " (" << total - failed << "/" << total
          << " checks passed)\n";
  std::ofstream(fs::path(options.out_dir) / "results.csv", std::ios::binary) << render_csv(rt);
  std::ofstream(fs::path(options.out_dir) / "summary.txt") << summary.str();
  if (!options.quiet) std::cout << "overall: " << (failed == 0 ? "PASS" : "FAIL") << std::endl;
  return failed == 0 ? kPass : kToleranceFailure;
}

}  // namespace nullrec::cli
