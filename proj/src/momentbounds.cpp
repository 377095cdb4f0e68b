#include "nullrec/momentbounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "nullrec/errors.hpp"
#include "nullrec/stats.hpp"

namespace nullrec::momentbounds {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// int_lo^hi y^{e-1} dy, +inf when divergent.
double power_integral(double e, double lo, double hi) {
  if (e == 0.0) {
    if (lo == 0.0 || std::isinf(hi)) return kInf;
    return std::log(hi / lo);
  }
  if (e > 0.0) {
    if (std::isinf(hi)) return kInf;
    return (std::pow(hi, e) - std::pow(lo, e)) / e;
  }
  if (lo == 0.0) return kInf;
  const double top = std::isinf(hi) ? 0.0 : std::pow(hi, e);
  return (std::pow(lo, e) - top) / (-e);
}

double piece_mass(const PosLevySpec::PowerPiece& pc) {
  return pc.coef * power_integral(-pc.index, pc.lo, pc.hi);
}

struct Ensemble {
  std::vector<double> abs_p;  // |X|^p
  std::vector<double> mz;     // (sum W_j^2)^{p/2}
};

// Compound-Poisson draws of sum_{j <= N} W_j, N ~ Poisson(mass).
template <class Jump>
Ensemble simulate(double mass, double p, std::size_t mc_size, bool with_mz, Jump&& jump, Rng& rng,
                  Execution exec) {
  Ensemble e;
  e.abs_p.assign(mc_size, 0.0);
  if (with_mz) e.mz.assign(mc_size, 0.0);
  if (mass == 0.0) return e;
  const Rng master = rng.split(0);
  for_each_replicate(mc_size, exec, [&](std::size_t i) {
    Rng r = master.split(i);
    std::poisson_distribution<long long> pois(mass);
    const long long n = pois(r);
    double sum = 0.0, sq = 0.0;
    for (long long j = 0; j < n; ++j) {
      const double w = jump(r);
      sum += w;
      sq += w * w;
    }
    e.abs_p[i] = std::pow(std::abs(sum), p);
    if (with_mz) e.mz[i] = std::pow(sq, p / 2.0);
  });
  return e;
}

BoundReport finish(const std::vector<double>& samples, double rhs) {
  BoundReport r;
  const auto est = stats::mean_and_stderr(samples);
  r.lhs = est.mean;
  r.lhs_se = est.std_error;
  r.rhs = rhs;
  if (std::isinf(rhs)) {
    r.trivially_holds = true;
    return r;
  }
  if (rhs > 0.0) {
    r.ratio = r.lhs / rhs;
    r.ratio_se = r.lhs_se / rhs;
  }
  return r;
}

void require_finite_mass(double mass) {
  require(std::isfinite(mass),
          "Levy measure has infinite mass; simulate its truncations nu_m instead");
}

}  // namespace

PosLevySpec& PosLevySpec::add_atom(double y, double mass) {
  require(y > 0.0 && std::isfinite(y), "atom location must be positive and finite");
  require(mass > 0.0 && std::isfinite(mass), "atom mass must be positive and finite");
  atoms_.push_back({y, mass});
  return *this;
}

PosLevySpec& PosLevySpec::add_power(double coef, double index, double lo, double hi) {
  require(coef > 0.0 && std::isfinite(coef), "power piece coefficient must be positive");
  require(index != 0.0 && std::isfinite(index), "power piece index must be nonzero");
  require(lo >= 0.0 && hi > lo, "power piece needs 0 <= lo < hi");
  pieces_.push_back({coef, index, lo, hi});
  return *this;
}

PosLevySpec& PosLevySpec::add_power_mass(double mass, double index, double lo, double hi) {
  require(lo > 0.0, "mass-normalized power piece needs lo > 0");
  require(mass > 0.0 && std::isfinite(mass), "power piece mass must be positive and finite");
  const double unit = power_integral(-index, lo, hi);
  require(std::isfinite(unit), "power piece has infinite mass");
  return add_power(mass / unit, index, lo, hi);
}

double PosLevySpec::moment(double q) const {
  double total = 0.0;
  for (const auto& a : atoms_) total += a.mass * std::pow(a.y, q);
  for (const auto& pc : pieces_) total += pc.coef * power_integral(q - pc.index, pc.lo, pc.hi);
  return total;
}

double PosLevySpec::sample_jump(Rng& rng) const {
  const double mass = total_mass();
  require(mass > 0.0 && std::isfinite(mass), "jump sampling needs finite nonzero mass");
  double u = rng.uniform() * mass;
  for (const auto& a : atoms_) {
    if (u < a.mass) return a.y;
    u -= a.mass;
  }
  const PowerPiece* chosen = &pieces_.back();
  for (const auto& pc : pieces_) {
    const double m = piece_mass(pc);
    if (u < m) {
      chosen = &pc;
      break;
    }
    u -= m;
  }
  // Inverse CDF: y^{-a} uniform between lo^{-a} and hi^{-a}.
  const double a = chosen->index;
  const double glo = chosen->lo == 0.0 ? 0.0 : std::pow(chosen->lo, -a);
  const double ghi = std::isinf(chosen->hi) ? 0.0 : std::pow(chosen->hi, -a);
  const double v = rng.uniform();
  return std::pow(glo + v * (ghi - glo), -1.0 / a);
}

PosLevySpec PosLevySpec::scaled(double c) const {
  require(c > 0.0 && std::isfinite(c), "scale factor must be positive");
  PosLevySpec s;
  for (const auto& a : atoms_) s.atoms_.push_back({c * a.y, a.mass});
  for (const auto& pc : pieces_) {
    s.pieces_.push_back({pc.coef * std::pow(c, pc.index), pc.index, c * pc.lo, c * pc.hi});
  }
  return s;
}

PosLevySpec PosLevySpec::truncated(double m) const {
  require(m > 0.0, "truncation level must be positive");
  const double cut = 1.0 / m;
  PosLevySpec s;
  for (const auto& a : atoms_) {
    if (a.y > cut) s.atoms_.push_back(a);
  }
  for (const auto& pc : pieces_) {
    const double lo = std::max(pc.lo, cut);
    if (lo < pc.hi) s.pieces_.push_back({pc.coef, pc.index, lo, pc.hi});
  }
  return s;
}

void PosLevySpec::validate() const {
  for (const auto& a : atoms_) {
    require(a.y > 0.0 && a.mass > 0.0, "atoms need positive location and mass");
  }
  for (const auto& pc : pieces_) {
    require(pc.coef > 0.0 && pc.index != 0.0 && pc.lo >= 0.0 && pc.hi > pc.lo,
            "invalid power piece");
  }
  require(std::isfinite(first_moment()), "positive Levy measure needs a finite first moment");
}

SymLevySpec::SymLevySpec(PosLevySpec half, bool reflected)
    : half_(std::move(half)), reflected_(reflected) {}

double SymLevySpec::sample_jump(Rng& rng) const {
  const double w = half_.sample_jump(rng);
  const int s = rng.sign();
  return reflected_ ? -s * w : s * w;
}

void SymLevySpec::validate() const {
  for (const auto& a : half_.atoms()) {
    require(a.y > 0.0 && a.mass > 0.0, "atoms need positive location and mass");
  }
  for (const auto& pc : half_.pieces()) {
    require(pc.coef > 0.0 && pc.index != 0.0 && pc.lo >= 0.0 && pc.hi > pc.lo,
            "invalid power piece");
  }
  require(std::isfinite(half_.truncated(1.0).moment(2.0)),
          "symmetric Levy measure needs int_{|y|>=1} y^2 dnu finite");
}

BoundReport check_pos_bound(const PosLevySpec& spec, double p, std::size_t mc_size, Rng& rng,
                            Execution exec) {
  require(p > 1.0 && p < 2.0, "positive moment bound needs 1 < p < 2");
  require(mc_size >= 2, "moment check needs at least two samples");
  spec.validate();
  const double mass = spec.total_mass();
  require_finite_mass(mass);
  const double rhs = spec.p_moment(p) + std::pow(spec.first_moment(), p);
  const auto e = simulate(mass, p, mc_size, false, [&](Rng& r) { return spec.sample_jump(r); },
                          rng, exec);
  return finish(e.abs_p, rhs);
}

BoundReport check_sym_bound(const SymLevySpec& spec, double p, std::size_t mc_size, Rng& rng,
                            Execution exec) {
  require(p > 2.0 && p < 4.0, "symmetric moment bound needs 2 < p < 4");
  require(mc_size >= 2, "moment check needs at least two samples");
  spec.validate();
  const double mass = spec.total_mass();
  require_finite_mass(mass);
  const double rhs = spec.p_moment(p) + std::pow(spec.second_moment(), p / 2.0);
  const auto e = simulate(mass, p, mc_size, false, [&](Rng& r) { return spec.sample_jump(r); },
                          rng, exec);
  return finish(e.abs_p, rhs);
}

BoundReport mz_ratio(const SymLevySpec& spec, double p, std::size_t mc_size, Rng& rng,
                     Execution exec) {
  require(p > 0.0, "moment order must be positive");
  require(mc_size >= 2, "moment check needs at least two samples");
  spec.validate();
  const double mass = spec.total_mass();
  require_finite_mass(mass);
  const auto e = simulate(mass, p, mc_size, true, [&](Rng& r) { return spec.sample_jump(r); },
                          rng, exec);
  const auto denom = stats::mean_and_stderr(e.mz);
  BoundReport r = finish(e.abs_p, denom.mean);
  if (denom.mean > 0.0) {
    // Delta method on the ratio of two correlated means.
    const auto n = static_cast<double>(mc_size);
    double cov = 0.0;
    for (std::size_t i = 0; i < mc_size; ++i) cov += (e.abs_p[i] - r.lhs) * (e.mz[i] - denom.mean);
    cov /= (n - 1.0) * n;
    const double var = (r.lhs_se * r.lhs_se - 2.0 * r.ratio * cov +
                        r.ratio * r.ratio * denom.std_error * denom.std_error) /
                       (denom.mean * denom.mean);
    r.ratio_se = std::sqrt(std::max(var, 0.0));
  }
  return r;
}

Calibration calibrate_cp(const std::vector<BoundReport>& calibration,
                         const std::vector<BoundReport>& holdout, double max_excess) {
  require(calibration.size() >= 10, "calibration family needs at least 10 members");
  Calibration c;
  c.max_excess = max_excess;
  for (std::size_t i = 0; i < calibration.size(); ++i) {
    c.ratios.push_back(calibration[i].ratio);
    if (i == 0 || calibration[i].ratio > c.constant) {
      c.constant = calibration[i].ratio;
      c.constant_se = calibration[i].ratio_se;
      c.argmax = i;
    }
  }
  for (std::size_t i = 0; i < holdout.size(); ++i) {
    const double r = holdout[i].ratio;
    const double se = std::hypot(holdout[i].ratio_se, c.constant_se);
    const double excess = se > 0.0 ? (r - c.constant) / se : (r > c.constant ? kInf : 0.0);
    c.holdout_ratios.push_back(r);
    c.holdout_excess.push_back(excess);
    if (excess > max_excess) c.violations.push_back(i);
  }
  return c;
}

std::vector<TruncationStep> truncation_study(const SymLevySpec& spec, double p,
                                             const std::vector<double>& levels,
                                             std::size_t mc_size, Rng& rng, Execution exec) {
  std::vector<TruncationStep> out;
  for (const double m : levels) {
    Rng r = rng;  // common random numbers across levels
    out.push_back({m, check_sym_bound(spec.truncated(m), p, mc_size, r, exec)});
  }
  return out;
}

StandardFamily standard_family() {
  StandardFamily f;
  const auto add = [](std::vector<std::string>& names, std::vector<PosLevySpec>& specs,
                      std::string name, PosLevySpec s) {
    names.push_back(std::move(name));
    specs.push_back(std::move(s));
  };
  add(f.names, f.members, "atom(1;0.1)", PosLevySpec{}.add_atom(1.0, 0.1));
  add(f.names, f.members, "atom(1;0.3)", PosLevySpec{}.add_atom(1.0, 0.3));
  add(f.names, f.members, "atom(1;1)", PosLevySpec{}.add_atom(1.0, 1.0));
  add(f.names, f.members, "atom(1;3)", PosLevySpec{}.add_atom(1.0, 3.0));
  add(f.names, f.members, "atom(1;10)", PosLevySpec{}.add_atom(1.0, 10.0));
  add(f.names, f.members, "atoms(0.5;2)+(3;0.2)",
      PosLevySpec{}.add_atom(0.5, 2.0).add_atom(3.0, 0.2));
  add(f.names, f.members, "power(a=0.5;[0.01,1];m=1)",
      PosLevySpec{}.add_power_mass(1.0, 0.5, 0.01, 1.0));
  add(f.names, f.members, "power(a=3.5;[1,100];m=2)",
      PosLevySpec{}.add_power_mass(2.0, 3.5, 1.0, 100.0));
  add(f.names, f.members, "power(a=1.2;[0.1,20];m=0.3)",
      PosLevySpec{}.add_power_mass(0.3, 1.2, 0.1, 20.0));
  add(f.names, f.members, "atom(2;0.5)+power(a=3;[0.5,50];m=1)",
      PosLevySpec{}.add_atom(2.0, 0.5).add_power_mass(1.0, 3.0, 0.5, 50.0));

  add(f.holdout_names, f.holdout, "atom(1.5;0.7)", PosLevySpec{}.add_atom(1.5, 0.7));
  add(f.holdout_names, f.holdout, "power(a=2.8;[1,50];m=0.5)",
      PosLevySpec{}.add_power_mass(0.5, 2.8, 1.0, 50.0));
  add(f.holdout_names, f.holdout, "atom(0.2;5)+power(a=0.6;[1,50];m=0.1)",
      PosLevySpec{}.add_atom(0.2, 5.0).add_power_mass(0.1, 0.6, 1.0, 50.0));
  add(f.holdout_names, f.holdout, "power(a=1.5;[0.05,5];m=3)",
      PosLevySpec{}.add_power_mass(3.0, 1.5, 0.05, 5.0));
  add(f.holdout_names, f.holdout, "atom(4;0.05)", PosLevySpec{}.add_atom(4.0, 0.05));
  return f;
}

}  // namespace nullrec::momentbounds
