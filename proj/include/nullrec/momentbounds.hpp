#pragma once

// Fractional-moment bounds for infinitely divisible variables:
//   positive X, 1 < p < 2:   E X^p   <= c_p (int y^p dnu + (int y dnu)^p)
//   symmetric Y, 2 < p < 4:  E|Y|^p  <= c_p (int |y|^p dnu + (int y^2 dnu)^{p/2})
// checked by exact compound-Poisson simulation, with c_p calibrated empirically.

#include <cstddef>
#include <string>
#include <vector>

#include "nullrec/parallel.hpp"
#include "nullrec/rng.hpp"

namespace nullrec::momentbounds {

/// Levy measure on (0, inf): atoms plus power pieces k y^{-1-a} dy on (lo, hi).
class PosLevySpec {
 public:
  struct Atom {
    double y;
    double mass;
  };
  struct PowerPiece {
    double coef;   // k
    double index;  // a, nonzero
    double lo;     // >= 0
    double hi;     // > lo, may be +inf
  };

  PosLevySpec& add_atom(double y, double mass);
  PosLevySpec& add_power(double coef, double index, double lo, double hi);
  /// Power piece with total mass `mass` on (lo, hi), lo > 0.
  PosLevySpec& add_power_mass(double mass, double index, double lo, double hi);

  [[nodiscard]] const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  [[nodiscard]] const std::vector<PowerPiece>& pieces() const noexcept { return pieces_; }
  [[nodiscard]] bool empty() const noexcept { return atoms_.empty() && pieces_.empty(); }

  /// int y^q nu(dy); +inf when divergent. total_mass() = moment(0).
  [[nodiscard]] double moment(double q) const;
  [[nodiscard]] double total_mass() const { return moment(0.0); }
  [[nodiscard]] double first_moment() const { return moment(1.0); }
  [[nodiscard]] double p_moment(double p) const { return moment(p); }

  /// One jump from nu / total_mass. Requires finite nonzero mass.
  [[nodiscard]] double sample_jump(Rng& rng) const;
  /// Pushforward under y -> c y.
  [[nodiscard]] PosLevySpec scaled(double c) const;
  /// Restriction to y > 1/m.
  [[nodiscard]] PosLevySpec truncated(double m) const;
  /// Throws ParameterError unless atoms and pieces are valid and the first moment is finite.
  void validate() const;

 private:
  std::vector<Atom> atoms_;
  std::vector<PowerPiece> pieces_;
};

/// Symmetric Levy measure: nu = half + reflection of half. `reflected` flips
/// the sign of every jump, which leaves the law unchanged.
class SymLevySpec {
 public:
  SymLevySpec() = default;
  explicit SymLevySpec(PosLevySpec half, bool reflected = false);

  [[nodiscard]] const PosLevySpec& half() const noexcept { return half_; }
  [[nodiscard]] bool is_reflected() const noexcept { return reflected_; }
  [[nodiscard]] double total_mass() const { return 2.0 * half_.total_mass(); }
  [[nodiscard]] double second_moment() const { return 2.0 * half_.moment(2.0); }
  [[nodiscard]] double p_moment(double p) const { return 2.0 * half_.moment(p); }

  [[nodiscard]] double sample_jump(Rng& rng) const;
  [[nodiscard]] SymLevySpec reflected() const { return SymLevySpec(half_, !reflected_); }
  [[nodiscard]] SymLevySpec scaled(double c) const { return SymLevySpec(half_.scaled(c), reflected_); }
  [[nodiscard]] SymLevySpec truncated(double m) const {
    return SymLevySpec(half_.truncated(m), reflected_);
  }
  /// Throws ParameterError unless int_{|y|>=1} y^2 dnu is finite.
  void validate() const;

 private:
  PosLevySpec half_;
  bool reflected_ = false;
};

struct BoundReport {
  double lhs = 0.0;     // MC estimate of E X^p or E|Y|^p
  double lhs_se = 0.0;
  double rhs = 0.0;     // bound without c_p
  double ratio = 0.0;   // lhs / rhs
  double ratio_se = 0.0;
  /// rhs is infinite, so the bound holds trivially (ratio reported as 0).
  bool trivially_holds = false;
};

/// Positive case, 1 < p < 2.
[[nodiscard]] BoundReport check_pos_bound(const PosLevySpec& spec, double p, std::size_t mc_size,
                                          Rng& rng, Execution exec = Execution::parallel);
/// Symmetric case, 2 < p < 4.
[[nodiscard]] BoundReport check_sym_bound(const SymLevySpec& spec, double p, std::size_t mc_size,
                                          Rng& rng, Execution exec = Execution::parallel);
/// E|Y|^p against E(sum_j W_j^2)^{p/2} on the same compound-Poisson ensemble.
[[nodiscard]] BoundReport mz_ratio(const SymLevySpec& spec, double p, std::size_t mc_size, Rng& rng,
                                   Execution exec = Execution::parallel);

struct Calibration {
  double constant = 0.0;     // max calibration ratio
  double constant_se = 0.0;  // its MC standard error
  std::size_t argmax = 0;
  std::vector<double> ratios;
  std::vector<double> holdout_ratios;
  /// (holdout ratio - constant) / combined standard error, per holdout member.
  std::vector<double> holdout_excess;
  std::vector<std::size_t> violations;  // holdout members with excess > max_excess
  double max_excess = 2.0;
  [[nodiscard]] bool passed() const noexcept { return violations.empty(); }
};

/// Calibrated constant = max ratio over `calibration`; holdout members may
/// exceed it by at most `max_excess` combined standard errors. Violations are
/// reported, never clipped. Needs at least 10 calibration members.
[[nodiscard]] Calibration calibrate_cp(const std::vector<BoundReport>& calibration,
                                       const std::vector<BoundReport>& holdout,
                                       double max_excess = 2.0);

struct TruncationStep {
  double m = 0.0;
  BoundReport report;
};

/// Bound checks for the truncations nu_m (|y| > 1/m), m in `levels`, with a
/// common seed so the sequence shows monotone stabilization.
[[nodiscard]] std::vector<TruncationStep> truncation_study(const SymLevySpec& spec, double p,
                                                           const std::vector<double>& levels,
                                                           std::size_t mc_size, Rng& rng,
                                                           Execution exec = Execution::parallel);

/// Ten calibration and five holdout positive measures mixing atoms and
/// truncated power pieces across scales. The symmetric family uses them as halves.
struct StandardFamily {
  std::vector<std::string> names;
  std::vector<PosLevySpec> members;
  std::vector<std::string> holdout_names;
  std::vector<PosLevySpec> holdout;
};
[[nodiscard]] StandardFamily standard_family();

}  // namespace nullrec::momentbounds
