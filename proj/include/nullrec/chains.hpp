#pragma once

// Harris chains with atoms: occupation quantities a_n, wandering rates,
// sigma_f^2, resolvent chains and the path measure mu_n.
//
// States are doubles so that integer chains (renewal, SSRW, finite) and the
// Gaussian walk on R share one interface. D is the finite union of atoms
// the test function f lives on; atom i has invariant weight pi(a_i).

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nullrec/parallel.hpp"
#include "nullrec/rng.hpp"
#include "nullrec/sample_path.hpp"

namespace nullrec::chains {

using State = double;

/// Result of a jump to the next visit of D: `steps` >= 1 transitions were
/// taken. When `found` is false no visit happened within the limit.
struct Visit {
  bool found = false;
  long long steps = 0;
  State state = 0.0;
};

/// Draws start states from a fixed law (nu, mu_n, ...).
class StartSampler {
 public:
  virtual ~StartSampler() = default;
  [[nodiscard]] virtual State sample(Rng& rng) const = 0;
  /// Fraction of proposals accepted so far is not tracked; rejection samplers
  /// report their expected acceptance rate here (1 for exact samplers).
  [[nodiscard]] virtual double acceptance_rate() const { return 1.0; }
};

/// Uniform proposal for importance-sampled wandering rates: starts uniform on
/// [lo, hi] (integers only when `lattice`), outside of which tau_D > n.
struct WanderingProposal {
  double lo = 0.0;
  double hi = 0.0;
  bool lattice = false;
};

class ChainModel {
 public:
  virtual ~ChainModel() = default;

  [[nodiscard]] virtual std::string name() const = 0;
  /// Declared regularity index of a_n.
  [[nodiscard]] virtual double beta() const = 0;

  [[nodiscard]] virtual State step(State x, Rng& rng) const = 0;
  /// k transitions; overridden where a shortcut exists.
  [[nodiscard]] virtual State advance(State x, long long k, Rng& rng) const;
  /// First k >= 1 with Z_k in D, provided k <= limit.
  [[nodiscard]] virtual Visit next_visit(State x, long long limit, Rng& rng) const;

  [[nodiscard]] virtual std::size_t atom_count() const = 0;
  /// Atom index of x, or -1 when x is outside D.
  [[nodiscard]] virtual int atom_of(State x) const = 0;
  /// A representative state of atom i.
  [[nodiscard]] virtual State atom_state(std::size_t i) const = 0;
  [[nodiscard]] virtual double atom_weight(std::size_t i) const = 0;
  [[nodiscard]] double pi_D() const;

  /// Integer label used in CSV exports.
  [[nodiscard]] virtual long long state_index(State x) const;

  /// Draw from nu = pi restricted to D, normalized.
  [[nodiscard]] virtual State sample_start(Rng& rng) const;

  [[nodiscard]] virtual std::optional<double> exact_an(long long n) const;
  [[nodiscard]] virtual std::optional<double> exact_wandering(long long n) const;
  [[nodiscard]] virtual std::optional<WanderingProposal> wandering_proposal(long long n) const;

  /// Exact lag terms c_k = int f P^k f dpi for k = 0..k_max (k = 0 gives int f^2 dpi).
  [[nodiscard]] virtual std::optional<std::vector<double>> exact_lag_terms(
      std::span<const double> f, std::size_t k_max) const;

  /// Sampler for mu_n = mu(. | tau_D <= n). Default: rejection from the
  /// wandering proposal (throws EfficiencyError below `min_acceptance`).
  [[nodiscard]] virtual std::unique_ptr<StartSampler> mu_n_sampler(long long n) const;
};

using ChainPtr = std::shared_ptr<const ChainModel>;

/// Countdown renewal chain on {0,1,2,...}: from 0 jump to J-1, else step down.
/// D = {0, ..., q-1}, each state an atom, pi(m) = P(J > m).
class RenewalChain : public ChainModel {
 public:
  enum class Family {
    power,        // P(J > n) = (1 + n/s)^{-beta}
    log_corrected  // P(J > n) = 1/((1+n) log(e+n)), beta = 1, a_n = o(n)
  };

  RenewalChain(Family family, double beta, double tail_scale, std::size_t atoms,
               std::size_t horizon = std::size_t{1} << 20);

  [[nodiscard]] std::string name() const override;
  [[nodiscard]] double beta() const override { return beta_; }
  [[nodiscard]] Family family() const noexcept { return family_; }

  /// P(J > n) for real n >= 0.
  [[nodiscard]] double survival(double n) const;
  /// Renewal interval J >= 1.
  [[nodiscard]] double sample_jump(Rng& rng) const;

  [[nodiscard]] State step(State x, Rng& rng) const override;
  [[nodiscard]] State advance(State x, long long k, Rng& rng) const override;
  [[nodiscard]] Visit next_visit(State x, long long limit, Rng& rng) const override;

  [[nodiscard]] std::size_t atom_count() const override { return q_; }
  [[nodiscard]] int atom_of(State x) const override;
  [[nodiscard]] State atom_state(std::size_t i) const override { return static_cast<double>(i); }
  [[nodiscard]] double atom_weight(std::size_t i) const override;
  [[nodiscard]] long long state_index(State x) const override;

  [[nodiscard]] std::optional<double> exact_an(long long n) const override;
  [[nodiscard]] std::optional<double> exact_wandering(long long n) const override;
  [[nodiscard]] std::optional<std::vector<double>> exact_lag_terms(
      std::span<const double> f, std::size_t k_max) const override;
  [[nodiscard]] std::unique_ptr<StartSampler> mu_n_sampler(long long n) const override;

  /// u_k = P^k(0,0) for k < horizon.
  [[nodiscard]] const std::vector<double>& renewal_sequence() const;
  [[nodiscard]] std::size_t horizon() const noexcept { return horizon_; }

 private:
  struct Tables;
  const Tables& tables() const;

  Family family_;
  double beta_;
  double scale_;
  std::size_t q_;
  std::size_t horizon_;
  std::shared_ptr<Tables> tables_;
};

/// Simple symmetric random walk on Z, counting measure, D = {0, ..., q-1}.
class SsrwChain : public ChainModel {
 public:
  explicit SsrwChain(std::size_t atoms = 2);
  [[nodiscard]] std::string name() const override { return "ssrw"; }
  [[nodiscard]] double beta() const override { return 0.5; }
  [[nodiscard]] State step(State x, Rng& rng) const override;
  [[nodiscard]] std::size_t atom_count() const override { return q_; }
  [[nodiscard]] int atom_of(State x) const override;
  [[nodiscard]] State atom_state(std::size_t i) const override { return static_cast<double>(i); }
  [[nodiscard]] double atom_weight(std::size_t) const override { return 1.0; }
  [[nodiscard]] std::optional<WanderingProposal> wandering_proposal(long long n) const override;

 private:
  std::size_t q_;
};

/// Random walk on R with standard Gaussian steps, Lebesgue measure, D = [0,1]
/// treated as a single pseudo-atom of weight 1 for f-support purposes.
class GaussianWalk : public ChainModel {
 public:
  [[nodiscard]] std::string name() const override { return "gaussian_walk"; }
  [[nodiscard]] double beta() const override { return 0.5; }
  [[nodiscard]] State step(State x, Rng& rng) const override { return x + rng.normal(); }
  [[nodiscard]] std::size_t atom_count() const override { return 1; }
  [[nodiscard]] int atom_of(State x) const override { return (x >= 0.0 && x <= 1.0) ? 0 : -1; }
  [[nodiscard]] State atom_state(std::size_t) const override { return 0.5; }
  [[nodiscard]] double atom_weight(std::size_t) const override { return 1.0; }
  [[nodiscard]] long long state_index(State x) const override;
  [[nodiscard]] State sample_start(Rng& rng) const override { return rng.uniform(); }
  [[nodiscard]] std::optional<WanderingProposal> wandering_proposal(long long n) const override;
};

/// Finite-state chain with a row-stochastic matrix; D = {0, ..., q-1};
/// pi is the stationary distribution (positive recurrent, beta = 1).
class FiniteChain : public ChainModel {
 public:
  FiniteChain(std::vector<std::vector<double>> matrix, std::size_t atoms);
  [[nodiscard]] std::string name() const override { return "finite"; }
  [[nodiscard]] double beta() const override { return 1.0; }
  [[nodiscard]] State step(State x, Rng& rng) const override;
  [[nodiscard]] std::size_t atom_count() const override { return q_; }
  [[nodiscard]] int atom_of(State x) const override;
  [[nodiscard]] State atom_state(std::size_t i) const override { return static_cast<double>(i); }
  [[nodiscard]] double atom_weight(std::size_t i) const override { return pi_[i]; }
  [[nodiscard]] std::optional<double> exact_an(long long n) const override;
  [[nodiscard]] std::optional<std::vector<double>> exact_lag_terms(
      std::span<const double> f, std::size_t k_max) const override;
  [[nodiscard]] const std::vector<double>& stationary() const noexcept { return pi_; }

 private:
  std::vector<std::vector<double>> p_;
  std::vector<std::vector<double>> cum_;
  std::vector<double> pi_;
  std::size_t q_;
};

/// The base chain observed at renewal times with Geometric(1-p) gaps on {1,2,...}.
class ResolventChain : public ChainModel {
 public:
  ResolventChain(ChainPtr base, double p);
  [[nodiscard]] std::string name() const override;
  [[nodiscard]] double beta() const override { return base_->beta(); }
  [[nodiscard]] double p() const noexcept { return p_; }
  /// One geometric gap, P(G = k) = (1-p) p^{k-1}.
  [[nodiscard]] long long sample_gap(Rng& rng) const;
  [[nodiscard]] State step(State x, Rng& rng) const override;
  [[nodiscard]] std::size_t atom_count() const override { return base_->atom_count(); }
  [[nodiscard]] int atom_of(State x) const override { return base_->atom_of(x); }
  [[nodiscard]] State atom_state(std::size_t i) const override { return base_->atom_state(i); }
  [[nodiscard]] double atom_weight(std::size_t i) const override { return base_->atom_weight(i); }
  [[nodiscard]] long long state_index(State x) const override { return base_->state_index(x); }
  [[nodiscard]] State sample_start(Rng& rng) const override { return base_->sample_start(rng); }

 private:
  ChainPtr base_;
  double p_;
};

[[nodiscard]] ChainPtr builtin_renewal_chain(double beta, double tail_scale = 1.0,
                                             std::size_t atoms = 2);
/// beta = 1 renewal family with infinite mean and a_n = o(n).
[[nodiscard]] ChainPtr builtin_renewal_chain_beta1(std::size_t atoms = 2);
[[nodiscard]] ChainPtr builtin_ssrw_chain(std::size_t atoms = 2);
[[nodiscard]] ChainPtr builtin_gaussian_walk();
[[nodiscard]] ChainPtr resolvent_chain(ChainPtr model, double p);

/// Values of f on the atoms of D (f vanishes off D).
struct FSpec {
  std::vector<double> values;

  [[nodiscard]] double operator()(const ChainModel& model, State x) const {
    const int a = model.atom_of(x);
    return a < 0 ? 0.0 : values[static_cast<std::size_t>(a)];
  }
  /// Throws unless sum_i pi(a_i) f(a_i) = 0 and sizes match.
  void validate(const ChainModel& model) const;
  [[nodiscard]] FSpec scaled(double c) const;
};

/// f = (1, -pi(a_0)/pi(a_1), 0, ...): the canonical mean-zero two-atom function.
[[nodiscard]] FSpec two_atom_mean_zero(const ChainModel& model);
/// f = 0 on every atom.
[[nodiscard]] FSpec zero_function(const ChainModel& model);

/// Returns to a reference atom with per-excursion sums of f.
struct ReturnRecord {
  std::vector<long long> tau;
  std::vector<double> excursions;
  /// Sum of f over steps after the last return (the boundary partial excursion).
  double boundary = 0.0;

  [[nodiscard]] long long local_time(long long n) const;
};

struct ChainRun {
  SamplePath partial_sums;  // grid 0..n, S_m(f) = sum_{k=1..m} f(Z_k)
  std::vector<double> states;
  ReturnRecord record;
};

/// Step-by-step simulation for n steps from `start`, recording states, partial
/// sums and excursions relative to atom `reference_atom`.
[[nodiscard]] ChainRun run_chain(const ChainModel& model, State start, long long n,
                                 const FSpec& f, Rng& rng, std::size_t reference_atom = 0);

/// Partial sums S_t(f) = sum_{k=1..t} f(Z_k) at nondecreasing integer times,
/// jumping between visits to D.
void partial_sums_at(const ChainModel& model, State start, const FSpec& f,
                     std::span<const long long> times, std::span<double> out, Rng& rng);

/// Number of k in [1, n] with Z_k in D.
[[nodiscard]] long long count_visits(const ChainModel& model, State start, long long n, Rng& rng);

/// First k >= 0 with Z_k in D, or -1 when it exceeds n.
[[nodiscard]] long long hitting_time(const ChainModel& model, State start, long long n, Rng& rng);

struct AnEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::optional<double> exact;
};

/// Monte Carlo a_n = pi(D)^{-1} E_nu[#visits to D in 1..n].
[[nodiscard]] AnEstimate estimate_an(const ChainModel& model, long long n, std::size_t replicates,
                                     Rng& rng, Execution exec = Execution::parallel);

struct WanderingEstimate {
  double value = 0.0;
  double std_error = 0.0;
  bool exact = false;
};

/// mu(tau_D <= n): exact when available, else importance sampling from the
/// model's proposal; UnsupportedModelError otherwise.
[[nodiscard]] WanderingEstimate wandering_rate(const ChainModel& model, long long n,
                                               std::size_t replicates, Rng& rng,
                                               Execution exec = Execution::parallel);

struct SigmaReport {
  double sigma2 = 0.0;
  std::size_t k_used = 0;
  bool exact = false;
  /// Partial sums at the doubling checkpoints.
  std::vector<double> checkpoints;
};

/// sigma_f^2 = int f^2 dpi + 2 sum_{k<=k_max} int f P^k f dpi. Stops at the
/// first doubling checkpoint where three successive partial sums agree to
/// `rel_tol`; ConvergenceError if that never happens up to k_max. Models
/// without exact lag terms use `mc_replicates` chains started from nu.
[[nodiscard]] SigmaReport sigma_f(const ChainModel& model, const FSpec& f, std::size_t k_max,
                                  Rng& rng, std::size_t mc_replicates = 100000,
                                  double rel_tol = 1e-3);

/// A start drawn from mu_n plus partial sums at the requested times.
void sample_mu_n_path(const ChainModel& model, const StartSampler& sampler, const FSpec& f,
                      std::span<const long long> times, std::span<double> out, Rng& rng,
                      State* start = nullptr);

}  // namespace nullrec::chains
