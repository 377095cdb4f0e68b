#include "nullrec/chains.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <mutex>
#include <numbers>
#include <numeric>

#include <Eigen/Dense>

#include "fft_series.hpp"
#include "nullrec/errors.hpp"

namespace nullrec::chains {

// ---------------------------------------------------------------- base class

State ChainModel::advance(State x, long long k, Rng& rng) const {
  for (long long i = 0; i < k; ++i) x = step(x, rng);
  return x;
}

Visit ChainModel::next_visit(State x, long long limit, Rng& rng) const {
  for (long long k = 1; k <= limit; ++k) {
    x = step(x, rng);
    if (atom_of(x) >= 0) return {true, k, x};
  }
  return {false, std::max(0LL, limit), x};
}

double ChainModel::pi_D() const {
  double s = 0.0;
  for (std::size_t i = 0; i < atom_count(); ++i) s += atom_weight(i);
  return s;
}

long long ChainModel::state_index(State x) const {
  if (x >= 9.2e18) return LLONG_MAX;
  if (x <= -9.2e18) return LLONG_MIN;
  return std::llround(x);
}

State ChainModel::sample_start(Rng& rng) const {
  double r = rng.uniform() * pi_D();
  for (std::size_t i = 0; i + 1 < atom_count(); ++i) {
    r -= atom_weight(i);
    if (r < 0.0) return atom_state(i);
  }
  return atom_state(atom_count() - 1);
}

std::optional<double> ChainModel::exact_an(long long) const { return std::nullopt; }
std::optional<double> ChainModel::exact_wandering(long long) const { return std::nullopt; }
std::optional<WanderingProposal> ChainModel::wandering_proposal(long long) const {
  return std::nullopt;
}
std::optional<std::vector<double>> ChainModel::exact_lag_terms(std::span<const double>,
                                                               std::size_t) const {
  return std::nullopt;
}

namespace {

State propose(const WanderingProposal& p, Rng& rng) {
  if (p.lattice) return p.lo + std::floor(rng.uniform() * (p.hi - p.lo + 1.0));
  return rng.uniform(p.lo, p.hi);
}

double proposal_width(const WanderingProposal& p) {
  return p.lattice ? p.hi - p.lo + 1.0 : p.hi - p.lo;
}

// Rejection from the wandering proposal. On acceptance the generator is rewound
// to the state it had before the hitting check, so simulating forward from the
// returned start replays the accepted path exactly.
class RejectionMuN : public StartSampler {
 public:
  RejectionMuN(const ChainModel& model, long long n, WanderingProposal proposal)
      : model_(model), n_(n), proposal_(proposal) {
    Rng pilot(0x9e3779b97f4a7c15ULL, static_cast<std::uint64_t>(n));
    constexpr int kPilot = 2000;
    int accepted = 0;
    for (int i = 0; i < kPilot; ++i) {
      const State x = propose(proposal_, pilot);
      if (hitting_time(model_, x, n_, pilot) >= 0) ++accepted;
    }
    rate_ = static_cast<double>(accepted) / kPilot;
    if (rate_ < kFloor) {
      throw EfficiencyError("mu_n rejection sampler acceptance " + std::to_string(rate_) +
                                " below floor " + std::to_string(kFloor),
                            rate_);
    }
  }

  State sample(Rng& rng) const override {
    for (;;) {
      const State x = propose(proposal_, rng);
      const Rng saved = rng;
      if (hitting_time(model_, x, n_, rng) >= 0) {
        rng = saved;
        return x;
      }
    }
  }

  double acceptance_rate() const override { return rate_; }

 private:
  static constexpr double kFloor = 1e-3;
  const ChainModel& model_;
  long long n_;
  WanderingProposal proposal_;
  double rate_ = 0.0;
};

}  // namespace

std::unique_ptr<StartSampler> ChainModel::mu_n_sampler(long long n) const {
  const auto proposal = wandering_proposal(n);
  if (!proposal) {
    throw UnsupportedModelError("model '" + name() + "' has no mu_n sampler or proposal");
  }
  return std::make_unique<RejectionMuN>(*this, n, *proposal);
}

// ------------------------------------------------------------- renewal chain

struct RenewalChain::Tables {
  std::once_flag once;
  std::vector<double> u;               // P^k(0,0)
  std::vector<std::vector<double>> w;  // w[y][k] = P^k(0,y), y = 1..q-1 (w[0] unused)
  std::vector<double> vcum;            // sum_{k=1..m} P^k(0,D)
};

RenewalChain::RenewalChain(Family family, double beta, double tail_scale, std::size_t atoms,
                           std::size_t horizon)
    : family_(family),
      beta_(beta),
      scale_(tail_scale),
      q_(atoms),
      horizon_(horizon),
      tables_(std::make_shared<Tables>()) {
  if (family == Family::power) {
    require(beta > 0.0 && beta < 1.0, "renewal chain: beta must lie in (0,1)");
  } else {
    require(beta == 1.0, "log-corrected renewal chain has beta = 1");
  }
  require(tail_scale > 0.0, "renewal chain: tail scale must be positive");
  require(atoms >= 1, "renewal chain: need at least one atom");
  require(horizon >= 1024, "renewal chain: horizon too small");
}

std::string RenewalChain::name() const {
  return family_ == Family::power ? "renewal" : "renewal_beta1";
}

double RenewalChain::survival(double n) const {
  if (n < 0.0) return 1.0;
  if (family_ == Family::power) return std::pow(1.0 + n / scale_, -beta_);
  return 1.0 / ((1.0 + n) * std::log(std::numbers::e + n));
}

double RenewalChain::sample_jump(Rng& rng) const {
  const double u = rng.uniform();
  if (family_ == Family::power) {
    return std::floor(scale_ * (std::pow(u, -1.0 / beta_) - 1.0)) + 1.0;
  }
  // Smallest integer j >= 1 with survival(j) < u: bisect survival(x) = u on x >= 0.
  double lo = 0.0;
  double hi = 1.0;
  while (survival(hi) >= u) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200 && hi - lo > 0.5; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (survival(mid) >= u) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double j = std::max(1.0, std::floor(lo));
  while (survival(j) >= u) j += 1.0;
  while (j > 1.0 && survival(j - 1.0) < u) j -= 1.0;
  return j;
}

State RenewalChain::step(State x, Rng& rng) const {
  return x == 0.0 ? sample_jump(rng) - 1.0 : x - 1.0;
}

State RenewalChain::advance(State x, long long k, Rng& rng) const {
  auto left = static_cast<double>(k);
  while (left > 0.0) {
    if (x > 0.0) {
      const double d = std::min(x, left);
      x -= d;
      left -= d;
    } else {
      x = sample_jump(rng) - 1.0;
      left -= 1.0;
    }
  }
  return x;
}

Visit RenewalChain::next_visit(State x, long long limit, Rng& rng) const {
  if (limit <= 0) return {false, 0, x};
  const double top = static_cast<double>(q_) - 1.0;
  const double lim = static_cast<double>(limit);
  double next;
  double steps;
  if (x == 0.0) {
    const double target = sample_jump(rng) - 1.0;
    if (target <= top) return {true, 1, target};
    steps = 1.0 + (target - top);
    next = target;  // state after one step
    if (steps > lim) return {false, limit, next - (lim - 1.0)};
  } else {
    if (x - 1.0 <= top) return {true, 1, x - 1.0};
    steps = x - top;
    if (steps > lim) return {false, limit, x - lim};
  }
  return {true, static_cast<long long>(steps), top};
}

int RenewalChain::atom_of(State x) const {
  if (x >= 0.0 && x < static_cast<double>(q_)) return static_cast<int>(x);
  return -1;
}

double RenewalChain::atom_weight(std::size_t i) const {
  return survival(static_cast<double>(i));
}

long long RenewalChain::state_index(State x) const { return ChainModel::state_index(x); }

const RenewalChain::Tables& RenewalChain::tables() const {
  std::call_once(tables_->once, [this] {
    const std::size_t h = horizon_;
    const std::size_t extra = q_ + 1;
    std::vector<double> pmf(h + extra, 0.0);
    for (std::size_t j = 1; j < pmf.size(); ++j) {
      pmf[j] = survival(static_cast<double>(j) - 1.0) - survival(static_cast<double>(j));
    }
    std::vector<double> a(h, 0.0);
    a[0] = 1.0;
    for (std::size_t j = 1; j < h; ++j) a[j] = -pmf[j];
    auto& t = *tables_;
    t.u = detail::series_inverse(a, h);
    t.w.assign(q_, {});
    std::vector<double> v = t.u;
    for (std::size_t y = 1; y < q_; ++y) {
      std::vector<double> hy(h, 0.0);
      for (std::size_t m = 1; m < h; ++m) hy[m] = pmf[m + y];
      t.w[y] = detail::convolve(t.u, hy, h);
      for (std::size_t k = 0; k < h; ++k) v[k] += t.w[y][k];
    }
    t.vcum.assign(h, 0.0);
    for (std::size_t k = 1; k < h; ++k) t.vcum[k] = t.vcum[k - 1] + v[k];
  });
  return *tables_;
}

const std::vector<double>& RenewalChain::renewal_sequence() const { return tables().u; }

std::optional<double> RenewalChain::exact_an(long long n) const {
  require(n >= 1, "a_n needs n >= 1");
  if (static_cast<std::size_t>(n) >= horizon_) {
    throw ParameterError("a_n requested beyond the renewal horizon");
  }
  const auto& t = tables();
  const double pid = pi_D();
  double total = 0.0;
  for (std::size_t x = 0; x < q_; ++x) {
    const auto xl = static_cast<long long>(x);
    const double visits = static_cast<double>(std::min(xl, n)) +
                          (n > xl ? t.vcum[static_cast<std::size_t>(n - xl)] : 0.0);
    total += atom_weight(x) / pid * visits;
  }
  return total / pid;
}

std::optional<double> RenewalChain::exact_wandering(long long n) const {
  require(n >= 0, "wandering rate needs n >= 0");
  const long long last = n + static_cast<long long>(q_) - 1;
  double s = 0.0;
  for (long long m = last; m >= 0; --m) s += survival(static_cast<double>(m));
  return s;
}

std::optional<std::vector<double>> RenewalChain::exact_lag_terms(std::span<const double> f,
                                                                 std::size_t k_max) const {
  require(f.size() == q_, "f must have one value per atom");
  if (k_max + q_ >= horizon_) throw ParameterError("k_max beyond the renewal horizon");
  const auto& t = tables();
  const auto p = [&](std::size_t k, std::size_t x, std::size_t y) -> double {
    if (k <= x) return y == x - k ? 1.0 : 0.0;
    const std::size_t j = k - x;
    return y == 0 ? t.u[j] : t.w[y][j];
  };
  std::vector<double> c(k_max + 1, 0.0);
  for (std::size_t k = 0; k <= k_max; ++k) {
    double s = 0.0;
    for (std::size_t x = 0; x < q_; ++x) {
      if (f[x] == 0.0) continue;
      for (std::size_t y = 0; y < q_; ++y) s += atom_weight(x) * f[x] * p(k, x, y) * f[y];
    }
    c[k] = s;
  }
  return c;
}

namespace {

class TableSampler : public StartSampler {
 public:
  explicit TableSampler(std::vector<double> cumulative) : cum_(std::move(cumulative)) {}
  State sample(Rng& rng) const override {
    const double r = rng.uniform() * cum_.back();
    const auto it = std::upper_bound(cum_.begin(), cum_.end(), r);
    return static_cast<double>(std::min<std::ptrdiff_t>(it - cum_.begin(),
                                                        static_cast<std::ptrdiff_t>(cum_.size()) - 1));
  }

 private:
  std::vector<double> cum_;
};

}  // namespace

std::unique_ptr<StartSampler> RenewalChain::mu_n_sampler(long long n) const {
  require(n >= 0, "mu_n needs n >= 0");
  const auto count = static_cast<std::size_t>(n) + q_;
  std::vector<double> cum(count);
  double s = 0.0;
  for (std::size_t m = 0; m < count; ++m) {
    s += survival(static_cast<double>(m));
    cum[m] = s;
  }
  return std::make_unique<TableSampler>(std::move(cum));
}

// ---------------------------------------------------------------------- SSRW

SsrwChain::SsrwChain(std::size_t atoms) : q_(atoms) {
  require(atoms >= 1, "ssrw: need at least one atom");
}

State SsrwChain::step(State x, Rng& rng) const { return x + rng.sign(); }

int SsrwChain::atom_of(State x) const {
  if (x >= 0.0 && x < static_cast<double>(q_)) return static_cast<int>(x);
  return -1;
}

std::optional<WanderingProposal> SsrwChain::wandering_proposal(long long n) const {
  return WanderingProposal{-static_cast<double>(n),
                           static_cast<double>(n) + static_cast<double>(q_) - 1.0, true};
}

// ------------------------------------------------------------- Gaussian walk

long long GaussianWalk::state_index(State x) const {
  return static_cast<long long>(std::floor(x));
}

std::optional<WanderingProposal> GaussianWalk::wandering_proposal(long long n) const {
  // Escaping 8 sqrt(n) within n steps has probability below 1e-14.
  const double r = 8.0 * std::sqrt(static_cast<double>(n));
  return WanderingProposal{-r, 1.0 + r, false};
}

// -------------------------------------------------------------- finite chain

FiniteChain::FiniteChain(std::vector<std::vector<double>> matrix, std::size_t atoms)
    : p_(std::move(matrix)), q_(atoms) {
  const std::size_t s = p_.size();
  require(s >= 1, "finite chain needs at least one state");
  require(atoms >= 1 && atoms <= s, "finite chain: atoms must lie in 1..states");
  cum_.resize(s);
  for (std::size_t i = 0; i < s; ++i) {
    require(p_[i].size() == s, "finite chain: matrix must be square");
    double r = 0.0;
    for (double v : p_[i]) {
      require(v >= 0.0, "finite chain: negative transition probability");
      r += v;
      cum_[i].push_back(r);
    }
    require(std::abs(r - 1.0) < 1e-12, "finite chain: rows must sum to 1");
  }
  // Stationary distribution: solve pi (P - I) = 0 with sum(pi) = 1.
  Eigen::MatrixXd a(s + 1, s);
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = 0; j < s; ++j) {
      a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = p_[i][j] - (i == j ? 1.0 : 0.0);
    }
  }
  a.row(static_cast<Eigen::Index>(s)).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s + 1));
  rhs(static_cast<Eigen::Index>(s)) = 1.0;
  const Eigen::VectorXd sol = a.colPivHouseholderQr().solve(rhs);
  pi_.assign(sol.data(), sol.data() + s);
  for (std::size_t i = 0; i < q_; ++i) {
    require(pi_[i] > 0.0, "finite chain: atoms must have positive stationary mass");
  }
}

State FiniteChain::step(State x, Rng& rng) const {
  const auto& c = cum_[static_cast<std::size_t>(x)];
  const double r = rng.uniform() * c.back();
  const auto it = std::upper_bound(c.begin(), c.end(), r);
  return static_cast<double>(std::min<std::ptrdiff_t>(it - c.begin(),
                                                      static_cast<std::ptrdiff_t>(c.size()) - 1));
}

int FiniteChain::atom_of(State x) const {
  if (x >= 0.0 && x < static_cast<double>(q_)) return static_cast<int>(x);
  return -1;
}

std::optional<double> FiniteChain::exact_an(long long n) const {
  const std::size_t s = p_.size();
  const double pid = pi_D();
  std::vector<double> row(s, 0.0), next(s);
  for (std::size_t i = 0; i < q_; ++i) row[i] = pi_[i] / pid;
  double total = 0.0;
  for (long long k = 1; k <= n; ++k) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < s; ++i) {
      if (row[i] == 0.0) continue;
      for (std::size_t j = 0; j < s; ++j) next[j] += row[i] * p_[i][j];
    }
    row.swap(next);
    for (std::size_t i = 0; i < q_; ++i) total += row[i];
  }
  return total / pid;
}

std::optional<std::vector<double>> FiniteChain::exact_lag_terms(std::span<const double> f,
                                                                std::size_t k_max) const {
  require(f.size() == q_, "f must have one value per atom");
  const std::size_t s = p_.size();
  std::vector<double> full(s, 0.0), g(s), next(s);
  std::copy(f.begin(), f.end(), full.begin());
  g = full;
  std::vector<double> c(k_max + 1, 0.0);
  for (std::size_t k = 0; k <= k_max; ++k) {
    double acc = 0.0;
    for (std::size_t x = 0; x < s; ++x) acc += pi_[x] * full[x] * g[x];
    c[k] = acc;
    for (std::size_t x = 0; x < s; ++x) {
      double v = 0.0;
      for (std::size_t y = 0; y < s; ++y) v += p_[x][y] * g[y];
      next[x] = v;
    }
    g.swap(next);
  }
  return c;
}

// ----------------------------------------------------------------- resolvent

ResolventChain::ResolventChain(ChainPtr base, double p) : base_(std::move(base)), p_(p) {
  require(base_ != nullptr, "resolvent chain needs a base chain");
  require(p > 0.0 && p < 1.0, "resolvent chain: p must lie in (0,1)");
}

std::string ResolventChain::name() const { return "resolvent(" + base_->name() + ")"; }

long long ResolventChain::sample_gap(Rng& rng) const {
  return 1 + static_cast<long long>(std::floor(std::log(rng.uniform()) / std::log(p_)));
}

State ResolventChain::step(State x, Rng& rng) const {
  return base_->advance(x, sample_gap(rng), rng);
}

// ------------------------------------------------------------------ builders

ChainPtr builtin_renewal_chain(double beta, double tail_scale, std::size_t atoms) {
  return std::make_shared<RenewalChain>(RenewalChain::Family::power, beta, tail_scale, atoms);
}

ChainPtr builtin_renewal_chain_beta1(std::size_t atoms) {
  return std::make_shared<RenewalChain>(RenewalChain::Family::log_corrected, 1.0, 1.0, atoms);
}

ChainPtr builtin_ssrw_chain(std::size_t atoms) { return std::make_shared<SsrwChain>(atoms); }

ChainPtr builtin_gaussian_walk() { return std::make_shared<GaussianWalk>(); }

ChainPtr resolvent_chain(ChainPtr model, double p) {
  return std::make_shared<ResolventChain>(std::move(model), p);
}

// ------------------------------------------------------------------- f specs

void FSpec::validate(const ChainModel& model) const {
  require(values.size() == model.atom_count(), "f must have one value per atom");
  double s = 0.0, a = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    s += model.atom_weight(i) * values[i];
    a += model.atom_weight(i) * std::abs(values[i]);
  }
  require(std::abs(s) <= 1e-12 * std::max(a, 1e-300) || a == 0.0, "f must have pi-mean zero");
}

FSpec FSpec::scaled(double c) const {
  FSpec out = *this;
  for (auto& v : out.values) v *= c;
  return out;
}

FSpec two_atom_mean_zero(const ChainModel& model) {
  require(model.atom_count() >= 2, "two-atom f needs at least two atoms");
  FSpec f{std::vector<double>(model.atom_count(), 0.0)};
  f.values[0] = 1.0;
  f.values[1] = -model.atom_weight(0) / model.atom_weight(1);
  return f;
}

FSpec zero_function(const ChainModel& model) {
  return FSpec{std::vector<double>(model.atom_count(), 0.0)};
}

// --------------------------------------------------------------- simulation

long long ReturnRecord::local_time(long long n) const {
  return std::upper_bound(tau.begin(), tau.end(), n) - tau.begin();
}

ChainRun run_chain(const ChainModel& model, State start, long long n, const FSpec& f, Rng& rng,
                   std::size_t reference_atom) {
  require(n >= 1, "run_chain needs n >= 1");
  require(f.values.size() == model.atom_count(), "f must have one value per atom");
  require(reference_atom < model.atom_count(), "reference atom out of range");
  ChainRun run;
  const auto steps = static_cast<std::size_t>(n);
  run.states.resize(steps + 1);
  run.partial_sums.grid.resize(steps + 1);
  run.partial_sums.values.resize(steps + 1);
  run.partial_sums.label = "S_m(f)";
  run.states[0] = start;
  State x = start;
  double sum = 0.0;
  double excursion = 0.0;
  for (std::size_t k = 1; k <= steps; ++k) {
    x = model.step(x, rng);
    run.states[k] = x;
    const double fx = f(model, x);
    sum += fx;
    excursion += fx;
    run.partial_sums.grid[k] = static_cast<double>(k);
    run.partial_sums.values[k] = sum;
    if (model.atom_of(x) == static_cast<int>(reference_atom)) {
      run.record.tau.push_back(static_cast<long long>(k));
      run.record.excursions.push_back(excursion);
      excursion = 0.0;
    }
  }
  run.record.boundary = excursion;
  return run;
}

void partial_sums_at(const ChainModel& model, State start, const FSpec& f,
                     std::span<const long long> times, std::span<double> out, Rng& rng) {
  require(out.size() == times.size(), "partial_sums_at: size mismatch");
  long long now = 0;
  State x = start;
  double sum = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const long long target = times[i];
    require(target >= now, "partial_sums_at: times must be nondecreasing");
    while (now < target) {
      const Visit v = model.next_visit(x, target - now, rng);
      x = v.state;
      now += v.steps;
      if (!v.found) break;
      sum += f(model, x);
    }
    now = target;
    out[i] = sum;
  }
}

long long count_visits(const ChainModel& model, State start, long long n, Rng& rng) {
  long long now = 0;
  long long visits = 0;
  State x = start;
  while (now < n) {
    const Visit v = model.next_visit(x, n - now, rng);
    if (!v.found) break;
    now += v.steps;
    x = v.state;
    ++visits;
  }
  return visits;
}

long long hitting_time(const ChainModel& model, State start, long long n, Rng& rng) {
  if (model.atom_of(start) >= 0) return 0;
  const Visit v = model.next_visit(start, n, rng);
  return v.found ? v.steps : -1;
}

AnEstimate estimate_an(const ChainModel& model, long long n, std::size_t replicates, Rng& rng,
                       Execution exec) {
  require(replicates >= 1, "estimate_an needs at least one replicate");
  require(n >= 1, "estimate_an needs n >= 1");
  std::vector<double> visits(replicates);
  const Rng master = rng.split(0xa11);
  for_each_replicate(replicates, exec, [&](std::size_t i) {
    Rng r = master.split(i);
    const State x = model.sample_start(r);
    visits[i] = static_cast<double>(count_visits(model, x, n, r));
  });
  double mean = 0.0;
  for (double v : visits) mean += v;
  mean /= static_cast<double>(replicates);
  double ss = 0.0;
  for (double v : visits) ss += (v - mean) * (v - mean);
  const double se =
      replicates > 1 ? std::sqrt(ss / static_cast<double>(replicates - 1) / static_cast<double>(replicates))
                     : 0.0;
  const double pid = model.pi_D();
  return {mean / pid, se / pid, model.exact_an(n)};
}

WanderingEstimate wandering_rate(const ChainModel& model, long long n, std::size_t replicates,
                                 Rng& rng, Execution exec) {
  if (const auto exact = model.exact_wandering(n)) return {*exact, 0.0, true};
  const auto proposal = model.wandering_proposal(n);
  if (!proposal) {
    throw UnsupportedModelError("model '" + model.name() +
                                "' provides neither an exact wandering rate nor a proposal");
  }
  require(replicates >= 2, "wandering_rate needs at least two replicates");
  std::vector<double> hit(replicates);
  const Rng master = rng.split(0xa12);
  for_each_replicate(replicates, exec, [&](std::size_t i) {
    Rng r = master.split(i);
    const State x = propose(*proposal, r);
    hit[i] = hitting_time(model, x, n, r) >= 0 ? 1.0 : 0.0;
  });
  const double p = std::accumulate(hit.begin(), hit.end(), 0.0) / static_cast<double>(replicates);
  const double width = proposal_width(*proposal);
  return {width * p, width * std::sqrt(p * (1.0 - p) / static_cast<double>(replicates)), false};
}

namespace {

std::vector<double> mc_lag_terms(const ChainModel& model, const FSpec& f, std::size_t k_max,
                                 Rng& rng, std::size_t replicates) {
  constexpr std::size_t kChunks = 64;
  std::vector<std::vector<double>> partial(kChunks, std::vector<double>(k_max + 1, 0.0));
  const Rng master = rng.split(0xa13);
  for_each_replicate(kChunks, Execution::parallel, [&](std::size_t c) {
    auto& acc = partial[c];
    for (std::size_t i = c; i < replicates; i += kChunks) {
      Rng r = master.split(i);
      State x = model.sample_start(r);
      const double f0 = f(model, x);
      acc[0] += f0 * f0;
      for (std::size_t k = 1; k <= k_max; ++k) {
        x = model.step(x, r);
        acc[k] += f0 * f(model, x);
      }
    }
  });
  std::vector<double> c(k_max + 1, 0.0);
  for (const auto& p : partial) {
    for (std::size_t k = 0; k <= k_max; ++k) c[k] += p[k];
  }
  const double scale = model.pi_D() / static_cast<double>(replicates);
  for (auto& v : c) v *= scale;
  return c;
}

}  // namespace

SigmaReport sigma_f(const ChainModel& model, const FSpec& f, std::size_t k_max, Rng& rng,
                    std::size_t mc_replicates, double rel_tol) {
  f.validate(model);
  require(k_max >= 4, "sigma_f needs k_max >= 4");
  SigmaReport rep;
  std::vector<double> c;
  if (auto exact = model.exact_lag_terms(f.values, k_max)) {
    c = std::move(*exact);
    rep.exact = true;
  } else {
    c = mc_lag_terms(model, f, k_max, rng, mc_replicates);
  }
  // int f^2 dpi is exact from the atom weights either way.
  double c0 = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    c0 += model.atom_weight(i) * f.values[i] * f.values[i];
  }
  if (c0 == 0.0) {
    rep.sigma2 = 0.0;
    return rep;
  }
  double running = c0;
  std::size_t next_checkpoint = 1;
  for (std::size_t k = 1; k <= k_max; ++k) {
    running += 2.0 * c[k];
    if (k == next_checkpoint || k == k_max) {
      rep.checkpoints.push_back(running);
      next_checkpoint *= 2;
      const auto m = rep.checkpoints.size();
      if (m >= 3) {
        const double a = rep.checkpoints[m - 3], b = rep.checkpoints[m - 2], d = rep.checkpoints[m - 1];
        const double spread = std::max({a, b, d}) - std::min({a, b, d});
        if (spread <= rel_tol * std::abs(d)) {
          rep.sigma2 = d;
          rep.k_used = k;
          return rep;
        }
      }
    }
  }
  const auto m = rep.checkpoints.size();
  const double last = rep.checkpoints.back();
  double spread = 0.0;
  for (std::size_t i = m >= 3 ? m - 3 : 0; i < m; ++i) {
    spread = std::max(spread, std::abs(rep.checkpoints[i] - last));
  }
  throw ConvergenceError("sigma_f lag series did not stabilize by k_max = " + std::to_string(k_max),
                         spread / std::max(std::abs(last), 1e-300));
}

void sample_mu_n_path(const ChainModel& model, const StartSampler& sampler, const FSpec& f,
                      std::span<const long long> times, std::span<double> out, Rng& rng,
                      State* start) {
  const State x = sampler.sample(rng);
  if (start != nullptr) *start = x;
  partial_sums_at(model, x, f, times, out, rng);
}

}  // namespace nullrec::chains
