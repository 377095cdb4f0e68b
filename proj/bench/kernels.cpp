// Serial reference against the OpenMP kernels on identical work. Each
// benchmark takes the execution mode as its argument (0 serial, 1 parallel).

#include <benchmark/benchmark.h>

#include <vector>

#include "nullrec/chains.hpp"
#include "nullrec/idproc.hpp"
#include "nullrec/limits.hpp"
#include "nullrec/mlfrac.hpp"
#include "nullrec/momentbounds.hpp"
#include "nullrec/parallel.hpp"

using namespace nullrec;

namespace {

Execution mode(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::serial : Execution::parallel;
}

void label(benchmark::State& state) {
  state.SetLabel(state.range(0) == 0 ? "serial" : "parallel x" + std::to_string(available_threads()));
}

void BM_MittagLeffler(benchmark::State& state) {
  constexpr std::size_t n = 20000;
  std::vector<double> out(n);
  const Rng master(1);
  for (auto _ : state) {
    for_each_replicate(n, mode(state), [&](std::size_t i) {
      Rng r = master.split(i);
      out[i] = mlfrac::sample_first_passage(0.5, 1.0, r).time;
    });
    benchmark::DoNotOptimize(out.data());
  }
  label(state);
}

void BM_YSeries(benchmark::State& state) {
  constexpr std::size_t n = 2000;
  const limits::YParams yp(0.8, 0.5, 2.0);
  limits::YOptions yo;
  yo.terms = 200;
  const std::vector<double> times{0.5, 1.0};
  std::vector<double> out(2 * n);
  const Rng master(2);
  for (auto _ : state) {
    for_each_replicate(n, mode(state), [&](std::size_t i) {
      Rng r = master.split(i);
      limits::sample_Y_at(yp, times, 1.0, yo, std::span<double>(out.data() + 2 * i, 2), r);
    });
    benchmark::DoNotOptimize(out.data());
  }
  label(state);
}

void BM_ChainAn(benchmark::State& state) {
  const auto chain = chains::builtin_gaussian_walk();
  for (auto _ : state) {
    Rng rng(3);
    benchmark::DoNotOptimize(chains::estimate_an(*chain, 10000, 200, rng, mode(state)).estimate);
  }
  label(state);
}

void BM_MomentBound(benchmark::State& state) {
  momentbounds::PosLevySpec half;
  half.add_atom(1.0, 2.0).add_power_mass(0.5, 2.5, 1.0, 50.0);
  const momentbounds::SymLevySpec spec(half);
  for (auto _ : state) {
    Rng rng(4);
    benchmark::DoNotOptimize(momentbounds::check_sym_bound(spec, 2.5, 200000, rng, mode(state)).lhs);
  }
  label(state);
}

void BM_Fclt(benchmark::State& state) {
  idproc::IdProcessSpec spec;
  spec.chain = chains::builtin_renewal_chain(0.5);
  spec.f = chains::two_atom_mean_zero(*spec.chain);
  spec.levy = stable::LevyTailSpec::pure_stable(1.5);
  spec.n = 10000;
  idproc::FcltOptions opt;
  opt.times = {1.0};
  opt.lhs.terms = 100;
  opt.lhs.pilot_paths = 1000;
  opt.rhs.terms = 100;
  opt.exec = mode(state);
  for (auto _ : state) {
    Rng rng(5);
    benchmark::DoNotOptimize(idproc::fclt_experiment(spec, 200, opt, rng).max_cf_gap);
  }
  label(state);
}

}  // namespace

BENCHMARK(BM_MittagLeffler)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_YSeries)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ChainAn)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MomentBound)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Fclt)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
