// Microbenchmarks for the hot paths: walker stepping, potential window
// growth, exit-probability evaluation, the tridiagonal exit-time solve,
// and the coupled pair.  Rates are reported as items (steps or sites) per
// second so regressions show up as throughput drops.

#include <benchmark/benchmark.h>

#include <cstdint>

#include "rwre/env.hpp"
#include "rwre/oracles.hpp"
#include "rwre/potential.hpp"
#include "rwre/rng.hpp"
#include "rwre/walker.hpp"

namespace {

using namespace rwre;

EnvDistribution dist() { return EnvDistribution::two_point(0.25, 0.75, 0.3, 0.25); }

Environment make_env(std::uint64_t seed) { return Environment(dist(), seed); }

void BM_WalkerSteps(benchmark::State& state) {
  Environment env = make_env(11);
  const auto horizon = static_cast<std::uint64_t>(state.range(0));
  std::uint64_t run = 0;
  for (auto _ : state) {
    auto path = simulate_path(env, 0, horizon,
                              walker_step_key(env.master_seed(), run++, 0));
    benchmark::DoNotOptimize(path.back());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(horizon));
}
BENCHMARK(BM_WalkerSteps)->Arg(1 << 14)->Arg(1 << 18);

void BM_EnsembleMeetings(benchmark::State& state) {
  Environment env = make_env(12);
  const auto d = static_cast<std::size_t>(state.range(0));
  EnsembleConfig cfg;
  cfg.starts.assign(d, 0);
  cfg.horizon = 1 << 15;
  std::uint64_t run = 0;
  for (auto _ : state) {
    auto res = run_walkers(env, cfg, run++);
    benchmark::DoNotOptimize(res.n_meetings);
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(cfg.horizon * d));
}
BENCHMARK(BM_EnsembleMeetings)->Arg(2)->Arg(4);

void BM_PotentialBuild(benchmark::State& state) {
  const long n = state.range(0);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    Environment env = make_env(100 + seed++);
    PotentialPath path = PotentialPath::build(env, -n, n);
    benchmark::DoNotOptimize(path.v(n));
  }
  state.SetItemsProcessed(state.iterations() * 2 * n);
}
BENCHMARK(BM_PotentialBuild)->Arg(1 << 14)->Arg(1 << 18);

void BM_ExitProbExact(benchmark::State& state) {
  Environment env = make_env(13);
  const long w = state.range(0);
  PotentialPath path = PotentialPath::build(env, -w, w);
  for (auto _ : state) {
    benchmark::DoNotOptimize(exit_prob_exact(path, -w, 0, w));
  }
  state.SetItemsProcessed(state.iterations() * 2 * w);
}
BENCHMARK(BM_ExitProbExact)->Arg(64)->Arg(4096);

void BM_ExitTimeSolve(benchmark::State& state) {
  Environment env = make_env(14);
  const long w = state.range(0);
  PotentialPath path = PotentialPath::build(env, -w, w);
  for (auto _ : state) {
    ExitTimeResult r = expected_exit_time(env, path, -w, 0, w);
    benchmark::DoNotOptimize(r.value);
  }
  state.SetItemsProcessed(state.iterations() * 2 * w);
}
BENCHMARK(BM_ExitTimeSolve)->Arg(64)->Arg(4096);

void BM_CoupledPair(benchmark::State& state) {
  Environment env = make_env(15);
  PotentialPath path = PotentialPath::build(env, -64, 256);
  long a = -6, b = 0, c = 8;
  InvariantMeasure im = reflected_invariant_measure(path, a, b, c);
  const std::uint64_t horizon = 1 << 14;
  std::uint64_t run = 0;
  for (auto _ : state) {
    CouplingResult r = couple(env, im, horizon, run++);
    benchmark::DoNotOptimize(r.tau_meet);
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(horizon));
}
BENCHMARK(BM_CoupledPair);

}  // namespace

BENCHMARK_MAIN();
