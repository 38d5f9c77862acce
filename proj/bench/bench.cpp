// Serial vs parallel kernels: ant batch construction and oracle enumeration.
// Run with --benchmark_filter to pick one; worker count is the benchmark arg.

#include <benchmark/benchmark.h>

#include <fstream>

#include "mpnd/ants.hpp"
#include "mpnd/search.hpp"
#include "oracles.hpp"
#include "test_paths.hpp"

namespace mpnd {
namespace {

struct ColonySetup {
  Instance inst;
  MultibandSet mb;
  LpSolution lp;
  TrailMatrix trails;

  ColonySetup() {
    std::ifstream in(test::sndlib_path("polska"));
    GrowthConfig g;
    g.periods = 3;
    inst = expand_multiperiod(parse_sndlib(in), g);
    mb = build_multiband(inst, BandSpec::defaults());
    lp = nominal_lp_optimum(inst);
    trails = init_trails(inst, lp);
  }
};

const ColonySetup& colony_setup() {
  static const ColonySetup s;
  return s;
}

ColonyConfig batch_config(int workers) {
  ColonyConfig cfg;
  cfg.ants = 200;
  cfg.workers = workers;
  return cfg;
}

void BM_BatchSerial(benchmark::State& state) {
  const ColonySetup& s = colony_setup();
  const ColonyConfig cfg = batch_config(1);
  std::size_t batch = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(construct_batch_serial(s.inst, s.mb, s.lp, s.trails, cfg, batch++));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * cfg.ants));
}

void BM_BatchParallel(benchmark::State& state) {
  const ColonySetup& s = colony_setup();
  const ColonyConfig cfg = batch_config(static_cast<int>(state.range(0)));
  std::size_t batch = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(construct_batch_parallel(s.inst, s.mb, s.lp, s.trails, cfg, batch++));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * cfg.ants));
}

// First random instance with a routing space of at least 20k.
struct OracleSetup {
  Instance inst;
  MultibandSet mb;

  OracleSetup() {
    oracle::RandomSpec spec;
    spec.min_space = 20'000;
    spec.max_space = 200'000;
    inst = oracle::random_instance(1, spec);
    mb = build_multiband(inst, BandSpec::defaults());
  }
};

const OracleSetup& oracle_setup() {
  static const OracleSetup s;
  return s;
}

void BM_OracleSerial(benchmark::State& state) {
  const OracleSetup& s = oracle_setup();
  std::uint64_t evaluated = 0;
  for (auto _ : state) {
    const OracleResult r = oracle_enumerate_serial(s.inst, s.mb);
    evaluated += r.evaluated;
    benchmark::DoNotOptimize(r.best.cost);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(evaluated));
}

void BM_OracleParallel(benchmark::State& state) {
  const OracleSetup& s = oracle_setup();
  OracleOptions opt;
  opt.workers = static_cast<int>(state.range(0));
  std::uint64_t evaluated = 0;
  for (auto _ : state) {
    const OracleResult r = oracle_enumerate_parallel(s.inst, s.mb, opt);
    evaluated += r.evaluated;
    benchmark::DoNotOptimize(r.best.cost);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(evaluated));
}

BENCHMARK(BM_BatchSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BatchParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_OracleSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_OracleParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace
}  // namespace mpnd

BENCHMARK_MAIN();
