#include <benchmark/benchmark.h>

#include <memory>

#include "erci/bench_drone.hpp"
#include "erci/improviser.hpp"
#include "erci/mdp_solver.hpp"
#include "erci/preprocess.hpp"
#include "erci/sg_solver.hpp"
#include "support/random_instances.hpp"

using namespace erci;

namespace {

CoreSG drone_core(int horizon) {
  BenchmarkSpec spec;
  spec.k = 4;
  spec.horizon = horizon;
  spec.mode = DriftMode::interval;
  DroneBenchmark bench = gen_drone_benchmark(spec);
  return *build_core(bench.game, bench.hard, bench.soft, horizon).core;
}

}  // namespace

static void BM_unroll_drone(benchmark::State& state) {
  const int horizon = static_cast<int>(state.range(0));
  BenchmarkSpec spec;
  spec.k = 4;
  spec.horizon = horizon;
  spec.mode = DriftMode::interval;
  DroneBenchmark bench = gen_drone_benchmark(spec);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_core(bench.game, bench.hard, bench.soft, horizon));
  }
  state.counters["nodes"] = core_stats(drone_core(horizon)).node_count;
}
BENCHMARK(BM_unroll_drone)->Unit(benchmark::kMillisecond)->DenseRange(4, 8, 2);

static void BM_smooth_bellman(benchmark::State& state) {
  // point-mode drone instances are MDPs
  const int horizon = static_cast<int>(state.range(0));
  BenchmarkSpec spec;
  spec.k = 4;
  spec.horizon = horizon;
  spec.mode = DriftMode::point;
  DroneBenchmark bench = gen_drone_benchmark(spec);
  CoreSG core = *build_core(bench.game, bench.hard, bench.soft, horizon).core;
  for (auto _ : state) {
    benchmark::DoNotOptimize(smooth_bellman(core, 2.0));
  }
  state.counters["nodes"] = core.size();
}
BENCHMARK(BM_smooth_bellman)->Unit(benchmark::kMicrosecond)->DenseRange(4, 8, 2);

static void BM_build_front_tables(benchmark::State& state) {
  CoreSG core = drone_core(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_front_tables(core, 0.05));
  }
  state.counters["nodes"] = core.size();
}
BENCHMARK(BM_build_front_tables)->Unit(benchmark::kMillisecond)->DenseRange(4, 8, 2);

static void BM_sg_explore_regret(benchmark::State& state) {
  CoreSG core = drone_core(6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sg_pareto_explore(core, Target::regret_of(0.5, 0.5), 0.1));
  }
}
BENCHMARK(BM_sg_explore_regret)->Unit(benchmark::kMillisecond);

static void BM_simulate_episodes(benchmark::State& state) {
  auto core = std::make_shared<CoreSG>(drone_core(6));
  SgVerdict sv = sg_pareto_explore(*core, Target::regret_of(0.5, 0.5), 0.1);
  Improviser imp = sv.improviser;
  imp.core = core;
  EnvSpec env;
  env.mode = EnvMode::worst_case_entropy;
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate(imp, env, static_cast<int>(state.range(0)), 7));
  }
}
BENCHMARK(BM_simulate_episodes)->Unit(benchmark::kMillisecond)->Arg(100)->Arg(1000);

BENCHMARK_MAIN();
