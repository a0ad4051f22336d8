// Serial reference vs OpenMP episode batches, on one DE generation's worth
// of desk-profile episodes.
#include <benchmark/benchmark.h>

#include "swarmevo/batch.hpp"
#include "swarmevo/harness.hpp"

namespace {

using namespace swarmevo;

struct Fixture {
  harness::ExperimentConfig config = harness::desk_profile();
  Arena arena = harness::build_arena(config, 10.0);
  std::vector<EpisodeJob> jobs;

  explicit Fixture(std::size_t n_jobs) {
    config.sim.episode_length = 30.0;
    const SpawnSpec spawn = harness::build_spawn(config, arena, config.swarm_size, 3.0);
    auto reservoir = std::make_shared<const ReservoirWeights>(ReservoirWeights::generate(7));
    Rng rng(11);
    for (std::size_t i = 0; i < n_jobs; ++i) {
      std::array<double, kGenes> genes{};
      for (auto& g : genes) g = rng.uniform(-kGeneBound, kGeneBound);
      jobs.push_back({&arena, spawn, Controller(reservoir, Genotype::from(genes)), config.sim, rng.next()});
    }
  }
};

void BM_EpisodesSerial(benchmark::State& state) {
  Fixture f(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run_episodes_serial(f.jobs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_EpisodesParallel(benchmark::State& state) {
  Fixture f(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run_episodes_parallel(f.jobs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SenseSwarm(benchmark::State& state) {
  Fixture f(1);
  Rng rng(3);
  SpawnSpec spawn{0.0, 5.0, static_cast<std::size_t>(state.range(0))};
  const auto swarm = spawn_swarm(f.arena, spawn, RobotBody{}, rng);
  for (auto _ : state)
    for (std::size_t i = 0; i < swarm.size(); ++i)
      benchmark::DoNotOptimize(sense_member(swarm, i, *f.arena.field));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_EpisodesSerial)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EpisodesParallel)->Arg(20)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SenseSwarm)->Arg(5)->Arg(14)->Arg(50);

BENCHMARK_MAIN();
