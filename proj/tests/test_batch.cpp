#include <catch2/catch_amalgamated.hpp>

#include "swarmevo/batch.hpp"

using namespace swarmevo;

namespace {

std::vector<EpisodeJob> make_jobs(const Arena& arena, std::size_t n) {
  SimConfig sim;
  sim.episode_length = 10.0;
  auto reservoir = std::make_shared<const ReservoirWeights>(ReservoirWeights::generate(21));
  Rng rng(21);
  std::vector<EpisodeJob> jobs;
  for (std::size_t i = 0; i < n; ++i) {
    std::array<double, kGenes> genes{};
    for (auto& g : genes) g = rng.uniform(-10.0, 10.0);
    jobs.push_back({&arena, SpawnSpec{2.5, 3.0, 5}, Controller(reservoir, Genotype::from(genes)), sim, rng.next()});
  }
  return jobs;
}

}  // namespace

TEST_CASE("parallel batch equals the serial reference") {
  const Arena arena = make_arena(10.0);
  const auto jobs = make_jobs(arena, 24);
  const auto serial = run_episodes_serial(jobs);
  for (int workers : {1, 2, 4}) {
    const auto parallel = run_episodes_parallel(jobs, workers);
    REQUIRE(parallel.size() == serial.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
      CHECK(parallel[i].summary.fitness == serial[i].summary.fitness);
      CHECK(parallel[i].summary.mean_order == serial[i].summary.mean_order);
      CHECK(parallel[i].summary.total_collisions == serial[i].summary.total_collisions);
      CHECK(parallel[i].summary.displacement_to_peak == serial[i].summary.displacement_to_peak);
      CHECK_FALSE(parallel[i].error.has_value());
    }
  }
}

TEST_CASE("batch results match a direct run_episode call") {
  const Arena arena = make_arena(10.0);
  const auto jobs = make_jobs(arena, 3);
  const auto out = run_episodes_parallel(jobs);
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto rec = run_episode(arena, jobs[i].spawn, jobs[i].controller, jobs[i].sim, jobs[i].seed);
    CHECK(out[i].summary.fitness == rec.fitness);
  }
}

TEST_CASE("a failing episode is reported in place without affecting the others") {
  const Arena arena = make_arena(10.0);
  auto jobs = make_jobs(arena, 4);
  jobs[2].spawn = SpawnSpec{0.0, 0.2, 40};  // cannot be placed
  for (const auto& out : {run_episodes_serial(jobs), run_episodes_parallel(jobs, 2)}) {
    CHECK(out[2].error.has_value());
    CHECK(out[2].summary.fitness == 0.0);
    CHECK_FALSE(out[0].error.has_value());
    CHECK_FALSE(out[3].error.has_value());
  }
}
