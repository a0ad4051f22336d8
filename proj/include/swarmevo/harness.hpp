#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swarmevo/batch.hpp"
#include "swarmevo/controller.hpp"
#include "swarmevo/de.hpp"
#include "swarmevo/env.hpp"
#include "swarmevo/metrics.hpp"
#include "swarmevo/sim.hpp"

namespace swarmevo::harness {

inline constexpr const char* kArtifactVersion = "swarmevo 1.0.0";

struct FieldSettings {
  double cell_size_m = kDefaultCellSize;
  double g_max = kDefaultGMax;
  FieldProfile profile = FieldProfile::radial;
  double sigma_frac = 0.25;  // gaussian profile only
};

struct SpawnSettings {
  double ring_radius_frac = 0.35;           // of the arena side
  std::optional<double> ring_radius_m;      // overrides the fraction
  double box_side_m = 3.0;
};

struct ExperimentConfig {
  std::string profile = "desk";
  std::vector<double> arena_sizes{10.0, 30.0, 45.0};
  std::size_t swarm_size = 5;
  std::size_t repetitions = 5;        // evolutionary runs per arena
  std::size_t test_repetitions = 30;  // re-tests per condition
  std::vector<std::size_t> scalability_sizes{5, 14, 50};
  de::DEConfig de;
  SimConfig sim;
  ControllerOptions controller;
  FieldSettings field;
  SpawnSettings spawn;
  std::uint64_t master_seed = 1;
  int workers = 0;
  std::vector<double> snapshot_times{0.0};

  void validate() const;
};

/// pop 10, 20 generations, 5 robots, 120 s episodes, 5 repetitions.
ExperimentConfig desk_profile();
/// pop 25, 100 generations, 14 robots, 600 s episodes, 30 repetitions.
ExperimentConfig paper_profile();
ExperimentConfig profile_by_name(const std::string& name);

/// JSON text of the fully resolved config.
std::string config_to_json(const ExperimentConfig& config);
/// Missing keys fall back to the profile named in the document (default desk).
ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Seed tree. Every derivation is a pure function of its inputs.
struct RepetitionSeeds {
  std::uint64_t repetition = 0;
  std::uint64_t reservoir = 0;
  std::uint64_t run = 0;
};
RepetitionSeeds repetition_seeds(std::uint64_t master, double arena_size, std::size_t rep);
std::uint64_t retest_seed(std::uint64_t master, double controller_arena, double test_arena,
                          std::size_t swarm_size, std::size_t rep);
std::uint64_t behavior_seed(std::uint64_t master);

Arena build_arena(const ExperimentConfig& config, double size_m);

/// Ring radius from the config, reduced when needed so the spawn box stays
/// inside the arena. A box wider than the arena allows is shrunk to the
/// largest centred box that fits.
SpawnSpec build_spawn(const ExperimentConfig& config, const Arena& arena, std::size_t n_robots,
                      double box_side_m);

/// Box side holding robot density constant relative to config.swarm_size.
double scaled_box_side(const ExperimentConfig& config, std::size_t n_robots);

/// DE evaluator backed by the simulator; episodes run through
/// run_episodes_parallel.
de::BatchEvaluator make_episode_evaluator(const Arena& arena, const SpawnSpec& spawn,
                                          const SimConfig& sim,
                                          std::shared_ptr<const ReservoirWeights> reservoir,
                                          ControllerOptions options, int workers);

struct Champion {
  double arena_size = 0.0;
  std::uint64_t reservoir_seed = 0;
  double fitness = 0.0;
  std::size_t repetition = 0;
  Genotype genotype;
};

void write_champions(std::span<const Champion> champions, const std::filesystem::path& path);
std::vector<Champion> read_champions(const std::filesystem::path& path);

struct EvolutionRun {
  double arena_size = 0.0;
  std::size_t repetition = 0;
  RepetitionSeeds seeds;
  std::vector<de::GenerationLog> logs;
};

struct EvolutionResult {
  std::vector<EvolutionRun> runs;
  std::vector<Champion> champions;  // best final individual per arena
};

/// Every repetition x arena evolution. Writes per-run generation logs and
/// best genotypes, fitness_curves.tsv, champions.tsv and manifest.json.
EvolutionResult run_evolution(const ExperimentConfig& config, const std::filesystem::path& out_dir);

struct RetestRow {
  double controller_arena = 0.0;
  double test_arena = 0.0;
  std::size_t swarm_size = 0;
  std::size_t repetition = 0;
  std::uint64_t seed = 0;
  double ring_radius_m = 0.0;
  double box_side_m = 0.0;
  EpisodeOutcome outcome;
};

/// Every champion in every configured arena, test_repetitions episodes each.
std::vector<RetestRow> run_flexibility(const ExperimentConfig& config,
                                       std::span<const Champion> champions,
                                       const std::filesystem::path& out_dir);

/// Every champion in its own arena at each scalability swarm size.
std::vector<RetestRow> run_scalability(const ExperimentConfig& config,
                                       std::span<const Champion> champions,
                                       const std::filesystem::path& out_dir);

struct TableRow {
  double controller_arena = 0.0;
  double test_arena = 0.0;
  std::size_t swarm_size = 0;
  std::size_t samples = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
};

/// Groups fitness by (controller arena, test arena, swarm size).
std::vector<TableRow> aggregate(std::span<const RetestRow> rows);

/// One long recorded episode of `champion` in `arena_size`; writes
/// metrics.tsv, trajectories.tsv, snapshots.tsv and summary.tsv.
EvalRecord run_behavior_analysis(const ExperimentConfig& config, const Champion& champion,
                                 double arena_size, std::uint64_t episode_seed,
                                 const std::filesystem::path& out_dir);

struct ReplayReport {
  std::vector<std::string> matched;
  std::vector<std::string> mismatched;  // differing or missing files
  bool ok() const { return mismatched.empty() && !matched.empty(); }
};

/// Re-executes the run recorded in `manifest` into `out_dir` and compares
/// every inventoried file hash.
ReplayReport replay(const std::filesystem::path& manifest, const std::filesystem::path& out_dir);

/// Episode count of one evolutionary run.
std::size_t episodes_per_run(const ExperimentConfig& config);

}  // namespace swarmevo::harness
