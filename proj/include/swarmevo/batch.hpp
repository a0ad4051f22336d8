#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swarmevo/controller.hpp"
#include "swarmevo/env.hpp"
#include "swarmevo/metrics.hpp"
#include "swarmevo/sim.hpp"

namespace swarmevo {

/// One self-contained episode. The arena is borrowed and must outlive the batch.
struct EpisodeJob {
  const Arena* arena = nullptr;
  SpawnSpec spawn;
  Controller controller;
  SimConfig sim;
  std::uint64_t seed = 0;
};

struct EpisodeOutcome {
  RunSummary summary;
  std::optional<std::string> error;  // set when the episode threw (e.g. spawn failure)
};

/// Reference implementation: jobs one after another on the calling thread.
std::vector<EpisodeOutcome> run_episodes_serial(std::span<const EpisodeJob> jobs);

/// OpenMP version. Outcomes are written by job index, so the result is
/// identical to run_episodes_serial whatever the thread count or schedule.
/// workers <= 0 uses the OpenMP default.
std::vector<EpisodeOutcome> run_episodes_parallel(std::span<const EpisodeJob> jobs,
                                                  int workers = 0);

int available_workers();

}  // namespace swarmevo
