#include "swarmevo/batch.hpp"

#include <omp.h>

#include <exception>

namespace swarmevo {

namespace {

EpisodeOutcome run_one(const EpisodeJob& job) {
  EpisodeOutcome out;
  try {
    if (!job.arena) throw std::invalid_argument("episode job without arena");
    const EvalRecord rec = run_episode(*job.arena, job.spawn, job.controller, job.sim, job.seed);
    out.summary = summarize_run(rec, job.arena->field->peak());
  } catch (const std::exception& e) {
    out.summary = {};
    out.error = e.what();
  }
  return out;
}

}  // namespace

std::vector<EpisodeOutcome> run_episodes_serial(std::span<const EpisodeJob> jobs) {
  std::vector<EpisodeOutcome> out(jobs.size());
  for (std::size_t i = 0; i < jobs.size(); ++i) out[i] = run_one(jobs[i]);
  return out;
}

std::vector<EpisodeOutcome> run_episodes_parallel(std::span<const EpisodeJob> jobs, int workers) {
  std::vector<EpisodeOutcome> out(jobs.size());
  const auto n = static_cast<std::ptrdiff_t>(jobs.size());
  const int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = run_one(jobs[i]);
  return out;
}

int available_workers() { return omp_get_max_threads(); }

}  // namespace swarmevo
