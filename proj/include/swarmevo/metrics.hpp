#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "swarmevo/robot.hpp"

namespace swarmevo {

struct PoseSample {
  double t = 0.0;
  std::uint32_t robot = 0;
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
};

/// Everything measured during one episode. One trace entry per control step.
struct EvalRecord {
  double fitness = 0.0;
  double g_max = 255.0;
  double control_period = 0.1;
  std::vector<double> f_trace;                 // mean field value over robots, [0, g_max]
  std::vector<double> order_trace;             // [0, 1]
  std::vector<std::uint32_t> collision_trace;  // pair collisions per control step
  std::vector<PoseSample> trajectories;        // empty unless requested
  Vec2 start_centroid;
  Vec2 end_centroid;
  std::uint64_t seed = 0;
  std::uint64_t reservoir_seed = 0;
  std::string config_digest;
};

/// Sum of f_t over the trace, left to right, divided by g_max * T.
/// Throws std::invalid_argument on an empty trace.
double fitness(std::span<const double> f_trace, double g_max);

/// Mean over agents of |u(theta_n) + sum_p u(theta_p)| / (|P_n| + 1).
/// An agent with no perceived neighbours contributes 1.
double order(std::span<const double> headings,
             std::span<const std::vector<std::size_t>> neighbor_sets);

struct RunSummary {
  double fitness = 0.0;
  double mean_order = 0.0;
  double max_order = 0.0;
  std::uint64_t total_collisions = 0;
  double displacement_to_peak = 0.0;  // start distance - end distance, centroid to peak
  double start_field = 0.0;
  double end_field = 0.0;
};

RunSummary summarize_run(const EvalRecord& record, Vec2 peak);

/// Columnar text writers. Every file starts with a header row.
void write_metric_trace(const EvalRecord& record, const std::filesystem::path& path);
void write_trajectories(std::span<const PoseSample> samples, const std::filesystem::path& path);
std::string summary_header();
std::string summary_fields(const RunSummary& s);

}  // namespace swarmevo
