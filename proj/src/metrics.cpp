#include "swarmevo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "swarmevo/io.hpp"

namespace swarmevo {

double fitness(std::span<const double> f_trace, double g_max) {
  if (f_trace.empty()) throw std::invalid_argument("fitness of an empty trace");
  if (!(g_max > 0.0)) throw std::invalid_argument("g_max must be positive");
  double sum = 0.0;
  for (double f : f_trace) sum += f;
  return sum / (g_max * static_cast<double>(f_trace.size()));
}

double order(std::span<const double> headings,
             std::span<const std::vector<std::size_t>> neighbor_sets) {
  if (headings.size() != neighbor_sets.size())
    throw std::invalid_argument("order: one neighbour set per agent required");
  if (headings.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t n = 0; n < headings.size(); ++n) {
    // |sum of unit vectors|^2 written over pairwise heading differences, so
    // equal headings contribute exactly 1 and opposite headings exactly -1.
    const auto& nb = neighbor_sets[n];
    const auto at = [&](std::size_t q) { return q == 0 ? headings[n] : headings[nb[q - 1]]; };
    const std::size_t m = nb.size() + 1;
    double sq = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
      sq += 1.0;
      for (std::size_t b = a + 1; b < m; ++b) sq += 2.0 * std::cos(at(a) - at(b));
    }
    const double phi = std::sqrt(std::max(sq, 0.0)) / static_cast<double>(m);
    total += std::min(phi, 1.0);
  }
  return total / static_cast<double>(headings.size());
}

RunSummary summarize_run(const EvalRecord& record, Vec2 peak) {
  RunSummary s;
  s.fitness = record.fitness;
  if (!record.order_trace.empty()) {
    double sum = 0.0;
    for (double o : record.order_trace) sum += o;
    s.mean_order = sum / static_cast<double>(record.order_trace.size());
    s.max_order = *std::max_element(record.order_trace.begin(), record.order_trace.end());
  }
  for (auto c : record.collision_trace) s.total_collisions += c;
  const auto dist = [&](Vec2 p) { return std::hypot(p.x - peak.x, p.y - peak.y); };
  s.displacement_to_peak = dist(record.start_centroid) - dist(record.end_centroid);
  if (!record.f_trace.empty()) {
    s.start_field = record.f_trace.front();
    s.end_field = record.f_trace.back();
  }
  return s;
}

void write_metric_trace(const EvalRecord& record, const std::filesystem::path& path) {
  auto out = io::open_output(path);
  out << "t\tf_t\torder\tcollisions\n";
  for (std::size_t k = 0; k < record.f_trace.size(); ++k) {
    out << io::format_double(static_cast<double>(k) * record.control_period) << '\t'
        << io::format_double(record.f_trace[k]) << '\t'
        << io::format_double(record.order_trace[k]) << '\t' << record.collision_trace[k] << '\n';
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

void write_trajectories(std::span<const PoseSample> samples, const std::filesystem::path& path) {
  auto out = io::open_output(path);
  out << "t\trobot_id\tx\ty\ttheta\n";
  for (const auto& p : samples) {
    out << io::format_double(p.t) << '\t' << p.robot << '\t' << io::format_double(p.x) << '\t'
        << io::format_double(p.y) << '\t' << io::format_double(p.heading) << '\n';
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string summary_header() {
  return "fitness\tmean_order\tmax_order\tcollisions\tdisplacement_to_peak\tstart_field\tend_field";
}

std::string summary_fields(const RunSummary& s) {
  return io::format_double(s.fitness) + '\t' + io::format_double(s.mean_order) + '\t' +
         io::format_double(s.max_order) + '\t' + std::to_string(s.total_collisions) + '\t' +
         io::format_double(s.displacement_to_peak) + '\t' + io::format_double(s.start_field) +
         '\t' + io::format_double(s.end_field);
}

}  // namespace swarmevo
