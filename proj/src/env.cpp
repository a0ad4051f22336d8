#include "swarmevo/env.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "swarmevo/io.hpp"

namespace swarmevo {

std::size_t cell_count(double extent_m, double cell_size_m) {
  if (!(extent_m > 0.0) || !(cell_size_m > 0.0))
    throw std::invalid_argument("field dimensions must be positive");
  const double ratio = extent_m / cell_size_m;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) <= 1e-9 * std::max(1.0, rounded))
    return static_cast<std::size_t>(rounded);
  return static_cast<std::size_t>(std::ceil(ratio));
}

ScalarFieldGrid::ScalarFieldGrid(double width_m, double height_m, double cell_size_m,
                                 double g_max, std::vector<double> cells)
    : width_m_(width_m),
      height_m_(height_m),
      cell_size_m_(cell_size_m),
      g_max_(g_max),
      cols_(cell_count(width_m, cell_size_m)),
      rows_(cell_count(height_m, cell_size_m)),
      cells_(std::move(cells)) {
  if (!(g_max > 0.0)) throw std::invalid_argument("g_max must be positive");
  if (cells_.size() != cols_ * rows_)
    throw std::invalid_argument("field has " + std::to_string(cells_.size()) + " cells, expected " +
                                std::to_string(cols_ * rows_));
  bool found = false;
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const double v = cells_[i];
    if (!(v >= 0.0 && v <= g_max))
      throw std::invalid_argument("field value out of [0, g_max] at cell " + std::to_string(i));
    if (!found && v == g_max) {
      found = true;
      peak_ = {(static_cast<double>(i % cols_) + 0.5) * cell_size_m,
               (static_cast<double>(i / cols_) + 0.5) * cell_size_m};
    }
  }
  if (!found) throw std::invalid_argument("field has no cell equal to g_max");
}

namespace {

std::size_t clamped_index(double coord, double cell, std::size_t count) {
  double idx = std::floor(coord / cell);
  if (!(idx >= 0.0)) idx = 0.0;  // also catches NaN
  const double last = static_cast<double>(count - 1);
  if (idx > last) idx = last;
  return static_cast<std::size_t>(idx);
}

// Fills a square grid from a shape function of distance to the center cell.
// `shape(d, d_max)` returns a fraction in [0, 1] and must return exactly 1 at d = 0.
template <class Shape>
ScalarFieldGrid make_centered_field(double arena_size_m, double cell_size_m, double g_max,
                                    Shape shape) {
  if (!(arena_size_m > 0.0) || !(cell_size_m > 0.0))
    throw std::invalid_argument("arena and cell size must be positive");
  if (!(g_max > 0.0)) throw std::invalid_argument("g_max must be positive");
  const std::size_t n = cell_count(arena_size_m, cell_size_m);
  const std::size_t mid = clamped_index(arena_size_m / 2.0, cell_size_m, n);
  const auto center_of = [&](std::size_t i) { return (static_cast<double>(i) + 0.5) * cell_size_m; };
  const double cx = center_of(mid);
  // Farthest cell center from the peak cell.
  const double far_x = std::max(cx - center_of(0), center_of(n - 1) - cx);
  const double d_max = std::hypot(far_x, far_x);

  std::vector<double> cells(n * n);
  for (std::size_t row = 0; row < n; ++row) {
    for (std::size_t col = 0; col < n; ++col) {
      const double d = std::hypot(center_of(col) - cx, center_of(row) - cx);
      const double frac = std::clamp(shape(d, d_max), 0.0, 1.0);
      cells[row * n + col] = g_max * frac;
    }
  }
  return ScalarFieldGrid(arena_size_m, arena_size_m, cell_size_m, g_max, std::move(cells));
}

}  // namespace

std::size_t ScalarFieldGrid::col_of(double x) const { return clamped_index(x, cell_size_m_, cols_); }
std::size_t ScalarFieldGrid::row_of(double y) const { return clamped_index(y, cell_size_m_, rows_); }

ScalarFieldGrid make_radial_field(double arena_size_m, double cell_size_m, double g_max) {
  return make_centered_field(arena_size_m, cell_size_m, g_max, [](double d, double d_max) {
    return d_max > 0.0 ? 1.0 - d / d_max : 1.0;
  });
}

ScalarFieldGrid make_gaussian_field(double arena_size_m, double cell_size_m, double g_max,
                                    double sigma_frac) {
  if (!(sigma_frac > 0.0)) throw std::invalid_argument("sigma_frac must be positive");
  const double sigma = sigma_frac * arena_size_m;
  return make_centered_field(arena_size_m, cell_size_m, g_max, [sigma](double d, double) {
    return std::exp(-(d * d) / (2.0 * sigma * sigma));
  });
}

double sample_field(const ScalarFieldGrid& field, double x, double y) {
  return field.at(field.col_of(x), field.row_of(y));
}

void write_field(const ScalarFieldGrid& field, const std::filesystem::path& path) {
  auto out = io::open_output(path);
  out << io::format_double(field.width_m()) << ' ' << io::format_double(field.height_m()) << ' '
      << io::format_double(field.cell_size_m()) << ' ' << io::format_double(field.g_max()) << '\n';
  for (std::size_t row = 0; row < field.rows(); ++row) {
    for (std::size_t col = 0; col < field.cols(); ++col) {
      if (col) out << ' ';
      out << io::format_double(field.at(col, row));
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

ScalarFieldGrid read_field(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open field file " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty field file");
  const auto header = io::split_fields(line);
  if (header.size() != 4) throw std::invalid_argument("field header needs 4 values");
  const double width = io::parse_double(header[0]);
  const double height = io::parse_double(header[1]);
  const double cell = io::parse_double(header[2]);
  const double g_max = io::parse_double(header[3]);
  const std::size_t cols = cell_count(width, cell);
  const std::size_t rows = cell_count(height, cell);
  std::vector<double> cells;
  cells.reserve(cols * rows);
  while (std::getline(in, line)) {
    const auto fields = io::split_fields(line);
    if (fields.empty()) continue;
    if (fields.size() != cols)
      throw std::invalid_argument("field row has " + std::to_string(fields.size()) +
                                  " values, expected " + std::to_string(cols));
    for (auto f : fields) cells.push_back(io::parse_double(f));
  }
  return ScalarFieldGrid(width, height, cell, g_max, std::move(cells));
}

Arena make_arena(double size_m, double cell_size_m, double g_max, FieldProfile profile,
                 double sigma_frac) {
  Arena arena;
  arena.size_m = size_m;
  arena.field = std::make_shared<const ScalarFieldGrid>(
      profile == FieldProfile::radial ? make_radial_field(size_m, cell_size_m, g_max)
                                      : make_gaussian_field(size_m, cell_size_m, g_max, sigma_frac));
  return arena;
}

double max_ring_radius(const Arena& arena, double box_side_m, double body_radius) {
  return arena.size_m / 2.0 - box_side_m / std::numbers::sqrt2 - body_radius;
}

void validate_spawn(const Arena& arena, const SpawnSpec& spec, const RobotBody& body) {
  if (spec.n_robots < 1) throw std::invalid_argument("swarm needs at least one robot");
  if (!(spec.box_side_m > 0.0)) throw std::invalid_argument("spawn box side must be positive");
  if (!(spec.ring_radius_m >= 0.0)) throw std::invalid_argument("ring radius must be >= 0");
  if (spec.ring_radius_m > max_ring_radius(arena, spec.box_side_m, body.body_radius) + 1e-12)
    throw std::invalid_argument("spawn box leaves the arena for some ring angles");
}

std::vector<RobotState> spawn_swarm(const Arena& arena, const SpawnSpec& spec,
                                    const RobotBody& body, Rng& rng) {
  validate_spawn(arena, spec, body);
  constexpr int kMaxAttempts = 10000;
  const double alpha = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const Vec2 c = arena.center();
  const double cx = c.x + spec.ring_radius_m * std::cos(alpha);
  const double cy = c.y + spec.ring_radius_m * std::sin(alpha);
  const double half = spec.box_side_m / 2.0;
  const double min_gap = 2.0 * body.body_radius;

  std::vector<RobotState> swarm;
  swarm.reserve(spec.n_robots);
  for (std::size_t i = 0; i < spec.n_robots; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
      RobotState r;
      r.x = cx + rng.uniform(-half, half);
      r.y = cy + rng.uniform(-half, half);
      r.heading = wrap_angle(rng.uniform(0.0, 2.0 * std::numbers::pi));
      r.body_radius = body.body_radius;
      r.axle_length = body.axle_length;
      placed = std::none_of(swarm.begin(), swarm.end(), [&](const RobotState& o) {
        return std::hypot(o.x - r.x, o.y - r.y) <= min_gap;
      });
      if (placed) swarm.push_back(r);
    }
    if (!placed)
      throw SpawnFailure("could not place robot " + std::to_string(i) + " of " +
                         std::to_string(spec.n_robots) + " without overlap");
  }
  return swarm;
}

}  // namespace swarmevo
