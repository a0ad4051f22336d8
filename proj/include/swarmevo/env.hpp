#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "swarmevo/rng.hpp"
#include "swarmevo/robot.hpp"

namespace swarmevo {

inline constexpr double kDefaultGMax = 255.0;
inline constexpr double kDefaultCellSize = 0.1;

/// Discretized scalar map over a rectangular arena with its origin at the
/// lower-left corner. Cells are stored row-major, row index = y.
/// Values lie in [0, g_max] and at least one cell equals g_max.
class ScalarFieldGrid {
 public:
  ScalarFieldGrid(double width_m, double height_m, double cell_size_m, double g_max,
                  std::vector<double> cells);

  double width_m() const { return width_m_; }
  double height_m() const { return height_m_; }
  double cell_size_m() const { return cell_size_m_; }
  double g_max() const { return g_max_; }
  std::size_t cols() const { return cols_; }
  std::size_t rows() const { return rows_; }

  double at(std::size_t col, std::size_t row) const { return cells_[row * cols_ + col]; }
  std::span<const double> cells() const { return cells_; }

  // Floor-index lookup; out-of-range coordinates clamp to the border cells.
  std::size_t col_of(double x) const;
  std::size_t row_of(double y) const;

  /// Center of the first (row-major) cell holding g_max.
  Vec2 peak() const { return peak_; }

 private:
  double width_m_;
  double height_m_;
  double cell_size_m_;
  double g_max_;
  std::size_t cols_;
  std::size_t rows_;
  std::vector<double> cells_;
  Vec2 peak_;
};

/// Number of cells needed to cover `extent_m`, tolerant of the rounding in
/// e.g. 45 / 0.1.
std::size_t cell_count(double extent_m, double cell_size_m);

enum class FieldProfile { radial, gaussian };

/// Linear radial ramp: g_max at the center cell, falling to 0 at the cell
/// farthest from it. The center cell is the one containing the arena center.
ScalarFieldGrid make_radial_field(double arena_size_m, double cell_size_m, double g_max);

/// Isotropic Gaussian bump on the same center cell; sigma = sigma_frac * arena size.
ScalarFieldGrid make_gaussian_field(double arena_size_m, double cell_size_m, double g_max,
                                    double sigma_frac);

/// Piecewise-constant lookup of the cell containing (x, y).
double sample_field(const ScalarFieldGrid& field, double x, double y);

/// Plain-text grid file: "width_m height_m cell_size_m g_max" on the first
/// line, then one line per row of cell values.
void write_field(const ScalarFieldGrid& field, const std::filesystem::path& path);
ScalarFieldGrid read_field(const std::filesystem::path& path);

/// Square arena with rigid walls on [0, size_m]^2.
struct Arena {
  double size_m = 10.0;
  std::shared_ptr<const ScalarFieldGrid> field;
  bool walls = true;

  Vec2 center() const { return {size_m / 2.0, size_m / 2.0}; }
};

Arena make_arena(double size_m, double cell_size_m = kDefaultCellSize,
                 double g_max = kDefaultGMax, FieldProfile profile = FieldProfile::radial,
                 double sigma_frac = 0.25);

struct SpawnSpec {
  double ring_radius_m = 0.0;
  double box_side_m = 3.0;
  std::size_t n_robots = 14;
};

/// Largest ring radius keeping a box of `box_side_m` (plus one body radius)
/// inside the arena whatever the angle on the ring.
double max_ring_radius(const Arena& arena, double box_side_m, double body_radius);

void validate_spawn(const Arena& arena, const SpawnSpec& spec, const RobotBody& body);

class SpawnFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Places the swarm center uniformly on the ring, then each robot uniformly
/// in the box around it with a uniform heading. Overlapping placements are
/// resampled; throws SpawnFailure when a robot cannot be placed.
std::vector<RobotState> spawn_swarm(const Arena& arena, const SpawnSpec& spec,
                                    const RobotBody& body, Rng& rng);

}  // namespace swarmevo
