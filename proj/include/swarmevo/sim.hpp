#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "swarmevo/controller.hpp"
#include "swarmevo/env.hpp"
#include "swarmevo/metrics.hpp"
#include "swarmevo/robot.hpp"

namespace swarmevo {

inline constexpr double kMaxWheelSpeed = 0.14;
inline constexpr double kSensorRange = 2.0;

// Values are the sensor slot order in the input vector.
enum class Quadrant : std::size_t { front = 0, back = 1, left = 2, right = 3 };

/// Which robots count as "perceived" for the order metric.
enum class NeighborMode {
  quadrant_nearest,  // the (up to four) robots the quadrant sensors report
  in_range,          // every robot within sensor range
};

struct SimConfig {
  double dt = 0.05;
  double control_period = 0.1;
  double episode_length = 600.0;
  double sensor_range = kSensorRange;
  double max_wheel = kMaxWheelSpeed;
  RobotBody body;
  NeighborMode order_neighbors = NeighborMode::quadrant_nearest;
  int collision_iterations = 16;

  /// Throws std::invalid_argument unless control_period is a positive
  /// integer multiple of dt and episode_length a multiple of control_period.
  void validate() const;
  std::size_t substeps_per_control() const;
  std::size_t control_steps() const;
  std::size_t physics_steps() const { return control_steps() * substeps_per_control(); }
};

/// Quadrant of a bearing measured counterclockwise from the heading.
/// Front = [-45, 45), Left = [45, 135), Back = [135, 225), Right = [225, 315) degrees.
Quadrant quadrant_of(double bearing);

struct Perception {
  SensorVector inputs{};  // normalized to [-1, 1]
  SensorVector raw{};     // (distance, relative heading) x 4 in quadrant order, then field value
  std::array<std::optional<std::size_t>, 4> nearest{};  // indices into the neighbour list
};

/// Sensor reading of `self`, `others` excluding self.
Perception sense(const RobotState& self, std::span<const RobotState> others,
                 const ScalarFieldGrid& field, double sensor_range = kSensorRange);

/// Sensor reading of swarm[self_index] against the rest of the swarm; the
/// reported indices refer to `swarm`.
Perception sense_member(std::span<const RobotState> swarm, std::size_t self_index,
                        const ScalarFieldGrid& field, double sensor_range = kSensorRange);

SensorVector normalize_inputs(const SensorVector& raw, double sensor_range, double g_max);

struct WheelSpeeds {
  double left = 0.0;
  double right = 0.0;
};

/// Forward magnitude |v| and turn w, scaled by max_wheel and split onto the wheels.
WheelSpeeds actuate(const ControllerOutput& output, double max_wheel = kMaxWheelSpeed);

/// Exact arc integration of differential-drive motion over dt.
RobotState step_kinematics(const RobotState& state, double dt);

/// Counts overlapping pairs (distance < 2 * body radius), then separates them
/// by iterated half-overlap projections along the center line. With an arena
/// size, positions are finally clamped inside the walls.
std::size_t resolve_collisions(std::span<RobotState> states,
                               std::optional<double> arena_size = std::nullopt,
                               int max_iterations = 16);

void clamp_to_walls(RobotState& state, double arena_size);

struct RecordOptions {
  bool trajectories = false;
};

/// Runs one episode with a freshly spawned swarm. Every control period the
/// swarm is sensed, metrics are sampled, and the shared controller sets new
/// wheel speeds; the physics then advances control_period / dt substeps.
EvalRecord run_episode(const Arena& arena, const SpawnSpec& spawn, const Controller& controller,
                       const SimConfig& config, std::uint64_t seed,
                       const RecordOptions& options = {});

/// Same loop from a given initial swarm (no spawning).
EvalRecord run_episode_from(const Arena& arena, std::vector<RobotState> swarm,
                            const Controller& controller, const SimConfig& config,
                            const RecordOptions& options = {});

}  // namespace swarmevo
