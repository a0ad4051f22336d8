#include "swarmevo/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace swarmevo {

namespace {

constexpr double kPi = std::numbers::pi;

// Multiple of `unit` that `value` is, or nullopt when it is not (close to) integral.
std::optional<std::size_t> integral_ratio(double value, double unit) {
  const double ratio = value / unit;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * rounded) return std::nullopt;
  return static_cast<std::size_t>(rounded);
}

// Sensor slot of each counterclockwise bin (front, left, back, right) in the
// input vector, whose order is front, back, left, right.
constexpr std::array<std::size_t, 4> kBinToSlot = {0, 2, 1, 3};

Perception sense_impl(const RobotState& self, std::span<const RobotState> others,
                      std::optional<std::size_t> skip, const ScalarFieldGrid& field,
                      double sensor_range) {
  std::array<double, 4> best_dist;
  best_dist.fill(std::numeric_limits<double>::infinity());
  Perception p;
  for (std::size_t j = 0; j < others.size(); ++j) {
    if (skip && *skip == j) continue;
    const double dx = others[j].x - self.x;
    const double dy = others[j].y - self.y;
    const double d = std::hypot(dx, dy);
    if (!(d < sensor_range)) continue;
    const auto slot = static_cast<std::size_t>(quadrant_of(std::atan2(dy, dx) - self.heading));
    if (d < best_dist[slot]) {
      best_dist[slot] = d;
      p.nearest[slot] = j;
    }
  }
  for (std::size_t q = 0; q < 4; ++q) {
    if (p.nearest[q]) {
      p.raw[2 * q] = best_dist[q];
      p.raw[2 * q + 1] = wrap_angle(others[*p.nearest[q]].heading - self.heading);
    } else {
      p.raw[2 * q] = sensor_range;
      p.raw[2 * q + 1] = 0.0;
    }
  }
  p.raw[8] = sample_field(field, self.x, self.y);
  p.inputs = normalize_inputs(p.raw, sensor_range, field.g_max());
  return p;
}

Vec2 centroid(std::span<const RobotState> swarm) {
  Vec2 c;
  for (const auto& r : swarm) {
    c.x += r.x;
    c.y += r.y;
  }
  const auto n = static_cast<double>(swarm.size());
  return {c.x / n, c.y / n};
}

}  // namespace

void SimConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!integral_ratio(control_period, dt))
    throw std::invalid_argument("control_period must be an integer multiple of dt");
  if (!integral_ratio(episode_length, control_period))
    throw std::invalid_argument("episode_length must be a positive multiple of control_period");
  if (!(sensor_range > 0.0)) throw std::invalid_argument("sensor_range must be positive");
  if (!(max_wheel > 0.0)) throw std::invalid_argument("max_wheel must be positive");
  if (!(body.body_radius > 0.0) || !(body.axle_length > 0.0))
    throw std::invalid_argument("robot body dimensions must be positive");
  if (collision_iterations < 1) throw std::invalid_argument("collision_iterations must be >= 1");
}

std::size_t SimConfig::substeps_per_control() const {
  auto n = integral_ratio(control_period, dt);
  if (!n) throw std::invalid_argument("control_period must be an integer multiple of dt");
  return *n;
}

std::size_t SimConfig::control_steps() const {
  auto n = integral_ratio(episode_length, control_period);
  if (!n) throw std::invalid_argument("episode_length must be a multiple of control_period");
  return *n;
}

Quadrant quadrant_of(double bearing) {
  constexpr double two_pi = 2.0 * kPi;
  double shifted = std::fmod(bearing + kPi / 4.0, two_pi);
  if (shifted < 0.0) shifted += two_pi;
  if (shifted >= two_pi) shifted = 0.0;
  auto bin = static_cast<std::size_t>(shifted / (kPi / 2.0));
  bin = std::min<std::size_t>(bin, 3);
  return static_cast<Quadrant>(kBinToSlot[bin]);
}

SensorVector normalize_inputs(const SensorVector& raw, double sensor_range, double g_max) {
  SensorVector out{};
  for (std::size_t q = 0; q < 4; ++q) {
    out[2 * q] = std::clamp(2.0 * raw[2 * q] / sensor_range - 1.0, -1.0, 1.0);
    out[2 * q + 1] = std::clamp(raw[2 * q + 1] / kPi, -1.0, 1.0);
  }
  out[8] = std::clamp(2.0 * raw[8] / g_max - 1.0, -1.0, 1.0);
  return out;
}

Perception sense(const RobotState& self, std::span<const RobotState> others,
                 const ScalarFieldGrid& field, double sensor_range) {
  return sense_impl(self, others, std::nullopt, field, sensor_range);
}

Perception sense_member(std::span<const RobotState> swarm, std::size_t self_index,
                        const ScalarFieldGrid& field, double sensor_range) {
  return sense_impl(swarm[self_index], swarm, self_index, field, sensor_range);
}

WheelSpeeds actuate(const ControllerOutput& output, double max_wheel) {
  const double v = std::clamp(output.v, -1.0, 0.0);
  const double w = std::clamp(output.w, -1.0, 1.0);
  const double forward = std::abs(v) * max_wheel;
  const double turn = w * max_wheel;
  return {std::clamp(forward - turn, -max_wheel, max_wheel),
          std::clamp(forward + turn, -max_wheel, max_wheel)};
}

RobotState step_kinematics(const RobotState& state, double dt) {
  RobotState next = state;
  const double v = (state.left_wheel + state.right_wheel) / 2.0;
  const double omega = (state.right_wheel - state.left_wheel) / state.axle_length;
  if (std::abs(omega) < 1e-9) {
    next.x += v * std::cos(state.heading) * dt;
    next.y += v * std::sin(state.heading) * dt;
  } else {
    const double theta1 = state.heading + omega * dt;
    const double radius = v / omega;
    next.x += radius * (std::sin(theta1) - std::sin(state.heading));
    next.y -= radius * (std::cos(theta1) - std::cos(state.heading));
    next.heading = wrap_angle(theta1);
  }
  return next;
}

void clamp_to_walls(RobotState& state, double arena_size) {
  const double r = state.body_radius;
  state.x = std::clamp(state.x, r, arena_size - r);
  state.y = std::clamp(state.y, r, arena_size - r);
}

std::size_t resolve_collisions(std::span<RobotState> states, std::optional<double> arena_size,
                               int max_iterations) {
  std::size_t count = 0;
  const std::size_t n = states.size();
  // Contacts are counted on the configuration as given, before any push.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::hypot(states[j].x - states[i].x, states[j].y - states[i].y) <
          states[i].body_radius + states[j].body_radius)
        ++count;
  for (int it = 0; it < max_iterations; ++it) {
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        auto& a = states[i];
        auto& b = states[j];
        const double min_dist = a.body_radius + b.body_radius;
        double dx = b.x - a.x;
        double dy = b.y - a.y;
        const double d = std::hypot(dx, dy);
        if (!(d < min_dist)) continue;
        any = true;
        if (d > 0.0) {
          dx /= d;
          dy /= d;
        } else {
          dx = 1.0;
          dy = 0.0;
        }
        const double half = (min_dist - d) / 2.0;
        a.x -= half * dx;
        a.y -= half * dy;
        b.x += half * dx;
        b.y += half * dy;
      }
    }
    if (!any) break;
  }
  if (arena_size)
    for (auto& s : states) clamp_to_walls(s, *arena_size);
  return count;
}

EvalRecord run_episode_from(const Arena& arena, std::vector<RobotState> swarm,
                            const Controller& controller, const SimConfig& config,
                            const RecordOptions& options) {
  config.validate();
  if (swarm.empty()) throw std::invalid_argument("episode needs at least one robot");
  const ScalarFieldGrid& field = *arena.field;
  const std::size_t n = swarm.size();
  const std::size_t steps = config.control_steps();
  const std::size_t substeps = config.substeps_per_control();
  const std::optional<double> walls =
      arena.walls ? std::optional<double>(arena.size_m) : std::nullopt;

  EvalRecord rec;
  rec.g_max = field.g_max();
  rec.control_period = config.control_period;
  rec.reservoir_seed = controller.reservoir().seed;
  rec.f_trace.reserve(steps);
  rec.order_trace.reserve(steps);
  rec.collision_trace.reserve(steps);
  if (options.trajectories) rec.trajectories.reserve(steps * n);
  rec.start_centroid = centroid(swarm);

  std::vector<Perception> perceptions(n);
  std::vector<std::vector<std::size_t>> neighbors(n);
  std::vector<double> headings(n);
  std::size_t last_collisions = 0;

  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * config.control_period;
    double field_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      perceptions[i] = sense_member(swarm, i, field, config.sensor_range);
      field_sum += perceptions[i].raw[8];
      headings[i] = swarm[i].heading;
      neighbors[i].clear();
      if (config.order_neighbors == NeighborMode::quadrant_nearest) {
        for (const auto& q : perceptions[i].nearest)
          if (q) neighbors[i].push_back(*q);
      } else {
        for (std::size_t j = 0; j < n; ++j)
          if (j != i && std::hypot(swarm[j].x - swarm[i].x, swarm[j].y - swarm[i].y) <
                            config.sensor_range)
            neighbors[i].push_back(j);
      }
    }
    rec.f_trace.push_back(field_sum / static_cast<double>(n));
    rec.order_trace.push_back(order(headings, neighbors));
    rec.collision_trace.push_back(static_cast<std::uint32_t>(last_collisions));
    if (options.trajectories)
      for (std::size_t i = 0; i < n; ++i)
        rec.trajectories.push_back(
            {t, static_cast<std::uint32_t>(i), swarm[i].x, swarm[i].y, swarm[i].heading});

    for (std::size_t i = 0; i < n; ++i) {
      const WheelSpeeds w = actuate(controller(perceptions[i].inputs), config.max_wheel);
      swarm[i].left_wheel = w.left;
      swarm[i].right_wheel = w.right;
    }
    for (std::size_t s = 0; s < substeps; ++s) {
      for (auto& r : swarm) r = step_kinematics(r, config.dt);
      last_collisions = resolve_collisions(swarm, walls, config.collision_iterations);
    }
  }
  rec.end_centroid = centroid(swarm);
  rec.fitness = fitness(rec.f_trace, rec.g_max);
  return rec;
}

EvalRecord run_episode(const Arena& arena, const SpawnSpec& spawn, const Controller& controller,
                       const SimConfig& config, std::uint64_t seed, const RecordOptions& options) {
  config.validate();
  Rng rng(seed);
  auto swarm = spawn_swarm(arena, spawn, config.body, rng);
  for (auto& r : swarm) {
    r.body_radius = config.body.body_radius;
    r.axle_length = config.body.axle_length;
  }
  EvalRecord rec = run_episode_from(arena, std::move(swarm), controller, config, options);
  rec.seed = seed;
  return rec;
}

}  // namespace swarmevo
