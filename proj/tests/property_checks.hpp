#pragma once

// Randomized invariant checks. Each returns an empty string on success or a
// description of the first counterexample.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "swarmevo/controller.hpp"
#include "swarmevo/de.hpp"
#include "swarmevo/env.hpp"
#include "swarmevo/metrics.hpp"
#include "swarmevo/sim.hpp"

namespace props {

using namespace swarmevo;

inline constexpr double kPi = std::numbers::pi;

inline Genotype random_genotype(Rng& rng) {
  std::array<double, kGenes> g{};
  for (auto& x : g) x = rng.uniform(-kGeneBound, kGeneBound);
  return Genotype::from(g);
}

inline std::vector<RobotState> random_scene(Rng& rng, std::size_t n, double lo, double hi) {
  std::vector<RobotState> s(n);
  for (auto& r : s) {
    r.x = rng.uniform(lo, hi);
    r.y = rng.uniform(lo, hi);
    r.heading = wrap_angle(rng.uniform(-kPi, kPi));
  }
  return s;
}

inline std::string wheel_speed_bounds(std::uint64_t seed, int trials) {
  Rng rng(seed);
  for (int t = 0; t < trials; ++t) {
    const ControllerOutput out{rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
    const double max_wheel = rng.uniform(0.01, 0.3);
    const auto w = actuate(out, max_wheel);
    if (std::abs(w.left) > max_wheel || std::abs(w.right) > max_wheel) return "wheel speed above max";
  }
  // And through real controllers.
  const auto res = std::make_shared<const ReservoirWeights>(ReservoirWeights::generate(seed));
  for (int t = 0; t < trials; ++t) {
    const Controller ctl(res, random_genotype(rng));
    SensorVector s{};
    for (auto& x : s) x = rng.uniform(-1.0, 1.0);
    const auto w = actuate(ctl(s));
    if (std::abs(w.left) > kMaxWheelSpeed || std::abs(w.right) > kMaxWheelSpeed)
      return "controller-driven wheel speed above 0.14";
  }
  return {};
}

inline std::string sensor_bounds(std::uint64_t seed, int trials) {
  Rng rng(seed);
  const Arena arena = make_arena(10.0);
  for (int t = 0; t < trials; ++t) {
    // Includes robots outside the arena to exercise clamped field lookups.
    const auto scene = random_scene(rng, 2 + rng.below(15), -1.0, 11.0);
    for (std::size_t i = 0; i < scene.size(); ++i) {
      const auto p = sense_member(scene, i, *arena.field);
      for (double x : p.inputs)
        if (!(x >= -1.0 && x <= 1.0)) return "sensor channel outside [-1, 1]";
      for (std::size_t q = 0; q < 4; ++q)
        if (!(p.raw[2 * q] >= 0.0 && p.raw[2 * q] <= 2.0)) return "raw distance outside [0, 2]";
    }
  }
  return {};
}

inline std::string order_bounds_and_invariance(std::uint64_t seed, int trials) {
  Rng rng(seed);
  const Arena arena = make_arena(10.0);
  for (int t = 0; t < trials; ++t) {
    const auto scene = random_scene(rng, 2 + rng.below(15), 3.0, 7.0);
    const std::size_t n = scene.size();
    std::vector<double> headings(n);
    std::vector<std::vector<std::size_t>> sets(n);
    for (std::size_t i = 0; i < n; ++i) {
      headings[i] = scene[i].heading;
      for (const auto& q : sense_member(scene, i, *arena.field).nearest)
        if (q) sets[i].push_back(*q);
    }
    const double phi = order(headings, sets);
    if (!(phi >= 0.0 && phi <= 1.0)) return "order outside [0, 1]";

    const double delta = rng.uniform(-kPi, kPi);
    std::vector<double> rotated(n);
    for (std::size_t i = 0; i < n; ++i) rotated[i] = wrap_angle(headings[i] + delta);
    if (std::abs(order(rotated, sets) - phi) > 1e-12) return "order changed under global rotation";

    // Relabel agents by a random permutation.
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
    std::vector<double> h2(n);
    std::vector<std::vector<std::size_t>> s2(n);
    for (std::size_t i = 0; i < n; ++i) {
      h2[perm[i]] = headings[i];
      for (auto j : sets[i]) s2[perm[i]].push_back(perm[j]);
    }
    if (std::abs(order(h2, s2) - phi) > 1e-12) return "order changed under relabeling";
  }
  return {};
}

inline std::string sensing_rotation_equivariance(std::uint64_t seed, int trials) {
  Rng rng(seed);
  const Arena arena = make_arena(10.0);
  for (int t = 0; t < trials; ++t) {
    const auto scene = random_scene(rng, 2 + rng.below(10), 3.5, 6.5);
    const double delta = rng.uniform(-kPi, kPi);
    auto rotated = scene;
    for (auto& r : rotated) {
      const double dx = r.x - 5.0, dy = r.y - 5.0;
      r.x = 5.0 + dx * std::cos(delta) - dy * std::sin(delta);
      r.y = 5.0 + dx * std::sin(delta) + dy * std::cos(delta);
      r.heading = wrap_angle(r.heading + delta);
    }
    for (std::size_t i = 0; i < scene.size(); ++i) {
      const auto a = sense_member(scene, i, *arena.field);
      const auto b = sense_member(rotated, i, *arena.field);
      for (std::size_t q = 0; q < 4; ++q) {
        // Neighbours sitting within rounding of a bin edge may flip bins.
        if (a.nearest[q] != b.nearest[q]) {
          const auto& self = scene[i];
          bool near_edge = false;
          for (const auto& idx : {a.nearest[q], b.nearest[q]}) {
            if (!idx) continue;
            const double bearing = std::atan2(scene[*idx].y - self.y, scene[*idx].x - self.x) - self.heading;
            const double off = std::remainder(bearing + kPi / 4.0, kPi / 2.0);
            near_edge |= std::abs(off) < 1e-9;
            near_edge |= std::abs(std::hypot(scene[*idx].x - self.x, scene[*idx].y - self.y) - 2.0) < 1e-9;
          }
          if (!near_edge) return "quadrant assignment changed under scene rotation";
          continue;
        }
        if (std::abs(a.raw[2 * q] - b.raw[2 * q]) > 1e-9) return "distance changed under rotation";
        if (std::abs(wrap_angle(a.raw[2 * q + 1] - b.raw[2 * q + 1])) > 1e-9)
          return "relative heading changed under rotation";
      }
    }
  }
  return {};
}

inline std::string fitness_bounds_and_monotonicity(std::uint64_t seed, int trials) {
  Rng rng(seed);
  for (int t = 0; t < trials; ++t) {
    std::vector<double> trace(1 + rng.below(200));
    for (auto& f : trace) f = rng.uniform(0.0, 255.0);
    const double f0 = fitness(trace, 255.0);
    if (!(f0 >= 0.0 && f0 <= 1.0)) return "fitness outside [0, 1]";
    auto bigger = trace;
    for (auto& f : bigger) f = std::min(255.0, f + rng.uniform(0.0, 10.0));
    if (fitness(bigger, 255.0) < f0) return "pointwise larger trace gave smaller fitness";
  }
  return {};
}

inline std::string collision_symmetry(std::uint64_t seed, int trials) {
  Rng rng(seed);
  for (int t = 0; t < trials; ++t) {
    auto scene = random_scene(rng, 2 + rng.below(12), 4.5, 5.5);
    auto shuffled = scene;
    for (std::size_t i = shuffled.size(); i > 1; --i) std::swap(shuffled[i - 1], shuffled[rng.below(i)]);
    if (resolve_collisions(scene) != resolve_collisions(shuffled)) return "collision count depends on labels";
    // Well separated scenes never collide.
    std::vector<RobotState> sparse(5);
    for (std::size_t i = 0; i < sparse.size(); ++i) {
      sparse[i].x = 1.0 + 0.2 * static_cast<double>(i) + rng.uniform(0.0, 0.05);
      sparse[i].y = rng.uniform(0.0, 10.0);
    }
    if (resolve_collisions(sparse) != 0) return "collision reported for separated robots";
  }
  return {};
}

inline std::string episode_ranges(std::uint64_t seed, int trials) {
  Rng rng(seed);
  const Arena arena = make_arena(10.0);
  SimConfig sim;
  sim.episode_length = 10.0;
  const auto res = std::make_shared<const ReservoirWeights>(ReservoirWeights::generate(seed));
  for (int t = 0; t < trials; ++t) {
    const Controller ctl(res, random_genotype(rng));
    const auto rec = run_episode(arena, SpawnSpec{2.5, 3.0, 1 + rng.below(10)}, ctl, sim, rng.next());
    if (!(rec.fitness >= 0.0 && rec.fitness <= 1.0)) return "episode fitness outside [0, 1]";
    for (double o : rec.order_trace)
      if (!(o >= 0.0 && o <= 1.0)) return "episode order outside [0, 1]";
    for (double f : rec.f_trace)
      if (!(f >= 0.0 && f <= 255.0)) return "f_t outside [0, 255]";
  }
  return {};
}

inline std::string gene_bounds_and_population_size(std::uint64_t seed) {
  de::DEConfig cfg;
  cfg.population_size = 12;
  cfg.generations = 40;
  cfg.eval_repeats = 2;
  cfg.f_scale = 1.7;  // aggressive steps push against the bounds
  // Rewards large |genes| so the search presses into the box edges.
  const de::BatchEvaluator edge = [](std::span<const de::EvalRequest> reqs) {
    std::vector<de::EvalResult> out;
    for (const auto& r : reqs) {
      double s = 0.0;
      for (double x : r.genotype.genes()) s += std::abs(x);
      out.push_back({s + static_cast<double>(r.seed % 7), std::nullopt});
    }
    return out;
  };
  std::string failure;
  de::evolve(cfg, seed, edge, [&](const de::GenerationLog&, std::span<const de::Individual> pop) {
    if (pop.size() != cfg.population_size) failure = "population size changed";
    for (const auto& ind : pop)
      for (double g : ind.genotype.genes())
        if (!(g >= -kGeneBound && g <= kGeneBound)) failure = "gene outside [-10, 10]";
  });
  return failure;
}

}  // namespace props
