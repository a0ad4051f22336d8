#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swarmevo/controller.hpp"
#include "swarmevo/rng.hpp"

namespace swarmevo::de {

struct DEConfig {
  std::size_t population_size = 25;
  std::size_t generations = 100;  // includes the initial population
  double f_scale = 0.5;
  double crossover_rate = 0.9;
  std::size_t eval_repeats = 2;

  void validate() const;
  std::size_t episodes_per_run() const { return population_size * eval_repeats * generations; }
};

struct Individual {
  Genotype genotype;
  std::optional<double> fitness;
  std::size_t birth_generation = 0;
  std::vector<std::uint64_t> eval_seeds;
};

/// y = x_i + F (x_j - x_k), clamped to the gene bounds.
Genotype mutate(const Genotype& xi, const Genotype& xj, const Genotype& xk, double f_scale);

/// Per gene: take y with probability CR, else keep x_i.
Genotype crossover(const Genotype& y, const Genotype& xi, double crossover_rate, Rng& rng);

/// Three distinct indices in [0, n), uniformly without replacement.
std::array<std::size_t, 3> sample_triplet(std::size_t n, Rng& rng);

/// population_size trial vectors, each from a fresh triplet (x_i first).
std::vector<Genotype> generate_candidates(std::span<const Genotype> population,
                                          const DEConfig& config, Rng& rng);

/// (mu + lambda): best N of old ++ new by fitness desc, birth generation asc,
/// position in old ++ new asc. Stored fitness is kept as is.
/// Throws std::logic_error if any individual is unevaluated.
std::vector<Individual> select_survivors(std::span<const Individual> old_pop,
                                         std::span<const Individual> new_pop, std::size_t n);

struct EvalRequest {
  Genotype genotype;
  std::uint64_t seed = 0;
};

struct EvalResult {
  double fitness = 0.0;
  std::optional<std::string> error;
};

/// Evaluates a whole batch; results are in request order.
using BatchEvaluator = std::function<std::vector<EvalResult>(std::span<const EvalRequest>)>;

struct GenerationLog {
  std::size_t generation = 0;
  double best = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
  Genotype best_genotype;
  std::vector<std::uint64_t> seeds;    // every episode seed used this generation
  std::vector<std::string> failures;  // failed evaluations, scored 0
};

using GenerationCallback =
    std::function<void(const GenerationLog&, std::span<const Individual>)>;

/// Seed of the stream driving generation `gen` of a run.
std::uint64_t generation_seed(std::uint64_t run_seed, std::size_t gen);

/// Generation 0 evaluates a uniform random population; each later generation
/// creates N candidates, evaluates each eval_repeats times keeping the
/// minimum, and applies (mu + lambda) selection.
std::vector<GenerationLog> evolve(const DEConfig& config, std::uint64_t run_seed,
                                  const BatchEvaluator& evaluate,
                                  const GenerationCallback& on_generation = {});

}  // namespace swarmevo::de
