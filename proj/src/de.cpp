#include "swarmevo/de.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace swarmevo::de {

void DEConfig::validate() const {
  if (population_size < 4) throw std::invalid_argument("population_size must be >= 4");
  if (generations < 1) throw std::invalid_argument("generations must be >= 1");
  if (!(f_scale > 0.0)) throw std::invalid_argument("F must be positive");
  if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0))
    throw std::invalid_argument("CR must be in [0, 1]");
  if (eval_repeats < 1) throw std::invalid_argument("eval_repeats must be >= 1");
}

Genotype mutate(const Genotype& xi, const Genotype& xj, const Genotype& xk, double f_scale) {
  std::array<double, kGenes> y{};
  for (std::size_t d = 0; d < kGenes; ++d) y[d] = xi[d] + f_scale * (xj[d] - xk[d]);
  return Genotype::clamped(y);
}

Genotype crossover(const Genotype& y, const Genotype& xi, double crossover_rate, Rng& rng) {
  std::array<double, kGenes> v{};
  for (std::size_t d = 0; d < kGenes; ++d) v[d] = rng.bernoulli(crossover_rate) ? y[d] : xi[d];
  return Genotype::from(v);
}

std::array<std::size_t, 3> sample_triplet(std::size_t n, Rng& rng) {
  if (n < 3) throw std::invalid_argument("triplet needs at least 3 individuals");
  const std::size_t i = rng.below(n);
  std::size_t j = rng.below(n - 1);
  if (j >= i) ++j;
  std::size_t k = rng.below(n - 2);
  const std::size_t lo = std::min(i, j), hi = std::max(i, j);
  if (k >= lo) ++k;
  if (k >= hi) ++k;
  return {i, j, k};
}

std::vector<Genotype> generate_candidates(std::span<const Genotype> population,
                                          const DEConfig& config, Rng& rng) {
  if (population.size() < 4) throw std::invalid_argument("population must hold >= 4 individuals");
  std::vector<Genotype> out;
  out.reserve(config.population_size);
  for (std::size_t c = 0; c < config.population_size; ++c) {
    const auto [i, j, k] = sample_triplet(population.size(), rng);
    const Genotype y = mutate(population[i], population[j], population[k], config.f_scale);
    out.push_back(crossover(y, population[i], config.crossover_rate, rng));
  }
  return out;
}

std::vector<Individual> select_survivors(std::span<const Individual> old_pop,
                                         std::span<const Individual> new_pop, std::size_t n) {
  std::vector<const Individual*> pool;
  pool.reserve(old_pop.size() + new_pop.size());
  for (const auto& ind : old_pop) pool.push_back(&ind);
  for (const auto& ind : new_pop) pool.push_back(&ind);
  for (const auto* ind : pool)
    if (!ind->fitness) throw std::logic_error("select_survivors: unevaluated individual");

  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Individual& x = *pool[a];
    const Individual& y = *pool[b];
    if (*x.fitness != *y.fitness) return *x.fitness > *y.fitness;
    if (x.birth_generation != y.birth_generation) return x.birth_generation < y.birth_generation;
    return a < b;
  });
  std::vector<Individual> out;
  out.reserve(std::min(n, order.size()));
  for (std::size_t r = 0; r < order.size() && r < n; ++r) out.push_back(*pool[order[r]]);
  return out;
}

std::uint64_t generation_seed(std::uint64_t run_seed, std::size_t gen) {
  return derive_seed(derive_seed(run_seed, label_tag("generation")), gen);
}

namespace {

// Draws seeds, evaluates eval_repeats episodes per genotype and keeps the minimum.
std::vector<Individual> evaluate_all(std::span<const Genotype> genotypes, std::size_t generation,
                                     const DEConfig& config, Rng& rng,
                                     const BatchEvaluator& evaluate, GenerationLog& log) {
  std::vector<EvalRequest> requests;
  requests.reserve(genotypes.size() * config.eval_repeats);
  for (const auto& g : genotypes)
    for (std::size_t r = 0; r < config.eval_repeats; ++r) requests.push_back({g, rng.next()});

  const std::vector<EvalResult> results = evaluate(requests);
  if (results.size() != requests.size())
    throw std::runtime_error("evaluator returned wrong number of results");

  std::vector<Individual> out;
  out.reserve(genotypes.size());
  for (std::size_t i = 0; i < genotypes.size(); ++i) {
    Individual ind;
    ind.genotype = genotypes[i];
    ind.birth_generation = generation;
    double fit = 0.0;
    for (std::size_t r = 0; r < config.eval_repeats; ++r) {
      const std::size_t q = i * config.eval_repeats + r;
      ind.eval_seeds.push_back(requests[q].seed);
      log.seeds.push_back(requests[q].seed);
      double f = results[q].fitness;
      if (results[q].error) {
        f = 0.0;
        log.failures.push_back("candidate " + std::to_string(i) + " seed " +
                               std::to_string(requests[q].seed) + ": " + *results[q].error);
      }
      fit = r == 0 ? f : std::min(fit, f);
    }
    ind.fitness = fit;
    out.push_back(std::move(ind));
  }
  return out;
}

void fill_stats(std::span<const Individual> pop, GenerationLog& log) {
  double sum = 0.0;
  for (const auto& ind : pop) sum += *ind.fitness;
  log.mean = sum / static_cast<double>(pop.size());
  double sq = 0.0;
  for (const auto& ind : pop) sq += (*ind.fitness - log.mean) * (*ind.fitness - log.mean);
  log.stddev = std::sqrt(sq / static_cast<double>(pop.size()));
  // Populations are kept sorted by select_survivors, but generation 0 is not.
  const auto best = std::max_element(pop.begin(), pop.end(), [](const auto& a, const auto& b) {
    return *a.fitness < *b.fitness;
  });
  log.best = *best->fitness;
  log.best_genotype = best->genotype;
}

}  // namespace

std::vector<GenerationLog> evolve(const DEConfig& config, std::uint64_t run_seed,
                                  const BatchEvaluator& evaluate,
                                  const GenerationCallback& on_generation) {
  config.validate();
  std::vector<GenerationLog> logs;
  logs.reserve(config.generations);

  std::vector<Individual> population;
  {
    Rng rng(generation_seed(run_seed, 0));
    std::vector<Genotype> init;
    init.reserve(config.population_size);
    for (std::size_t i = 0; i < config.population_size; ++i) {
      std::array<double, kGenes> genes{};
      for (auto& g : genes) g = rng.uniform(-kGeneBound, kGeneBound);
      init.push_back(Genotype::clamped(genes));
    }
    GenerationLog log;
    log.generation = 0;
    population = evaluate_all(init, 0, config, rng, evaluate, log);
    // Sort once so every stored population follows the selection order.
    population = select_survivors(population, {}, config.population_size);
    fill_stats(population, log);
    if (on_generation) on_generation(log, population);
    logs.push_back(std::move(log));
  }

  for (std::size_t gen = 1; gen < config.generations; ++gen) {
    Rng rng(generation_seed(run_seed, gen));
    std::vector<Genotype> parents;
    parents.reserve(population.size());
    for (const auto& ind : population) parents.push_back(ind.genotype);

    GenerationLog log;
    log.generation = gen;
    const auto candidates = generate_candidates(parents, config, rng);
    const auto offspring = evaluate_all(candidates, gen, config, rng, evaluate, log);
    population = select_survivors(population, offspring, config.population_size);
    fill_stats(population, log);
    if (on_generation) on_generation(log, population);
    logs.push_back(std::move(log));
  }
  return logs;
}

}  // namespace swarmevo::de
