#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>

#include "oracles.hpp"
#include "swarmevo/de.hpp"

using namespace swarmevo;
using namespace swarmevo::de;

namespace {

Genotype filled(double v) {
  std::array<double, kGenes> g{};
  g.fill(v);
  return Genotype::from(g);
}

Genotype random_genotype(Rng& rng) {
  std::array<double, kGenes> g{};
  for (auto& x : g) x = rng.uniform(-kGeneBound, kGeneBound);
  return Genotype::from(g);
}

Individual evaluated(const Genotype& g, double fitness, std::size_t gen) {
  Individual ind;
  ind.genotype = g;
  ind.fitness = fitness;
  ind.birth_generation = gen;
  return ind;
}

// Fitness -sum(x^2); seeds ignored.
std::vector<EvalResult> sphere(std::span<const EvalRequest> reqs) {
  std::vector<EvalResult> out;
  for (const auto& r : reqs) {
    double s = 0.0;
    for (double x : r.genotype.genes()) s += x * x;
    out.push_back({-s, std::nullopt});
  }
  return out;
}

}  // namespace

TEST_CASE("mutation: zero difference returns the base vector") {
  Rng rng(1);
  const Genotype xi = random_genotype(rng), xj = random_genotype(rng);
  CHECK(mutate(xi, xj, xj, 0.5) == xi);
}

TEST_CASE("mutation hand arithmetic") {
  // 1 + 0.5 * (3 - 1) = 2 in every dimension.
  CHECK(mutate(filled(1.0), filled(3.0), filled(1.0), 0.5) == filled(2.0));
  // -4 + 0.5 * (2.5 - (-1.5)) = -2
  CHECK(mutate(filled(-4.0), filled(2.5), filled(-1.5), 0.5) == filled(-2.0));
}

TEST_CASE("mutation output is clamped to the gene bounds") {
  CHECK(mutate(filled(9.0), filled(10.0), filled(-10.0), 0.5) == filled(10.0));
  CHECK(mutate(filled(-9.0), filled(-10.0), filled(10.0), 0.9) == filled(-10.0));
  Rng rng(2);
  for (int t = 0; t < 500; ++t) {
    const auto y = mutate(random_genotype(rng), random_genotype(rng), random_genotype(rng), 2.0);
    for (double g : y.genes()) {
      CHECK(g >= -10.0);
      CHECK(g <= 10.0);
    }
  }
}

TEST_CASE("crossover with CR = 1 and CR = 0") {
  Rng rng(3);
  const Genotype y = random_genotype(rng), x = random_genotype(rng);
  CHECK(crossover(y, x, 1.0, rng) == y);
  CHECK(crossover(y, x, 0.0, rng) == x);
}

TEST_CASE("crossover mask rate matches CR") {
  Rng rng(4);
  const Genotype y = filled(1.0), x = filled(0.0);
  std::size_t ones = 0, total = 0;
  // 10^5 mask draws.
  for (int t = 0; t < 5556; ++t) {
    const auto v = crossover(y, x, 0.9, rng);
    for (double g : v.genes()) ones += g == 1.0;
    total += kGenes;
  }
  const double rate = static_cast<double>(ones) / static_cast<double>(total);
  CHECK(total >= 100000);
  CHECK(rate >= 0.897);
  CHECK(rate <= 0.903);
}

TEST_CASE("triplets are three distinct, uniformly drawn indices") {
  Rng rng(5);
  std::vector<std::size_t> counts(7, 0);
  for (int t = 0; t < 70000; ++t) {
    const auto [i, j, k] = sample_triplet(7, rng);
    REQUIRE(i != j);
    REQUIRE(i != k);
    REQUIRE(j != k);
    REQUIRE(std::max({i, j, k}) < 7);
    ++counts[k];
  }
  for (auto c : counts) CHECK(std::abs(static_cast<double>(c) - 10000.0) < 500.0);
  CHECK_THROWS_AS(sample_triplet(2, rng), std::invalid_argument);
}

TEST_CASE("candidate generation") {
  Rng rng(6);
  DEConfig cfg;
  std::vector<Genotype> pop;
  for (int i = 0; i < 25; ++i) pop.push_back(random_genotype(rng));
  Rng a(9), b(9);
  const auto c1 = generate_candidates(pop, cfg, a);
  const auto c2 = generate_candidates(pop, cfg, b);
  CHECK(c1.size() == 25);
  CHECK(c1 == c2);

  // CR = 0 makes every candidate its base vector, which is a population member.
  cfg.crossover_rate = 0.0;
  for (const auto& c : generate_candidates(pop, cfg, a))
    CHECK(std::find(pop.begin(), pop.end(), c) != pop.end());

  // Identical members: x_j = x_k, so candidates equal the base exactly.
  std::vector<Genotype> same(5, filled(3.25));
  cfg.crossover_rate = 0.9;
  for (const auto& c : generate_candidates(same, cfg, a)) CHECK(c == filled(3.25));

  CHECK_THROWS_AS(generate_candidates(std::span(pop).first(3), cfg, a), std::invalid_argument);
}

TEST_CASE("selection is elitist") {
  std::vector<Individual> old, fresh;
  for (int i = 0; i < 5; ++i) old.push_back(evaluated(filled(i), 0.5 + 0.1 * i, 0));
  for (int i = 0; i < 5; ++i) fresh.push_back(evaluated(filled(-i), 0.1 * i, 1));
  const auto out = select_survivors(old, fresh, 5);
  REQUIRE(out.size() == 5);
  std::vector<double> got, want{0.9, 0.8, 0.7, 0.6, 0.5};
  for (const auto& ind : out) got.push_back(*ind.fitness);
  CHECK(got == want);
  for (const auto& ind : out) CHECK(ind.birth_generation == 0);
}

TEST_CASE("ties go to the older individual, then insertion order") {
  std::vector<Individual> old{evaluated(filled(1), 0.5, 3)};
  std::vector<Individual> fresh{evaluated(filled(2), 0.5, 4), evaluated(filled(3), 0.5, 4)};
  auto out = select_survivors(old, fresh, 3);
  CHECK(out[0].genotype == filled(1));
  CHECK(out[1].genotype == filled(2));
  CHECK(out[2].genotype == filled(3));
  out = select_survivors(fresh, old, 1);
  CHECK(out[0].genotype == filled(1));
}

TEST_CASE("selection matches a full-sort oracle") {
  Rng rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Individual> old, fresh;
    for (int i = 0; i < 25; ++i)
      old.push_back(evaluated(random_genotype(rng), std::round(rng.uniform01() * 20) / 20, rng.below(3)));
    for (int i = 0; i < 25; ++i)
      fresh.push_back(evaluated(random_genotype(rng), std::round(rng.uniform01() * 20) / 20, 3));
    std::vector<Individual> pool = old;
    pool.insert(pool.end(), fresh.begin(), fresh.end());
    const auto want = oracle::select_by_sort(pool, 25);
    const auto got = select_survivors(old, fresh, 25);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].genotype == want[i].genotype);
      CHECK(*got[i].fitness == *want[i].fitness);
    }
  }
}

TEST_CASE("selection refuses unevaluated individuals") {
  std::vector<Individual> pop{evaluated(filled(0), 0.1, 0), Individual{}};
  CHECK_THROWS_AS(select_survivors(pop, {}, 1), std::logic_error);
}

TEST_CASE("config validation") {
  DEConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.episodes_per_run() == 5000);
  c.population_size = 3;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = DEConfig{};
  c.crossover_rate = 1.5;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = DEConfig{};
  c.f_scale = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("evolve keeps the population size, min-of-repeats fitness and a monotone best") {
  DEConfig cfg;
  cfg.population_size = 8;
  cfg.generations = 15;
  cfg.eval_repeats = 2;
  // Noisy objective: fitness depends on the seed, so min-of-2 matters.
  const BatchEvaluator noisy = [](std::span<const EvalRequest> reqs) {
    std::vector<EvalResult> out;
    for (const auto& r : reqs) {
      double s = 0.0;
      for (double x : r.genotype.genes()) s += x * x;
      out.push_back({1.0 / (1.0 + s) + static_cast<double>(r.seed % 1000) * 1e-6, std::nullopt});
    }
    return out;
  };
  std::vector<std::size_t> sizes;
  bool min_ok = true;
  const auto logs = evolve(cfg, 123, noisy, [&](const GenerationLog&, std::span<const Individual> pop) {
    sizes.push_back(pop.size());
    for (const auto& ind : pop) {
      if (ind.eval_seeds.size() != 2) min_ok = false;
      double s = 0.0;
      for (double x : ind.genotype.genes()) s += x * x;
      const double f0 = 1.0 / (1.0 + s) + static_cast<double>(ind.eval_seeds[0] % 1000) * 1e-6;
      const double f1 = 1.0 / (1.0 + s) + static_cast<double>(ind.eval_seeds[1] % 1000) * 1e-6;
      if (*ind.fitness != std::min(f0, f1)) min_ok = false;
    }
  });
  CHECK(min_ok);
  REQUIRE(logs.size() == 15);
  for (auto s : sizes) CHECK(s == 8);
  for (std::size_t g = 1; g < logs.size(); ++g) CHECK(logs[g].best >= logs[g - 1].best);
  for (const auto& l : logs) CHECK(l.seeds.size() == 16);

  const auto replay = evolve(cfg, 123, noisy);
  for (std::size_t g = 0; g < logs.size(); ++g) {
    CHECK(replay[g].best == logs[g].best);
    CHECK(replay[g].best_genotype == logs[g].best_genotype);
    CHECK(replay[g].seeds == logs[g].seeds);
  }
}

TEST_CASE("failed evaluations score zero and are logged") {
  DEConfig cfg;
  cfg.population_size = 4;
  cfg.generations = 2;
  cfg.eval_repeats = 1;
  const BatchEvaluator flaky = [](std::span<const EvalRequest> reqs) {
    std::vector<EvalResult> out(reqs.size(), EvalResult{0.7, std::nullopt});
    out[0] = {0.9, std::string("spawn failure")};
    return out;
  };
  const auto logs = evolve(cfg, 5, flaky);
  CHECK(logs[0].failures.size() == 1);
  CHECK(logs[0].best == 0.7);
}

TEST_CASE("DE makes monotone progress on the 18-D sphere") {
  DEConfig cfg;
  cfg.population_size = 25;
  cfg.generations = 300;
  cfg.eval_repeats = 1;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto logs = evolve(cfg, seed, sphere);
    for (std::size_t g = 1; g < logs.size(); ++g) CHECK(logs[g].best >= logs[g - 1].best);
    CHECK(-logs.back().best < 0.05 * -logs.front().best);
  }
}
