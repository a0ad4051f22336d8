#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "swarmevo/metrics.hpp"

using namespace swarmevo;

TEST_CASE("fitness analytic cases") {
  const std::vector<double> all_max(100, 255.0), all_zero(100, 0.0), half{255.0, 0.0};
  CHECK(fitness(all_max, 255.0) == 1.0);
  CHECK(fitness(all_zero, 255.0) == 0.0);
  CHECK(fitness(half, 255.0) == 0.5);
  CHECK_THROWS_AS(fitness(std::vector<double>{}, 255.0), std::invalid_argument);
}

TEST_CASE("order: aligned swarm scores 1, antipodal mutually-perceiving pair 0") {
  const std::vector<double> aligned(6, 1.234);
  std::vector<std::vector<std::size_t>> all(6);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j)
      if (i != j && all[i].size() < 4) all[i].push_back(j);
  CHECK(order(aligned, all) == 1.0);

  const std::vector<double> opposite{0.0, std::numbers::pi};
  const std::vector<std::vector<std::size_t>> mutual{{1}, {0}};
  CHECK(order(opposite, mutual) == 0.0);
  CHECK(order(std::vector<double>{std::numbers::pi / 2, -std::numbers::pi / 2}, mutual) == 0.0);
}

TEST_CASE("isolated agents contribute 1 to the order") {
  const std::vector<double> headings{0.3, 2.0, -1.1};
  const std::vector<std::vector<std::size_t>> none(3);
  CHECK(order(headings, none) == 1.0);
}

TEST_CASE("order with a partial neighbourhood") {
  // Agent 0 sees agent 1 (perpendicular): |(1,0)+(0,1)|/2 = sqrt(2)/2.
  // Agent 1 sees nobody: 1.
  const std::vector<double> headings{0.0, std::numbers::pi / 2};
  const std::vector<std::vector<std::size_t>> sets{{1}, {}};
  CHECK(order(headings, sets) == Catch::Approx((std::sqrt(2.0) / 2.0 + 1.0) / 2.0));
}

TEST_CASE("summary of a stationary swarm") {
  EvalRecord rec;
  rec.f_trace.assign(10, 100.0);
  rec.order_trace.assign(10, 1.0);
  rec.collision_trace.assign(10, 0);
  rec.start_centroid = rec.end_centroid = {2.0, 3.0};
  rec.fitness = fitness(rec.f_trace, 255.0);
  const auto s = summarize_run(rec, {5.0, 5.0});
  CHECK(s.displacement_to_peak == 0.0);
  CHECK(s.start_field == s.end_field);
  CHECK(s.total_collisions == 0);
  CHECK(s.fitness == Catch::Approx(100.0 / 255.0));
}

TEST_CASE("summary displacement for a straight run to the peak") {
  // Centroid moves from (2, 1) to (5, 5): 5 m closer to the peak at (5, 5).
  EvalRecord rec;
  rec.f_trace = {10.0, 200.0};
  rec.order_trace = {0.5, 0.9};
  rec.collision_trace = {1, 2};
  rec.start_centroid = {2.0, 1.0};
  rec.end_centroid = {5.0, 5.0};
  const auto s = summarize_run(rec, {5.0, 5.0});
  CHECK(s.displacement_to_peak == 5.0);
  CHECK(s.max_order == 0.9);
  CHECK(s.mean_order == Catch::Approx(0.7));
  CHECK(s.total_collisions == 3);
  CHECK(s.start_field == 10.0);
  CHECK(s.end_field == 200.0);
}
