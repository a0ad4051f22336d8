#include <catch2/catch_amalgamated.hpp>

#include "property_checks.hpp"

TEST_CASE("wheel speeds never exceed the limit") { CHECK(props::wheel_speed_bounds(1, 2000).empty()); }
TEST_CASE("sensor channels stay in range") { CHECK(props::sensor_bounds(2, 300).empty()); }
TEST_CASE("order is bounded, rotation and relabeling invariant") {
  CHECK(props::order_bounds_and_invariance(3, 500).empty());
}
TEST_CASE("sensing is rotation equivariant") { CHECK(props::sensing_rotation_equivariance(4, 300).empty()); }
TEST_CASE("fitness is bounded and monotone") { CHECK(props::fitness_bounds_and_monotonicity(5, 500).empty()); }
TEST_CASE("collision counts ignore labels") { CHECK(props::collision_symmetry(6, 300).empty()); }
TEST_CASE("episode traces stay in range") { CHECK(props::episode_ranges(7, 20).empty()); }
TEST_CASE("genes stay in bounds and population size is constant") {
  for (std::uint64_t seed : {8ULL, 9ULL, 10ULL}) CHECK(props::gene_bounds_and_population_size(seed).empty());
}
