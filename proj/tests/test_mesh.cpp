#include <doctest.h>

#include <stdexcept>

#include "ctd/errors.hpp"
#include "ctd/mesh.hpp"

using namespace ctd;

TEST_CASE("axis spacing and node coordinates") {
  const Axis1D ax(-1.0, 5.0, 125);
  CHECK(ax.h() == doctest::Approx(0.04));
  CHECK(ax.n_node() == 126);
  CHECK(ax.node(0) == -1.0);
  CHECK(ax.node(125) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("invalid axes are rejected") {
  CHECK_THROWS_AS(Axis1D(0.0, 5.0, 0), ConfigError);
  CHECK_THROWS_AS(Axis1D(0.0, 0.0, 4), ConfigError);
  CHECK_THROWS_AS(Axis1D(0.0, -1.0, 4), ConfigError);
}

TEST_CASE("grid dimension must be 2 or 3") {
  CHECK_THROWS_AS(Grid({Axis1D(0, 1, 4)}), ConfigError);
  CHECK_THROWS_AS(Grid({Axis1D(0, 1, 4), Axis1D(0, 1, 4), Axis1D(0, 1, 4), Axis1D(0, 1, 4)}), ConfigError);
}

TEST_CASE("global numbering runs x fastest and round-trips") {
  const Grid g({Axis1D(0, 1, 3), Axis1D(0, 2, 4), Axis1D(0, 3, 3)});
  CHECK(g.total_nodes() == 4 * 5 * 4);
  CHECK(g.measure() == doctest::Approx(6.0));
  const std::size_t idx[3] = {1, 2, 1};
  CHECK(global_index(g, idx) == 1 + 4 * (2 + 5 * 1));
  for (std::size_t k = 0; k < g.total_nodes(); ++k) {
    const auto ijk = axis_indices(g, k);
    REQUIRE(ijk.size() == 3);
    CHECK(global_index(g, ijk) == k);
  }
  const auto counts = g.node_counts();
  CHECK(counts == std::vector<std::size_t>{4, 5, 4});
}

TEST_CASE("same_shape compares node counts and geometry") {
  const Grid a({Axis1D(0, 5, 8), Axis1D(0, 5, 8)});
  const Grid b({Axis1D(0, 5, 8), Axis1D(0, 5, 8)});
  const Grid c({Axis1D(0, 5, 8), Axis1D(0, 5, 9)});
  CHECK(a.same_shape(b));
  CHECK_FALSE(a.same_shape(c));
}
