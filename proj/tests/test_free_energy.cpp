#include <doctest.h>

#include <cmath>

#include "ctd/errors.hpp"
#include "ctd/free_energy.hpp"
#include "ctd/random.hpp"
#include "oracle.hpp"

using namespace ctd;

TEST_CASE("double-well derivatives agree with finite differences") {
  const double a0 = 10.0;
  for (double u : {-1.3, -1.0, -0.4, 0.0, 0.2, 0.9, 1.1}) {
    const double fd1 = (double_well(u + 1e-6, a0) - double_well(u - 1e-6, a0)) / 2e-6;
    const double fd2 = (double_well_derivative(u + 1e-6, a0) - double_well_derivative(u - 1e-6, a0)) / 2e-6;
    CHECK(double_well_derivative(u, a0) == doctest::Approx(fd1).epsilon(1e-7));
    CHECK(double_well_curvature(u, a0) == doctest::Approx(fd2).epsilon(1e-7));
  }
  CHECK(double_well(1.0, a0) == 0.0);
  CHECK(double_well(-1.0, a0) == 0.0);
  CHECK(double_well(0.0, a0) == a0);
}

TEST_CASE("minimum stabilization is half the largest curvature") {
  // Curvature 4 a0 (3u^2 - 1) is largest at the end of the range.
  CHECK(min_alpha(10.0) == doctest::Approx(40.0));
  CHECK(min_alpha(10.0, -1.2, 1.2) == doctest::Approx(0.5 * 40.0 * (3.0 * 1.44 - 1.0)));
  CHECK(min_alpha(1.0, -0.1, 0.1) == doctest::Approx(0.0));
}

TEST_CASE("physical parameter validation") {
  PhysParams p;
  CHECK_NOTHROW(validate(p));
  p.dt = 0.0;
  CHECK_THROWS_AS(validate(p), ConfigError);
  p = PhysParams{};
  p.mobility = -1.0;
  CHECK_THROWS_AS(validate(p), ConfigError);
  p = PhysParams{};
  p.alpha = -1.0;
  CHECK_THROWS_AS(validate(p), ConfigError);
}

TEST_CASE("energy of a pure phase is zero and of u = 0 is a0 |domain|") {
  const Grid g({Axis1D(0, 5, 8), Axis1D(0, 5, 8)});
  BasisSet bases{build_cfe_basis(g.axis(0), {}), build_cfe_basis(g.axis(1), {})};
  CHECK(std::abs(total_energy(FullField(g, 1.0), bases, 1.0, 10.0)) < 1e-12);
  CHECK(total_energy(FullField(g, 0.0), bases, 1.0, 10.0) == doctest::Approx(250.0).epsilon(1e-12));
}

TEST_CASE("energy of a random field matches brute-force quadrature") {
  SUBCASE("2D CFE") {
    const Grid g({Axis1D(0, 5, 8), Axis1D(0, 5, 8)});
    BasisSet bases{build_cfe_basis(g.axis(0), {2, 2, 12.0}), build_cfe_basis(g.axis(1), {2, 2, 12.0})};
    const auto u = seeded_initial_condition(g, 3, -1.0, 1.0);
    const double E = total_energy(u, bases, 0.7, 10.0);
    CHECK(E == doctest::Approx(oracle::energy(bases, u.values(), 0.7, 10.0, 6)).epsilon(1e-12));
  }
  SUBCASE("3D linear") {
    const Grid g({Axis1D(0, 5, 4), Axis1D(0, 5, 5), Axis1D(0, 5, 3)});
    BasisSet bases{build_linear_basis(g.axis(0)), build_linear_basis(g.axis(1)), build_linear_basis(g.axis(2))};
    const auto u = seeded_initial_condition(g, 4, -1.0, 1.0);
    const double E = total_energy(u, bases, 1.0, 10.0);
    CHECK(E == doctest::Approx(oracle::energy(bases, u.values(), 1.0, 10.0, 6)).epsilon(1e-12));
  }
}

TEST_CASE("gradient energy of a linear profile") {
  // u = x / 5 on [0,5]^2: kappa/2 |grad u|^2 integrates to kappa/2 * 1/25 * 25.
  const Grid g({Axis1D(0, 5, 6), Axis1D(0, 5, 6)});
  BasisSet bases{build_cfe_basis(g.axis(0), {}), build_cfe_basis(g.axis(1), {})};
  FullField u(g);
  for (std::size_t j = 0; j < 7; ++j)
    for (std::size_t i = 0; i < 7; ++i) u[i + 7 * j] = g.axis(0).node(i) / 5.0;
  // Bulk part for u in [0,1] along x: 5 * integral_0^5 a0 ((x/5)^2 - 1)^2 dx = 25 a0 * 8/15.
  const double expected = 0.5 + 25.0 * 10.0 * 8.0 / 15.0;
  CHECK(total_energy(u, bases, 1.0, 10.0) == doctest::Approx(expected).epsilon(1e-12));
}
