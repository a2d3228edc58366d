#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "ctd/cfe_basis.hpp"
#include "ctd/errors.hpp"
#include "oracle.hpp"

using namespace ctd;

namespace {

const CfeParams kParamSets[] = {{1, 1, 12.0}, {1, 2, 12.0}, {2, 2, 12.0}, {3, 3, 12.0}};

// Evaluation points inside one element, including both end points.
std::vector<double> sample_points() {
  std::vector<double> xi;
  for (int k = 0; k <= 20; ++k) xi.push_back(-1.0 + 0.1 * k);
  return xi;
}

// Shape functions of element e at xi for every node, by solving the bordered
// system [R P; P^T 0] [K; L] = [I; 0] of each nodal patch with raw monomials.
Eigen::VectorXd direct_shapes(const Axis1D& axis, const CfeParams& prm, std::size_t e, double xi) {
  const int nn = static_cast<int>(axis.n_node());
  Eigen::VectorXd N = Eigen::VectorXd::Zero(nn);
  for (int side = 0; side < 2; ++side) {
    const int node = static_cast<int>(e) + side;
    const double hat = side == 0 ? 0.5 * (1.0 - xi) : 0.5 * (1.0 + xi);
    const double local = xi - (side == 0 ? -1.0 : 1.0);
    const int lo = std::max(0, node - prm.s), hi = std::min(nn - 1, node + prm.s);
    const int n = hi - lo + 1, m = prm.p + 1;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + m, n + m);
    for (int i = 0; i < n; ++i) {
      const double xi_i = 2.0 * (lo + i - node);
      for (int j = 0; j < n; ++j) A(i, j) = cubic_spline_kernel(std::abs(xi_i - 2.0 * (lo + j - node)) / prm.a);
      for (int r = 0; r < m; ++r) A(i, n + r) = A(n + r, i) = std::pow(xi_i, r);
    }
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n + m, n);
    rhs.topRows(n).setIdentity();
    const Eigen::MatrixXd coef = A.fullPivLu().solve(rhs);
    Eigen::RowVectorXd row(n + m);
    for (int j = 0; j < n; ++j) row[j] = cubic_spline_kernel(std::abs(local - 2.0 * (lo + j - node)) / prm.a);
    for (int r = 0; r < m; ++r) row[n + r] = std::pow(local, r);
    const Eigen::RowVectorXd W = row * coef;
    for (int j = 0; j < n; ++j) N[lo + j] += hat * W[j];
  }
  return N;
}

}  // namespace

TEST_CASE("cubic spline kernel values") {
  CHECK(cubic_spline_kernel(0.0) == doctest::Approx(2.0 / 3.0));
  CHECK(cubic_spline_kernel(0.5) == doctest::Approx(1.0 / 6.0));
  CHECK(cubic_spline_kernel(1.0) == doctest::Approx(0.0));
  CHECK(cubic_spline_kernel(1.5) == 0.0);
  CHECK(cubic_spline_kernel(-0.25) == cubic_spline_kernel(0.25));
  for (double z : {0.1, 0.3, 0.5, 0.7, 0.95}) {
    const double fd = (cubic_spline_kernel(z + 1e-6) - cubic_spline_kernel(z - 1e-6)) / 2e-6;
    CHECK(cubic_spline_kernel_derivative(z) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("Gauss-Legendre integrates degree 2n-1 exactly") {
  for (std::size_t n : {2u, 3u, 6u, 10u}) {
    const auto [x, w] = gauss_legendre(n);
    for (std::size_t deg = 0; deg <= 2 * n - 1; ++deg) {
      double s = 0.0;
      for (std::size_t g = 0; g < n; ++g) s += w[g] * std::pow(x[g], static_cast<double>(deg));
      const double exact = deg % 2 ? 0.0 : 2.0 / static_cast<double>(deg + 1);
      CHECK(s == doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(validate(CfeParams{0, 1, 12.0}), ConfigError);
  CHECK_THROWS_AS(validate(CfeParams{1, 0, 12.0}), ConfigError);
  CHECK_THROWS_AS(validate(CfeParams{1, 1, 0.0}), ConfigError);
  CHECK_THROWS_AS(build_cfe_basis(Axis1D(0, 1, 4), CfeParams{3, 3, 12.0}), ConfigError);
  // Three patch nodes cannot reproduce cubics.
  CHECK_THROWS_AS(build_cfe_basis(Axis1D(0, 1, 8), CfeParams{3, 1, 12.0}), BasisError);
}

TEST_CASE("patch interpolant reproduces its data and polynomials") {
  const std::vector<double> coords{-4, -2, 0, 2, 4};
  const auto interp = build_nodal_interp(coords, 0.0, CfeParams{2, 2, 12.0});
  std::vector<double> W(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) {
    interp.values(coords[i], W);
    for (std::size_t j = 0; j < coords.size(); ++j) CHECK(W[j] == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
  }
  for (double xi : {-3.3, -0.7, 1.1, 2.9}) {
    interp.values(xi, W);
    double s0 = 0, s1 = 0, s2 = 0;
    for (std::size_t j = 0; j < coords.size(); ++j) {
      s0 += W[j];
      s1 += W[j] * coords[j];
      s2 += W[j] * coords[j] * coords[j];
    }
    CHECK(s0 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s1 == doctest::Approx(xi).epsilon(1e-12));
    CHECK(s2 == doctest::Approx(xi * xi).epsilon(1e-12));
  }
}

TEST_CASE("support sizes of CFE element tables") {
  const Axis1D axis(0.0, 5.0, 12);
  const auto b1 = build_cfe_basis(axis, CfeParams{1, 1, 12.0});
  CHECK(b1.max_support() == 4);
  CHECK(b1.element(0).count == 3);
  CHECK(b1.element(5).first == 4);
  CHECK(b1.element(5).count == 4);
  CHECK(b1.half_bandwidth() == 3);
  const auto b2 = build_cfe_basis(axis, CfeParams{2, 2, 12.0});
  CHECK(b2.max_support() == 6);
  const auto lin = build_linear_basis(axis);
  CHECK(lin.max_support() == 2);
  CHECK(lin.half_bandwidth() == 1);
}

TEST_CASE("basis invariants for every parameter set") {
  const Axis1D axis(-0.5, 5.0, 11);
  const double h = axis.h();
  for (const auto& prm : kParamSets) {
    CAPTURE(prm.p);
    CAPTURE(prm.s);
    const auto basis = build_cfe_basis(axis, prm);
    for (std::size_t e = 0; e < basis.n_elem(); ++e) {
      const auto& tab = basis.element(e);
      std::vector<double> N(tab.count), dN(tab.count), Np(tab.count), Nm(tab.count), tmp(tab.count);

      // Kronecker delta at both element nodes.
      for (int side = 0; side < 2; ++side) {
        basis.evaluate(e, side == 0 ? -1.0 : 1.0, N, dN);
        const std::size_t node = e + static_cast<std::size_t>(side);
        for (std::size_t k = 0; k < tab.count; ++k)
          CHECK(N[k] == doctest::Approx(tab.first + k == node ? 1.0 : 0.0).epsilon(1e-12).scale(1.0));
      }

      for (double xi : sample_points()) {
        basis.evaluate(e, xi, N, dN);
        const double x = axis.node(e) + 0.5 * (xi + 1.0) * h;
        double sum = 0.0, dsum = 0.0;
        for (std::size_t k = 0; k < tab.count; ++k) {
          sum += N[k];
          dsum += dN[k];
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(dsum) < 1e-10 / h);

        // Reproduction of x^q for q <= p, values and derivatives.
        for (int q = 1; q <= prm.p; ++q) {
          double v = 0.0, dv = 0.0;
          for (std::size_t k = 0; k < tab.count; ++k) {
            const double xk = axis.node(tab.first + k);
            v += N[k] * std::pow(xk, q);
            dv += dN[k] * std::pow(xk, q);
          }
          CHECK(v == doctest::Approx(std::pow(x, q)).epsilon(1e-10).scale(1.0));
          CHECK(dv == doctest::Approx(q * std::pow(x, q - 1)).epsilon(1e-9).scale(1.0));
        }

        // Central finite differences in the physical coordinate.
        if (xi > -0.95 && xi < 0.95) {
          const double dxi = 1e-5;
          basis.evaluate(e, xi + dxi, Np, tmp);
          basis.evaluate(e, xi - dxi, Nm, tmp);
          for (std::size_t k = 0; k < tab.count; ++k) {
            const double fd = (Np[k] - Nm[k]) / (2.0 * dxi) * (2.0 / h);
            CHECK(dN[k] == doctest::Approx(fd).epsilon(1e-6).scale(1.0 / h));
          }
        }
      }
    }
  }
}

TEST_CASE("tabulated shapes match a direct bordered-system construction") {
  const Axis1D axis(0.0, 5.0, 10);
  for (const auto& prm : kParamSets) {
    CAPTURE(prm.p);
    CAPTURE(prm.s);
    const auto basis = build_cfe_basis(axis, prm);
    for (std::size_t e = 0; e < basis.n_elem(); ++e) {
      const auto& tab = basis.element(e);
      for (std::size_t g = 0; g < basis.n_quad(); ++g) {
        const Eigen::VectorXd ref = direct_shapes(axis, prm, e, basis.quad_xi()[g]);
        for (std::size_t k = 0; k < tab.count; ++k)
          CHECK(tab.N[g * tab.count + k] == doctest::Approx(ref[static_cast<Eigen::Index>(tab.first + k)]).epsilon(1e-10).scale(1.0));
        double outside = 0.0;
        for (Eigen::Index i = 0; i < ref.size(); ++i)
          if (i < static_cast<Eigen::Index>(tab.first) || i >= static_cast<Eigen::Index>(tab.first + tab.count))
            outside = std::max(outside, std::abs(ref[i]));
        CHECK(outside < 1e-13);
      }
    }
  }
}

TEST_CASE("linear basis is the hat function pair") {
  const Axis1D axis(0.0, 2.0, 4);
  const auto b = build_linear_basis(axis, 2);
  std::vector<double> N(2), dN(2);
  b.evaluate(1, 0.5, N, dN);
  CHECK(N[0] == doctest::Approx(0.25));
  CHECK(N[1] == doctest::Approx(0.75));
  CHECK(dN[0] == doctest::Approx(-2.0));
  CHECK(dN[1] == doctest::Approx(2.0));
  CHECK(b.quad_x(1, 0) == doctest::Approx(0.5 + 0.25 * (1.0 - 1.0 / std::sqrt(3.0))));
}

TEST_CASE("CFE shapes are quartic: six-point and ten-point mass matrices agree") {
  const Axis1D axis(0.0, 5.0, 9);
  for (const auto& prm : kParamSets) {
    const auto basis = build_cfe_basis(axis, prm);
    const auto M6 = oracle::mass_1d(basis, 6), M10 = oracle::mass_1d(basis, 10);
    const auto S6 = oracle::stiffness_1d(basis, 6), S10 = oracle::stiffness_1d(basis, 10);
    CHECK((M6 - M10).norm() <= 1e-12 * M10.norm());
    CHECK((S6 - S10).norm() <= 1e-12 * S10.norm());
  }
}
