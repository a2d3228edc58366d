#include "ctd/cfe_basis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "ctd/errors.hpp"

namespace ctd {

void validate(const CfeParams& params) {
  if (params.p < 1 || params.s < 1 || !(params.a > 0.0)) {
    std::ostringstream msg;
    msg << "invalid CFE parameters (p=" << params.p << ", s=" << params.s << ", a=" << params.a
        << "): need p >= 1, s >= 1, a > 0";
    throw ConfigError(msg.str());
  }
}

double cubic_spline_kernel(double z) {
  if (z < 0.0) z = -z;
  if (z <= 0.5) return 2.0 / 3.0 - 4.0 * z * z + 4.0 * z * z * z;
  if (z <= 1.0) return 4.0 / 3.0 - 4.0 * z + 4.0 * z * z - 4.0 / 3.0 * z * z * z;
  return 0.0;
}

double cubic_spline_kernel_derivative(double z) {
  if (z < 0.0) z = -z;
  if (z <= 0.5) return -8.0 * z + 12.0 * z * z;
  if (z <= 1.0) return -4.0 + 8.0 * z - 4.0 * z * z;
  return 0.0;
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(std::size_t n) {
  if (n == 0) throw std::invalid_argument("gauss_legendre: n must be positive");
  std::vector<double> x(n), w(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (std::size_t k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / static_cast<double>(k);
      }
      dp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

// ---------------------------------------------------------------------------

NodalPatchInterp::NodalPatchInterp(std::vector<double> support, double center, int order, double dilation,
                                   std::vector<double> kernel_coef, std::vector<double> poly_coef, double scale)
    : support_(std::move(support)),
      center_(center),
      order_(order),
      dilation_(dilation),
      kernel_coef_(std::move(kernel_coef)),
      poly_coef_(std::move(poly_coef)),
      scale_(scale) {}

void NodalPatchInterp::values(double xi, std::span<double> out) const {
  const std::size_t n = support_.size();
  std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(n), 0.0);
  for (std::size_t I = 0; I < n; ++I) {
    const double psi = cubic_spline_kernel(std::abs(xi - support_[I]) / dilation_);
    if (psi == 0.0) continue;
    const double* row = &kernel_coef_[I * n];
    for (std::size_t j = 0; j < n; ++j) out[j] += psi * row[j];
  }
  const double t = (xi - center_) / scale_;
  double tp = 1.0;
  for (int r = 0; r <= order_; ++r) {
    const double* row = &poly_coef_[static_cast<std::size_t>(r) * n];
    for (std::size_t j = 0; j < n; ++j) out[j] += tp * row[j];
    tp *= t;
  }
}

void NodalPatchInterp::derivatives(double xi, std::span<double> out) const {
  const std::size_t n = support_.size();
  std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(n), 0.0);
  for (std::size_t I = 0; I < n; ++I) {
    const double d = xi - support_[I];
    const double dpsi = cubic_spline_kernel_derivative(std::abs(d) / dilation_) * (d < 0.0 ? -1.0 : 1.0) / dilation_;
    if (dpsi == 0.0) continue;
    const double* row = &kernel_coef_[I * n];
    for (std::size_t j = 0; j < n; ++j) out[j] += dpsi * row[j];
  }
  const double t = (xi - center_) / scale_;
  double tp = 1.0;  // t^(r-1)
  for (int r = 1; r <= order_; ++r) {
    const double* row = &poly_coef_[static_cast<std::size_t>(r) * n];
    const double c = static_cast<double>(r) * tp / scale_;
    for (std::size_t j = 0; j < n; ++j) out[j] += c * row[j];
    tp *= t;
  }
}

NodalPatchInterp build_nodal_interp(std::span<const double> support_coords, double center, const CfeParams& params) {
  validate(params);
  const std::size_t n = support_coords.size();
  const std::size_t q = static_cast<std::size_t>(params.p) + 1;
  auto fail = [&](const std::string& why) {
    std::ostringstream msg;
    msg << "CFE basis construction failed for (p=" << params.p << ", s=" << params.s << ", a=" << params.a
        << "): " << why;
    throw BasisError(msg.str());
  };
  if (n < q) fail("patch of " + std::to_string(n) + " nodes cannot reproduce order " + std::to_string(params.p));

  double scale = 0.0;
  for (double c : support_coords) scale = std::max(scale, std::abs(c - center));
  if (scale == 0.0) scale = 1.0;

  // Bordered system [R0 P; P^T 0] [K; L] = [I; 0].
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n + q), static_cast<Eigen::Index>(n + q));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      A(i, j) = cubic_spline_kernel(std::abs(support_coords[i] - support_coords[j]) / params.a);
    }
    const double t = (support_coords[i] - center) / scale;
    double tp = 1.0;
    for (std::size_t r = 0; r < q; ++r) {
      A(i, n + r) = tp;
      A(n + r, i) = tp;
      tp *= t;
    }
  }
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n + q), static_cast<Eigen::Index>(n));
  rhs.topRows(static_cast<Eigen::Index>(n)).setIdentity();

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  const double rcond = lu.rcond();
  if (!(rcond >= 1e-12)) {
    std::ostringstream why;
    why << "singular moment matrix (reciprocal condition " << rcond << ")";
    fail(why.str());
  }
  const Eigen::MatrixXd X = lu.solve(rhs);

  std::vector<double> kernel_coef(n * n), poly_coef(q * n);
  for (std::size_t I = 0; I < n; ++I)
    for (std::size_t j = 0; j < n; ++j) kernel_coef[I * n + j] = X(I, j);
  for (std::size_t r = 0; r < q; ++r)
    for (std::size_t j = 0; j < n; ++j) poly_coef[r * n + j] = X(n + r, j);

  return NodalPatchInterp(std::vector<double>(support_coords.begin(), support_coords.end()), center, params.p,
                          params.a, std::move(kernel_coef), std::move(poly_coef), scale);
}

// ---------------------------------------------------------------------------

Basis1D::Basis1D(Axis1D axis, BasisKind kind, CfeParams params, std::size_t n_quad)
    : axis_(axis), kind_(kind), params_(params) {
  if (n_quad < 2) throw ConfigError("need at least 2 quadrature points per element");
  auto [x, w] = gauss_legendre(n_quad);
  quad_xi_ = std::move(x);
  quad_w_ = std::move(w);
  for (double& wi : quad_w_) wi *= 0.5 * axis_.h();
}

double Basis1D::quad_x(std::size_t e, std::size_t g) const {
  return axis_.node(e) + 0.5 * (quad_xi_[g] + 1.0) * axis_.h();
}

void Basis1D::evaluate(std::size_t e, double xi, std::span<double> N, std::span<double> dNdx) const {
  const double jac = 2.0 / axis_.h();
  if (kind_ == BasisKind::linear) {
    N[0] = 0.5 * (1.0 - xi);
    N[1] = 0.5 * (1.0 + xi);
    dNdx[0] = -0.5 * jac;
    dNdx[1] = 0.5 * jac;
    return;
  }
  const ElementTable& tab = elements_[e];
  const std::size_t cnt = tab.count;
  std::fill(N.begin(), N.begin() + static_cast<std::ptrdiff_t>(cnt), 0.0);
  std::fill(dNdx.begin(), dNdx.begin() + static_cast<std::ptrdiff_t>(cnt), 0.0);

  std::vector<double> W(cnt), dW(cnt);
  for (int side = 0; side < 2; ++side) {
    const std::size_t node = e + static_cast<std::size_t>(side);
    const double node_xi = side == 0 ? -1.0 : 1.0;
    const double hat = side == 0 ? 0.5 * (1.0 - xi) : 0.5 * (1.0 + xi);
    const double dhat = side == 0 ? -0.5 : 0.5;
    const NodalPatchInterp& interp = node_interp_[node];
    const std::size_t lo = node >= static_cast<std::size_t>(params_.s) ? node - static_cast<std::size_t>(params_.s) : 0;
    const std::size_t off = lo - tab.first;
    interp.values(xi - node_xi, W);
    interp.derivatives(xi - node_xi, dW);
    for (std::size_t j = 0; j < interp.size(); ++j) {
      N[off + j] += hat * W[j];
      dNdx[off + j] += (dhat * W[j] + hat * dW[j]) * jac;
    }
  }
}

void Basis1D::tabulate() {
  const std::size_t ne = axis_.n_elem();
  const std::size_t nn = axis_.n_node();
  const std::size_t nq = quad_xi_.size();
  elements_.assign(ne, ElementTable{});
  half_bandwidth_ = 0;
  max_support_ = 0;
  for (std::size_t e = 0; e < ne; ++e) {
    ElementTable& tab = elements_[e];
    if (kind_ == BasisKind::linear) {
      tab.first = e;
      tab.count = 2;
    } else {
      const std::size_t s = static_cast<std::size_t>(params_.s);
      tab.first = e >= s ? e - s : 0;
      const std::size_t last = std::min(nn - 1, e + 1 + s);
      tab.count = last - tab.first + 1;
    }
    tab.N.resize(nq * tab.count);
    tab.dN.resize(nq * tab.count);
    for (std::size_t g = 0; g < nq; ++g) {
      evaluate(e, quad_xi_[g], std::span<double>(&tab.N[g * tab.count], tab.count),
               std::span<double>(&tab.dN[g * tab.count], tab.count));
    }
    half_bandwidth_ = std::max(half_bandwidth_, tab.count - 1);
    max_support_ = std::max(max_support_, tab.count);
  }
}

Basis1D build_cfe_basis(const Axis1D& axis, const CfeParams& params, std::size_t n_quad) {
  validate(params);
  const std::size_t s = static_cast<std::size_t>(params.s);
  if (axis.n_elem() < 2 * s + 1) {
    throw ConfigError("CFE patch size s=" + std::to_string(s) + " needs at least " + std::to_string(2 * s + 1) +
                      " elements per axis, got " + std::to_string(axis.n_elem()));
  }
  Basis1D basis(axis, BasisKind::cfe, params, n_quad);
  const std::size_t nn = axis.n_node();
  basis.node_interp_.reserve(nn);
  std::vector<double> coords;
  for (std::size_t i = 0; i < nn; ++i) {
    const std::size_t lo = i >= s ? i - s : 0;
    const std::size_t hi = std::min(nn - 1, i + s);
    coords.clear();
    for (std::size_t j = lo; j <= hi; ++j) coords.push_back(2.0 * (static_cast<double>(j) - static_cast<double>(i)));
    basis.node_interp_.push_back(build_nodal_interp(coords, 0.0, params));
  }
  basis.tabulate();
  return basis;
}

Basis1D build_linear_basis(const Axis1D& axis, std::size_t n_quad) {
  Basis1D basis(axis, BasisKind::linear, CfeParams{}, n_quad);
  basis.tabulate();
  return basis;
}

}  // namespace ctd
