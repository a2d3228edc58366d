#pragma once

// One-dimensional shape function tables for linear finite elements and
// convolution finite elements (CFE).
//
// A CFE shape function on element e = [x_e, x_{e+1}] blends the two linear
// hat functions with radial-basis patch interpolants centred at the element
// nodes:
//
//     N~_k(xi) = sum_{i in {e, e+1}} N_i(xi) * W^i_k(xi)
//
// where W^i interpolates nodal data on the patch {i-s, ..., i+s} (truncated
// at the domain boundary) with a cubic spline kernel of dilation a and
// polynomial reproduction of order p. All coordinates xi are element-natural:
// the element spans [-1, 1] and neighbouring nodes sit at the odd integers.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "ctd/mesh.hpp"

namespace ctd {

struct CfeParams {
  int p = 1;        // polynomial reproduction order
  int s = 1;        // patch size in element layers
  double a = 12.0;  // kernel dilation, natural-coordinate units
};

void validate(const CfeParams& params);

/// Cubic spline kernel Psi(z) for z >= 0; zero beyond z = 1.
double cubic_spline_kernel(double z);
/// dPsi/dz.
double cubic_spline_kernel_derivative(double z);

/// Gauss-Legendre points and weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(std::size_t n);

/// Radial-basis interpolant with polynomial reproduction on one nodal patch.
///
/// W(xi) = Psi_a(xi) * K + p(xi) * L, with L = (P^T R0^-1 P)^-1 P^T R0^-1 and
/// K = R0^-1 (I - P L). The monomials are evaluated in the shifted and scaled
/// variable (xi - center) / scale; the reproduced polynomial space is the same.
class NodalPatchInterp {
 public:
  NodalPatchInterp() = default;
  NodalPatchInterp(std::vector<double> support, double center, int order, double dilation,
                   std::vector<double> kernel_coef, std::vector<double> poly_coef, double scale);

  std::size_t size() const { return support_.size(); }
  std::span<const double> support() const { return support_; }
  double center() const { return center_; }
  int order() const { return order_; }

  /// K stored row-major: kernel_coef()[I * size() + j].
  std::span<const double> kernel_coef() const { return kernel_coef_; }
  /// L stored row-major: poly_coef()[r * size() + j].
  std::span<const double> poly_coef() const { return poly_coef_; }

  void values(double xi, std::span<double> out) const;
  void derivatives(double xi, std::span<double> out) const;

 private:
  std::vector<double> support_;
  double center_ = 0.0;
  int order_ = 0;
  double dilation_ = 1.0;
  std::vector<double> kernel_coef_;
  std::vector<double> poly_coef_;
  double scale_ = 1.0;
};

NodalPatchInterp build_nodal_interp(std::span<const double> support_coords, double center,
                                    const CfeParams& params);

enum class BasisKind { linear, cfe };

/// Shape function values on one element. Supporting nodes are contiguous,
/// [first, first + count). Tables are quadrature-point major:
/// N[g * count + k].
struct ElementTable {
  std::size_t first = 0;
  std::size_t count = 0;
  std::vector<double> N;
  std::vector<double> dN;  // d/dx in physical units
};

class Basis1D {
 public:
  Basis1D(Axis1D axis, BasisKind kind, CfeParams params, std::size_t n_quad);

  const Axis1D& axis() const { return axis_; }
  BasisKind kind() const { return kind_; }
  const CfeParams& params() const { return params_; }
  std::size_t n_node() const { return axis_.n_node(); }
  std::size_t n_elem() const { return axis_.n_elem(); }
  std::size_t n_quad() const { return quad_xi_.size(); }
  std::span<const double> quad_xi() const { return quad_xi_; }
  /// Physical quadrature weights (reference weight times h / 2).
  std::span<const double> quad_weights() const { return quad_w_; }
  const ElementTable& element(std::size_t e) const { return elements_[e]; }
  /// Largest |i - j| for which nodes i and j share an element support.
  std::size_t half_bandwidth() const { return half_bandwidth_; }
  std::size_t max_support() const { return max_support_; }

  /// Physical coordinate of quadrature point g on element e.
  double quad_x(std::size_t e, std::size_t g) const;

  /// Shape functions of element e at natural coordinate xi, in element
  /// support order. dNdx is in physical units.
  void evaluate(std::size_t e, double xi, std::span<double> N, std::span<double> dNdx) const;

  /// Patch interpolant of node i (CFE only).
  const NodalPatchInterp& node_interp(std::size_t i) const { return node_interp_[i]; }

 private:
  friend Basis1D build_cfe_basis(const Axis1D&, const CfeParams&, std::size_t);
  friend Basis1D build_linear_basis(const Axis1D&, std::size_t);
  void tabulate();

  Axis1D axis_;
  BasisKind kind_;
  CfeParams params_;
  std::vector<double> quad_xi_;
  std::vector<double> quad_w_;
  std::vector<ElementTable> elements_;
  std::vector<NodalPatchInterp> node_interp_;
  std::size_t half_bandwidth_ = 1;
  std::size_t max_support_ = 2;
};

Basis1D build_cfe_basis(const Axis1D& axis, const CfeParams& params, std::size_t n_quad = 6);
Basis1D build_linear_basis(const Axis1D& axis, std::size_t n_quad = 6);

using BasisSet = std::vector<Basis1D>;

}  // namespace ctd
