#pragma once

// Sum-factorized element-level interpolation and integration on
// tensor-product bases. Element-local tensors are laid out with axis 0
// slowest: local[(a * c1 + b) * c2 + c].

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "ctd/cfe_basis.hpp"

namespace ctd::detail {

class ElementKernel {
 public:
  explicit ElementKernel(const BasisSet& bases);

  std::size_t dim() const { return dim_; }
  std::size_t n_qp() const { return n_qp_; }
  /// Product quadrature weight of quadrature point q (identical on every element).
  std::span<const double> weights() const { return weights_; }
  std::size_t elements_along(std::size_t axis) const { return bases_[axis]->n_elem(); }

  /// Copies the element's supporting nodal values from a global field.
  void gather(std::span<const double> field, const std::array<std::size_t, 3>& e);
  /// Interpolates the gathered values to quadrature points. With
  /// deriv_axis >= 0 the derivative along that axis is returned instead.
  void interpolate(const std::array<std::size_t, 3>& e, int deriv_axis, std::span<double> qvals);
  /// out[node] += sum_q N_node(q) * qvals[q] for the element's supporting nodes.
  void integrate_add(std::span<const double> qvals, const std::array<std::size_t, 3>& e, std::span<double> out);

 private:
  std::size_t dim_;
  std::vector<const Basis1D*> bases_;
  std::array<std::size_t, 3> n_node_{1, 1, 1};
  std::array<std::size_t, 3> nq_{1, 1, 1};
  std::size_t n_qp_ = 1;
  std::vector<double> weights_;
  std::vector<double> local_, buf_a_, buf_b_;
  static constexpr double one_ = 1.0;
};

}  // namespace ctd::detail
