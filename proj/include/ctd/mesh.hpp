#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ctd {

/// Uniform 1D axis: n_elem elements of size h on [origin, origin + extent].
class Axis1D {
 public:
  Axis1D(double origin, double extent, std::size_t n_elem);

  double origin() const { return origin_; }
  double extent() const { return extent_; }
  double h() const { return h_; }
  std::size_t n_elem() const { return n_elem_; }
  std::size_t n_node() const { return n_elem_ + 1; }
  double node(std::size_t i) const { return origin_ + static_cast<double>(i) * h_; }

 private:
  double origin_;
  double extent_;
  std::size_t n_elem_;
  double h_;
};

Axis1D build_axis(double origin, double extent, std::size_t n_elem);

/// Tensor-product grid of 2 or 3 axes. Nodal numbering is row-major with
/// the x axis (axis 0) running fastest.
class Grid {
 public:
  explicit Grid(std::vector<Axis1D> axes);

  std::size_t dim() const { return axes_.size(); }
  const Axis1D& axis(std::size_t a) const { return axes_[a]; }
  const std::vector<Axis1D>& axes() const { return axes_; }
  std::size_t total_nodes() const { return total_nodes_; }
  std::vector<std::size_t> node_counts() const;
  double measure() const;

  bool same_shape(const Grid& other) const;

 private:
  std::vector<Axis1D> axes_;
  std::size_t total_nodes_ = 0;
};

std::size_t global_index(const Grid& grid, std::span<const std::size_t> axis_indices);
std::vector<std::size_t> axis_indices(const Grid& grid, std::size_t global);

}  // namespace ctd
