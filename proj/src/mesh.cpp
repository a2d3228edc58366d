#include "ctd/mesh.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ctd/errors.hpp"

namespace ctd {

Axis1D::Axis1D(double origin, double extent, std::size_t n_elem)
    : origin_(origin), extent_(extent), n_elem_(n_elem), h_(0.0) {
  if (!(extent > 0.0) || !std::isfinite(extent) || !std::isfinite(origin)) {
    throw ConfigError("axis extent must be positive and finite, got " + std::to_string(extent));
  }
  if (n_elem < 3) {
    throw ConfigError("axis needs at least 3 elements, got " + std::to_string(n_elem));
  }
  h_ = extent / static_cast<double>(n_elem);
}

Axis1D build_axis(double origin, double extent, std::size_t n_elem) {
  return Axis1D(origin, extent, n_elem);
}

Grid::Grid(std::vector<Axis1D> axes) : axes_(std::move(axes)) {
  if (axes_.size() != 2 && axes_.size() != 3) {
    throw ConfigError("grid must have 2 or 3 axes, got " + std::to_string(axes_.size()));
  }
  total_nodes_ = 1;
  for (const auto& ax : axes_) total_nodes_ *= ax.n_node();
}

std::vector<std::size_t> Grid::node_counts() const {
  std::vector<std::size_t> n;
  n.reserve(axes_.size());
  for (const auto& ax : axes_) n.push_back(ax.n_node());
  return n;
}

double Grid::measure() const {
  double m = 1.0;
  for (const auto& ax : axes_) m *= ax.extent();
  return m;
}

bool Grid::same_shape(const Grid& other) const {
  if (dim() != other.dim()) return false;
  for (std::size_t a = 0; a < dim(); ++a) {
    if (axes_[a].n_node() != other.axes_[a].n_node()) return false;
  }
  return true;
}

std::size_t global_index(const Grid& grid, std::span<const std::size_t> idx) {
  if (idx.size() != grid.dim()) {
    throw std::logic_error("global_index: expected " + std::to_string(grid.dim()) + " indices");
  }
  std::size_t g = 0;
  std::size_t stride = 1;
  for (std::size_t a = 0; a < grid.dim(); ++a) {
    const std::size_t n = grid.axis(a).n_node();
    if (idx[a] >= n) {
      throw std::logic_error("global_index: index " + std::to_string(idx[a]) + " out of range on axis " +
                             std::to_string(a));
    }
    g += idx[a] * stride;
    stride *= n;
  }
  return g;
}

std::vector<std::size_t> axis_indices(const Grid& grid, std::size_t global) {
  if (global >= grid.total_nodes()) throw std::logic_error("axis_indices: global index out of range");
  std::vector<std::size_t> idx(grid.dim());
  for (std::size_t a = 0; a < grid.dim(); ++a) {
    const std::size_t n = grid.axis(a).n_node();
    idx[a] = global % n;
    global /= n;
  }
  return idx;
}

}  // namespace ctd
