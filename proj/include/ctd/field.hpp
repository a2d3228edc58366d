#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ctd/mesh.hpp"

namespace ctd {

/// Nodal values on a tensor-product grid, x fastest.
class FullField {
 public:
  explicit FullField(Grid grid, double fill = 0.0);
  FullField(Grid grid, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  double max_abs() const;
  double norm2() const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// One rank-one term: an outer product of one nodal vector per axis.
struct RankOne {
  std::vector<std::vector<double>> factors;

  /// max |outer product| = product of per-factor max-abs.
  double max_abs() const;
};

/// Canonical (sum of rank-one terms) representation on a grid.
/// M = 0 encodes the zero field.
class SeparatedField {
 public:
  explicit SeparatedField(Grid grid) : grid_(std::move(grid)) {}

  const Grid& grid() const { return grid_; }
  std::size_t dim() const { return grid_.dim(); }
  std::size_t mode_count() const { return modes_.size(); }
  const std::vector<RankOne>& modes() const { return modes_; }
  const RankOne& mode(std::size_t m) const { return modes_[m]; }

  /// Throws std::logic_error when a factor length does not match its axis.
  void add_mode(RankOne mode);
  void truncate(std::size_t count);

 private:
  Grid grid_;
  std::vector<RankOne> modes_;
};

/// A separated approximation of a nodal scalar field (used for w(u)).
using SeparatedScalarField = SeparatedField;

/// Sum of the rank-one terms as a nodal field.
FullField reconstruct(const SeparatedField& field);
/// Adds scale * (outer product of term) into values (x fastest).
void add_rank_one(const Grid& grid, const RankOne& term, double scale, std::span<double> values);

double relative_l2(std::span<const double> a, std::span<const double> reference);

}  // namespace ctd
