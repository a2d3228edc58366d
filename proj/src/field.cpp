#include "ctd/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ctd {

FullField::FullField(Grid grid, double fill) : grid_(std::move(grid)), values_(grid_.total_nodes(), fill) {}

FullField::FullField(Grid grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.total_nodes()) {
    throw std::logic_error("FullField: " + std::to_string(values_.size()) + " values for a grid of " +
                           std::to_string(grid_.total_nodes()) + " nodes");
  }
}

double FullField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double FullField::norm2() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s);
}

double RankOne::max_abs() const {
  double m = 1.0;
  for (const auto& f : factors) {
    double fm = 0.0;
    for (double v : f) fm = std::max(fm, std::abs(v));
    m *= fm;
  }
  return factors.empty() ? 0.0 : m;
}

void SeparatedField::add_mode(RankOne mode) {
  if (mode.factors.size() != grid_.dim()) throw std::logic_error("SeparatedField: mode has wrong number of factors");
  for (std::size_t a = 0; a < grid_.dim(); ++a) {
    if (mode.factors[a].size() != grid_.axis(a).n_node()) {
      throw std::logic_error("SeparatedField: factor " + std::to_string(a) + " has length " +
                             std::to_string(mode.factors[a].size()) + ", axis has " +
                             std::to_string(grid_.axis(a).n_node()) + " nodes");
    }
  }
  modes_.push_back(std::move(mode));
}

void SeparatedField::truncate(std::size_t count) {
  if (count < modes_.size()) modes_.resize(count);
}

void add_rank_one(const Grid& grid, const RankOne& term, double scale, std::span<double> values) {
  const std::size_t nx = grid.axis(0).n_node();
  const std::size_t ny = grid.axis(1).n_node();
  const double* fx = term.factors[0].data();
  const double* fy = term.factors[1].data();
  if (grid.dim() == 2) {
    for (std::size_t j = 0; j < ny; ++j) {
      const double c = scale * fy[j];
      double* row = &values[j * nx];
      for (std::size_t i = 0; i < nx; ++i) row[i] += c * fx[i];
    }
    return;
  }
  const std::size_t nz = grid.axis(2).n_node();
  const double* fz = term.factors[2].data();
  for (std::size_t k = 0; k < nz; ++k) {
    for (std::size_t j = 0; j < ny; ++j) {
      const double c = scale * fy[j] * fz[k];
      double* row = &values[(k * ny + j) * nx];
      for (std::size_t i = 0; i < nx; ++i) row[i] += c * fx[i];
    }
  }
}

FullField reconstruct(const SeparatedField& field) {
  FullField out(field.grid());
  for (const auto& m : field.modes()) add_rank_one(field.grid(), m, 1.0, out.values());
  return out;
}

double relative_l2(std::span<const double> a, std::span<const double> reference) {
  if (a.size() != reference.size()) throw std::logic_error("relative_l2: size mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - reference[i]) * (a[i] - reference[i]);
    den += reference[i] * reference[i];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace ctd
