#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ctd/cfe_basis.hpp"

namespace ctd {

enum class OperatorKind { mass, stiffness, combined };

/// Symmetric banded matrix. Only the lower band is stored:
/// band()[i * (half_bandwidth() + 1) + d] = A(i, i - d).
class Operator1D {
 public:
  Operator1D() = default;
  Operator1D(std::size_t n, std::size_t half_bandwidth, OperatorKind kind);

  std::size_t size() const { return n_; }
  std::size_t half_bandwidth() const { return kd_; }
  OperatorKind kind() const { return kind_; }

  /// A(i, j) for any i, j (zero outside the band).
  double entry(std::size_t i, std::size_t j) const;
  /// Adds v to A(i, j) and A(j, i). Throws std::logic_error outside the band.
  void add_symmetric(std::size_t i, std::size_t j, double v);

  std::span<const double> band() const { return band_; }
  std::vector<double> diagonal() const;
  double entry_sum() const;

  /// y = A x.
  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> multiply(std::span<const double> x) const;
  /// x^T A y.
  double bilinear(std::span<const double> x, std::span<const double> y) const;

 private:
  friend Operator1D combine(double, const Operator1D&, double, const Operator1D&);
  std::size_t n_ = 0;
  std::size_t kd_ = 0;
  OperatorKind kind_ = OperatorKind::mass;
  std::vector<double> band_;
};

/// a * A + b * B.
Operator1D combine(double a, const Operator1D& A, double b, const Operator1D& B);

/// Cholesky factor of a symmetric positive definite banded matrix.
class BandedCholesky {
 public:
  /// Throws SolverError if the matrix is not positive definite.
  explicit BandedCholesky(const Operator1D& A);

  std::size_t size() const { return n_; }
  /// Overwrites rhs with A^{-1} rhs.
  void solve_in_place(std::span<double> rhs) const;

 private:
  std::size_t n_;
  std::size_t kd_;
  std::vector<double> factor_;
};

Operator1D assemble_mass(const Basis1D& basis);
Operator1D assemble_stiffness(const Basis1D& basis);

struct AxisOperators {
  Operator1D mass;
  Operator1D stiffness;
};

std::vector<AxisOperators> assemble_axis_operators(const BasisSet& bases);

/// out = (I x ... x A x ... x I) in, with A acting along `axis` of a
/// tensor with extents `dims` (axis 0 fastest). out must not alias in.
void apply_along_axis(const Operator1D& A, std::span<const std::size_t> dims, std::size_t axis,
                      std::span<const double> in, std::span<double> out);

}  // namespace ctd
