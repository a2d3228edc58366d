#include "ctd/operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ctd/errors.hpp"
#include "ctd/parallel.hpp"

namespace ctd {

Operator1D::Operator1D(std::size_t n, std::size_t half_bandwidth, OperatorKind kind)
    : n_(n), kd_(half_bandwidth), kind_(kind), band_(n * (half_bandwidth + 1), 0.0) {}

double Operator1D::entry(std::size_t i, std::size_t j) const {
  if (i < j) std::swap(i, j);
  const std::size_t d = i - j;
  if (d > kd_ || i >= n_) return 0.0;
  return band_[i * (kd_ + 1) + d];
}

void Operator1D::add_symmetric(std::size_t i, std::size_t j, double v) {
  if (i < j) std::swap(i, j);
  if (i >= n_ || i - j > kd_)
    throw std::logic_error("Operator1D: entry (" + std::to_string(i) + ", " + std::to_string(j) +
                           ") lies outside the declared band");
  band_[i * (kd_ + 1) + (i - j)] += v;
}

std::vector<double> Operator1D::diagonal() const {
  std::vector<double> d(n_);
  for (std::size_t i = 0; i < n_; ++i) d[i] = band_[i * (kd_ + 1)];
  return d;
}

double Operator1D::entry_sum() const {
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t d = 0; d <= std::min(kd_, i); ++d) s += (d == 0 ? 1.0 : 2.0) * band_[i * (kd_ + 1) + d];
  return s;
}

void Operator1D::multiply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != n_ || y.size() != n_) throw std::logic_error("Operator1D::multiply: size mismatch");
  std::fill(y.begin(), y.end(), 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    const double* row = &band_[i * (kd_ + 1)];
    double acc = row[0] * x[i];
    for (std::size_t d = 1; d <= std::min(kd_, i); ++d) {
      acc += row[d] * x[i - d];
      y[i - d] += row[d] * x[i];
    }
    y[i] += acc;
  }
}

std::vector<double> Operator1D::multiply(std::span<const double> x) const {
  std::vector<double> y(n_);
  multiply(x, y);
  return y;
}

double Operator1D::bilinear(std::span<const double> x, std::span<const double> y) const {
  if (x.size() != n_ || y.size() != n_) throw std::logic_error("Operator1D::bilinear: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    const double* row = &band_[i * (kd_ + 1)];
    double acc = row[0] * y[i];
    for (std::size_t d = 1; d <= std::min(kd_, i); ++d) acc += row[d] * y[i - d];
    s += x[i] * acc;
    for (std::size_t d = 1; d <= std::min(kd_, i); ++d) s += x[i - d] * row[d] * y[i];
  }
  return s;
}

Operator1D combine(double a, const Operator1D& A, double b, const Operator1D& B) {
  if (A.size() != B.size()) throw std::logic_error("combine: operator sizes differ");
  Operator1D C(A.size(), std::max(A.half_bandwidth(), B.half_bandwidth()), OperatorKind::combined);
  const std::size_t w = C.kd_ + 1;
  for (std::size_t i = 0; i < C.n_; ++i) {
    for (std::size_t d = 0; d <= A.kd_; ++d) C.band_[i * w + d] += a * A.band_[i * (A.kd_ + 1) + d];
    for (std::size_t d = 0; d <= B.kd_; ++d) C.band_[i * w + d] += b * B.band_[i * (B.kd_ + 1) + d];
  }
  return C;
}

BandedCholesky::BandedCholesky(const Operator1D& A)
    : n_(A.size()), kd_(A.half_bandwidth()), factor_(A.band().begin(), A.band().end()) {
  const std::size_t w = kd_ + 1;
  auto L = [&](std::size_t i, std::size_t j) -> double& { return factor_[i * w + (i - j)]; };
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t lo = i > kd_ ? i - kd_ : 0;
    for (std::size_t j = lo; j <= i; ++j) {
      double s = L(i, j);
      const std::size_t klo = std::max(lo, j > kd_ ? j - kd_ : 0);
      for (std::size_t k = klo; k < j; ++k) s -= L(i, k) * L(j, k);
      if (j == i) {
        if (!(s > 0.0) || !std::isfinite(s))
          throw SolverError("banded Cholesky: matrix is not positive definite at row " + std::to_string(i));
        L(i, i) = std::sqrt(s);
      } else {
        L(i, j) = s / L(j, j);
      }
    }
  }
}

void BandedCholesky::solve_in_place(std::span<double> b) const {
  if (b.size() != n_) throw std::logic_error("BandedCholesky::solve: size mismatch");
  const std::size_t w = kd_ + 1;
  for (std::size_t i = 0; i < n_; ++i) {
    const double* row = &factor_[i * w];
    double s = b[i];
    for (std::size_t d = 1; d <= std::min(kd_, i); ++d) s -= row[d] * b[i - d];
    b[i] = s / row[0];
  }
  for (std::size_t i = n_; i-- > 0;) {
    const double* row = &factor_[i * w];
    b[i] /= row[0];
    for (std::size_t d = 1; d <= std::min(kd_, i); ++d) b[i - d] -= row[d] * b[i];
  }
}

namespace {

Operator1D assemble(const Basis1D& basis, OperatorKind kind) {
  Operator1D op(basis.n_node(), basis.half_bandwidth(), kind);
  const auto w = basis.quad_weights();
  const std::size_t nq = basis.n_quad();
  for (std::size_t e = 0; e < basis.n_elem(); ++e) {
    const ElementTable& t = basis.element(e);
    const std::vector<double>& tab = kind == OperatorKind::mass ? t.N : t.dN;
    for (std::size_t a = 0; a < t.count; ++a) {
      for (std::size_t b = 0; b <= a; ++b) {
        double s = 0.0;
        for (std::size_t g = 0; g < nq; ++g) s += w[g] * tab[g * t.count + a] * tab[g * t.count + b];
        op.add_symmetric(t.first + a, t.first + b, s);
      }
    }
  }
  return op;
}

}  // namespace

Operator1D assemble_mass(const Basis1D& basis) { return assemble(basis, OperatorKind::mass); }
Operator1D assemble_stiffness(const Basis1D& basis) { return assemble(basis, OperatorKind::stiffness); }

std::vector<AxisOperators> assemble_axis_operators(const BasisSet& bases) {
  std::vector<AxisOperators> ops;
  ops.reserve(bases.size());
  for (const auto& b : bases) ops.push_back({assemble_mass(b), assemble_stiffness(b)});
  return ops;
}

void apply_along_axis(const Operator1D& A, std::span<const std::size_t> dims, std::size_t axis,
                      std::span<const double> in, std::span<double> out) {
  std::size_t stride = 1, outer = 1;
  for (std::size_t k = 0; k < axis; ++k) stride *= dims[k];
  for (std::size_t k = axis + 1; k < dims.size(); ++k) outer *= dims[k];
  const std::size_t n = dims[axis];
  if (n != A.size()) throw std::logic_error("apply_along_axis: operator size does not match axis");
  if (in.size() != stride * n * outer || out.size() != in.size())
    throw std::logic_error("apply_along_axis: buffer size mismatch");
  const std::size_t kd = A.half_bandwidth();
  const auto band = A.band();

  auto run_block = [&](std::size_t o) {
    const double* src = in.data() + o * n * stride;
    double* dst = out.data() + o * n * stride;
    if (stride == 1) {
      std::fill(dst, dst + n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const double* row = &band[i * (kd + 1)];
        double acc = row[0] * src[i];
        for (std::size_t d = 1; d <= std::min(kd, i); ++d) {
          acc += row[d] * src[i - d];
          dst[i - d] += row[d] * src[i];
        }
        dst[i] += acc;
      }
      return;
    }
    std::fill(dst, dst + n * stride, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double* yi = dst + i * stride;
      const double* row = &band[i * (kd + 1)];
      for (std::size_t d = 0; d <= std::min(kd, i); ++d) {
        const double c = row[d];
        const double* xj = src + (i - d) * stride;
        for (std::size_t t = 0; t < stride; ++t) yi[t] += c * xj[t];
        if (d > 0) {
          double* yj = dst + (i - d) * stride;
          const double* xi = src + i * stride;
          for (std::size_t t = 0; t < stride; ++t) yj[t] += c * xi[t];
        }
      }
    }
  };

  parallel_for(outer, thread_count(), [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t o = b; o < e; ++o) run_block(o);
  });
}

}  // namespace ctd
