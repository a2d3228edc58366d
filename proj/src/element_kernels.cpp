#include "element_kernels.hpp"

#include <algorithm>

namespace ctd::detail {

namespace {

// Y = A x_axis X where A is (rows x dims[axis]) row-major, or its transpose
// when A is stored (dims[axis] x rows).
void mode_product(const double* X, const std::array<std::size_t, 3>& dims, std::size_t axis, const double* A,
                  std::size_t rows, bool transpose, double* Y) {
  std::size_t outer = 1, inner = 1;
  for (std::size_t k = 0; k < axis; ++k) outer *= dims[k];
  for (std::size_t k = axis + 1; k < 3; ++k) inner *= dims[k];
  const std::size_t cols = dims[axis];
  std::fill(Y, Y + outer * rows * inner, 0.0);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t r = 0; r < rows; ++r) {
      double* y = Y + (o * rows + r) * inner;
      for (std::size_t c = 0; c < cols; ++c) {
        const double coef = transpose ? A[c * rows + r] : A[r * cols + c];
        if (coef == 0.0) continue;
        const double* x = X + (o * cols + c) * inner;
        for (std::size_t i = 0; i < inner; ++i) y[i] += coef * x[i];
      }
    }
  }
}

}  // namespace

ElementKernel::ElementKernel(const BasisSet& bases) : dim_(bases.size()) {
  std::size_t max_local = 1;
  for (std::size_t a = 0; a < dim_; ++a) {
    bases_.push_back(&bases[a]);
    n_node_[a] = bases[a].n_node();
    nq_[a] = bases[a].n_quad();
    n_qp_ *= nq_[a];
    max_local *= std::max(bases[a].max_support(), bases[a].n_quad());
  }
  weights_.assign(n_qp_, 1.0);
  for (std::size_t q = 0; q < n_qp_; ++q) {
    std::size_t rem = q;
    double w = 1.0;
    for (std::size_t a = dim_; a-- > 0;) {
      w *= bases[a].quad_weights()[rem % nq_[a]];
      rem /= nq_[a];
    }
    weights_[q] = w;
  }
  local_.resize(max_local);
  buf_a_.resize(max_local);
  buf_b_.resize(max_local);
}

void ElementKernel::gather(std::span<const double> field, const std::array<std::size_t, 3>& e) {
  const ElementTable& tx = bases_[0]->element(e[0]);
  const ElementTable& ty = bases_[1]->element(e[1]);
  const std::size_t nx = n_node_[0], ny = n_node_[1];
  if (dim_ == 2) {
    for (std::size_t a = 0; a < tx.count; ++a)
      for (std::size_t b = 0; b < ty.count; ++b) local_[a * ty.count + b] = field[(ty.first + b) * nx + tx.first + a];
    return;
  }
  const ElementTable& tz = bases_[2]->element(e[2]);
  for (std::size_t a = 0; a < tx.count; ++a)
    for (std::size_t b = 0; b < ty.count; ++b)
      for (std::size_t c = 0; c < tz.count; ++c)
        local_[(a * ty.count + b) * tz.count + c] = field[((tz.first + c) * ny + ty.first + b) * nx + tx.first + a];
}

void ElementKernel::interpolate(const std::array<std::size_t, 3>& e, int deriv_axis, std::span<double> qvals) {
  std::array<std::size_t, 3> dims{1, 1, 1};
  for (std::size_t a = 0; a < dim_; ++a) dims[a] = bases_[a]->element(e[a]).count;
  const double* src = local_.data();
  double* bufs[2] = {buf_a_.data(), buf_b_.data()};
  for (std::size_t a = 0; a < dim_; ++a) {
    const ElementTable& t = bases_[a]->element(e[a]);
    const double* table = (static_cast<int>(a) == deriv_axis) ? t.dN.data() : t.N.data();
    double* dst = (a + 1 == dim_) ? qvals.data() : bufs[a % 2];
    mode_product(src, dims, a, table, nq_[a], false, dst);
    dims[a] = nq_[a];
    src = dst;
  }
}

void ElementKernel::integrate_add(std::span<const double> qvals, const std::array<std::size_t, 3>& e,
                                  std::span<double> out) {
  std::array<std::size_t, 3> dims{1, 1, 1};
  for (std::size_t a = 0; a < dim_; ++a) dims[a] = nq_[a];
  const double* src = qvals.data();
  double* bufs[2] = {buf_a_.data(), buf_b_.data()};
  for (std::size_t a = 0; a < dim_; ++a) {
    const ElementTable& t = bases_[a]->element(e[a]);
    double* dst = (a + 1 == dim_) ? local_.data() : bufs[a % 2];
    mode_product(src, dims, a, t.N.data(), t.count, true, dst);
    dims[a] = t.count;
    src = dst;
  }
  const ElementTable& tx = bases_[0]->element(e[0]);
  const ElementTable& ty = bases_[1]->element(e[1]);
  const std::size_t nx = n_node_[0], ny = n_node_[1];
  if (dim_ == 2) {
    for (std::size_t a = 0; a < tx.count; ++a)
      for (std::size_t b = 0; b < ty.count; ++b) out[(ty.first + b) * nx + tx.first + a] += local_[a * ty.count + b];
    return;
  }
  const ElementTable& tz = bases_[2]->element(e[2]);
  for (std::size_t a = 0; a < tx.count; ++a)
    for (std::size_t b = 0; b < ty.count; ++b)
      for (std::size_t c = 0; c < tz.count; ++c)
        out[((tz.first + c) * ny + ty.first + b) * nx + tx.first + a] += local_[(a * ty.count + b) * tz.count + c];
}

}  // namespace ctd::detail
