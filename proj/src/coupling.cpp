#include "ctd/coupling.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "ctd/errors.hpp"
#include "ctd/free_energy.hpp"
#include "ctd/parallel.hpp"
#include "element_kernels.hpp"

namespace ctd {

std::string to_string(CouplingStrategy s) {
  switch (s) {
    case CouplingStrategy::full: return "full";
    case CouplingStrategy::separated: return "separated";
    case CouplingStrategy::reduced: return "reduced";
  }
  return "unknown";
}

CouplingStrategy parse_coupling_strategy(const std::string& name) {
  if (name == "full") return CouplingStrategy::full;
  if (name == "separated") return CouplingStrategy::separated;
  if (name == "reduced") return CouplingStrategy::reduced;
  throw ConfigError("coupling.strategy: unknown strategy '" + name + "'");
}

FullField nodal_nonlinearity(const FullField& u, double a0) {
  FullField w(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) w[i] = double_well_derivative(u[i], a0);
  return w;
}

namespace {

void check_bases(const BasisSet& bases, const Grid& grid) {
  if (bases.size() != grid.dim()) throw std::logic_error("coupling: basis count does not match grid dimension");
  for (std::size_t a = 0; a < grid.dim(); ++a)
    if (bases[a].n_node() != grid.axis(a).n_node()) throw std::logic_error("coupling: basis does not match grid axis");
}

// Integrates L * transform(interpolated source) over every element whose
// transformed quadrature values exceed the threshold in magnitude.
CouplingMatrix element_loop(const BasisSet& bases, const FullField& source, double mobility,
                            const std::function<double(double)>& transform, bool use_threshold, double threshold) {
  const Grid& grid = source.grid();
  check_bases(bases, grid);
  const std::size_t dim = grid.dim();
  const std::size_t slow = dim - 1;
  const std::size_t n_slow = bases[slow].n_elem();
  const std::size_t workers = std::max<std::size_t>(1, std::min(thread_count(), n_slow));
  std::vector<std::vector<double>> partial(workers);
  std::vector<std::size_t> visited(workers, 0);

  parallel_for(n_slow, workers, [&](std::size_t begin, std::size_t end, std::size_t worker) {
    detail::ElementKernel kernel(bases);
    const std::size_t nq = kernel.n_qp();
    const auto weights = kernel.weights();
    std::vector<double> q(nq);
    std::vector<double>& out = partial[worker];
    out.assign(grid.total_nodes(), 0.0);
    const std::size_t ny = dim == 3 ? bases[1].n_elem() : 1;
    for (std::size_t es = begin; es < end; ++es) {
      for (std::size_t ey = 0; ey < ny; ++ey) {
        for (std::size_t ex = 0; ex < bases[0].n_elem(); ++ex) {
          std::array<std::size_t, 3> e{ex, dim == 3 ? ey : es, dim == 3 ? es : 0};
          kernel.gather(source.values(), e);
          kernel.interpolate(e, -1, q);
          double peak = 0.0;
          for (std::size_t g = 0; g < nq; ++g) {
            q[g] = transform(q[g]);
            peak = std::max(peak, std::abs(q[g]));
          }
          if (use_threshold && peak <= threshold) continue;
          for (std::size_t g = 0; g < nq; ++g) q[g] *= mobility * weights[g];
          kernel.integrate_add(q, e, out);
          ++visited[worker];
        }
      }
    }
  });

  CouplingMatrix result{FullField(grid), CouplingStrategy::full, 0, 0.0, 0};
  auto values = result.values.values();
  for (std::size_t w = 0; w < workers; ++w) {
    if (partial[w].empty()) continue;
    for (std::size_t i = 0; i < values.size(); ++i) values[i] += partial[w][i];
    result.elements_visited += visited[w];
  }
  return result;
}

double identity(double v) { return v; }

struct TruncatedSvd {
  Eigen::MatrixXd left;   // columns scaled by singular values
  Eigen::MatrixXd right;  // orthonormal columns
};

TruncatedSvd truncated_svd(const Eigen::MatrixXd& A, double tol) {
  const double total = A.squaredNorm();
  if (total == 0.0) return {Eigen::MatrixXd(A.rows(), 0), Eigen::MatrixXd(A.cols(), 0)};
  Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sigma = svd.singularValues();
  const double budget = tol * tol * total;
  Eigen::Index rank = sigma.size();
  double tail = 0.0;
  while (rank > 0 && tail + sigma[rank - 1] * sigma[rank - 1] <= budget) {
    tail += sigma[rank - 1] * sigma[rank - 1];
    --rank;
  }
  TruncatedSvd out;
  out.left = svd.matrixU().leftCols(rank) * sigma.head(rank).asDiagonal();
  out.right = svd.matrixV().leftCols(rank);
  return out;
}

std::vector<double> column(const Eigen::MatrixXd& M, Eigen::Index c) {
  return std::vector<double>(M.col(c).data(), M.col(c).data() + M.rows());
}

}  // namespace

CouplingMatrix assemble_coupling_full(const BasisSet& bases, const FullField& w_nodal, double mobility) {
  return element_loop(bases, w_nodal, mobility, identity, false, 0.0);
}

CouplingMatrix assemble_coupling_reduced(const BasisSet& bases, const FullField& w_nodal, double mobility,
                                         double threshold) {
  if (threshold < 0.0) throw ConfigError("coupling: reduced-domain threshold must be non-negative");
  auto result = element_loop(bases, w_nodal, mobility, identity, true, threshold);
  result.provenance = CouplingStrategy::reduced;
  result.threshold = threshold;
  return result;
}

SeparatedScalarField decompose_scalar_field(const FullField& w_nodal, double tol) {
  const Grid& grid = w_nodal.grid();
  SeparatedScalarField sep(grid);
  const auto counts = grid.node_counts();
  const Eigen::Index nx = static_cast<Eigen::Index>(counts[0]);
  const Eigen::Index rest = static_cast<Eigen::Index>(w_nodal.size() / counts[0]);
  Eigen::Map<const Eigen::MatrixXd> unfolded(w_nodal.values().data(), nx, rest);

  if (grid.dim() == 2) {
    const auto svd = truncated_svd(unfolded, tol);
    for (Eigen::Index q = 0; q < svd.left.cols(); ++q)
      sep.add_mode(RankOne{{column(svd.left, q), column(svd.right, q)}});
    return sep;
  }

  const double stage_tol = tol / std::sqrt(2.0);
  const auto outer = truncated_svd(unfolded, stage_tol);
  const Eigen::Index ny = static_cast<Eigen::Index>(counts[1]);
  const Eigen::Index nz = static_cast<Eigen::Index>(counts[2]);
  for (Eigen::Index q = 0; q < outer.left.cols(); ++q) {
    Eigen::Map<const Eigen::MatrixXd> slab(outer.right.col(q).data(), ny, nz);
    const auto inner = truncated_svd(slab, stage_tol);
    for (Eigen::Index r = 0; r < inner.left.cols(); ++r)
      sep.add_mode(RankOne{{column(outer.left, q), column(inner.left, r), column(inner.right, r)}});
  }
  return sep;
}

std::vector<double> load_vector_1d(const Basis1D& basis, std::span<const double> nodal) {
  if (nodal.size() != basis.n_node()) throw std::logic_error("load_vector_1d: size mismatch");
  std::vector<double> out(basis.n_node(), 0.0);
  const auto w = basis.quad_weights();
  for (std::size_t e = 0; e < basis.n_elem(); ++e) {
    const ElementTable& t = basis.element(e);
    for (std::size_t g = 0; g < basis.n_quad(); ++g) {
      double f = 0.0;
      for (std::size_t k = 0; k < t.count; ++k) f += t.N[g * t.count + k] * nodal[t.first + k];
      for (std::size_t k = 0; k < t.count; ++k) out[t.first + k] += w[g] * t.N[g * t.count + k] * f;
    }
  }
  return out;
}

CouplingMatrix assemble_coupling_separated(const BasisSet& bases, const SeparatedScalarField& sep, double mobility) {
  check_bases(bases, sep.grid());
  CouplingMatrix result{FullField(sep.grid()), CouplingStrategy::separated, sep.mode_count(), 0.0, 0};
  for (const RankOne& term : sep.modes()) {
    RankOne integrated;
    for (std::size_t a = 0; a < sep.dim(); ++a) integrated.factors.push_back(load_vector_1d(bases[a], term.factors[a]));
    add_rank_one(sep.grid(), integrated, mobility, result.values.values());
  }
  return result;
}

CouplingMatrix assemble_coupling(const BasisSet& bases, const FullField& u, double mobility, double a0,
                                 const CouplingOptions& options) {
  if (options.w_eval == WEvaluation::quadrature) {
    if (options.strategy == CouplingStrategy::separated)
      throw ConfigError("coupling: the separated strategy requires nodal evaluation of w");
    auto w_of_u = [a0](double v) { return double_well_derivative(v, a0); };
    if (options.strategy == CouplingStrategy::full) return element_loop(bases, u, mobility, w_of_u, false, 0.0);
    double peak = 0.0;
    for (double v : u.values()) peak = std::max(peak, std::abs(double_well_derivative(v, a0)));
    const double threshold = options.reduced_rel_threshold * peak;
    auto result = element_loop(bases, u, mobility, w_of_u, true, threshold);
    result.provenance = CouplingStrategy::reduced;
    result.threshold = threshold;
    return result;
  }

  const FullField w = nodal_nonlinearity(u, a0);
  switch (options.strategy) {
    case CouplingStrategy::full:
      return assemble_coupling_full(bases, w, mobility);
    case CouplingStrategy::separated:
      return assemble_coupling_separated(bases, decompose_scalar_field(w, options.svd_tol), mobility);
    case CouplingStrategy::reduced:
      return assemble_coupling_reduced(bases, w, mobility, options.reduced_rel_threshold * w.max_abs());
  }
  throw std::logic_error("coupling: unhandled strategy");
}

}  // namespace ctd
