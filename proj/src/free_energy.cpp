#include "ctd/free_energy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ctd/errors.hpp"
#include "ctd/parallel.hpp"
#include "element_kernels.hpp"

namespace ctd {

void validate(const PhysParams& params) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string("physics.") + name + " must be positive");
  };
  positive(params.mobility, "L");
  positive(params.kappa, "kappa");
  positive(params.a0, "a0");
  positive(params.dt, "dt");
  positive(params.final_time, "T");
  if (!(params.alpha >= 0.0) || !std::isfinite(params.alpha)) throw ConfigError("physics.alpha must be non-negative");
}

double min_alpha(double a0, double u_lo, double u_hi) {
  const double edge = std::max(double_well_curvature(u_lo, a0), double_well_curvature(u_hi, a0));
  double peak = edge;
  if (u_lo <= 0.0 && u_hi >= 0.0) peak = std::max(peak, double_well_curvature(0.0, a0));
  return std::max(0.0, peak / 2.0);
}

namespace {

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

}  // namespace

double total_energy(const FullField& field, const BasisSet& bases, double kappa, double a0) {
  const Grid& grid = field.grid();
  if (bases.size() != grid.dim()) throw std::logic_error("total_energy: basis count does not match grid dimension");
  for (std::size_t a = 0; a < grid.dim(); ++a)
    if (bases[a].n_node() != grid.axis(a).n_node())
      throw std::logic_error("total_energy: basis does not match grid axis");

  const std::size_t dim = grid.dim();
  const std::size_t slow = dim - 1;
  const std::size_t n_slow = bases[slow].n_elem();
  std::vector<double> per_slab(n_slow, 0.0);

  parallel_for(n_slow, thread_count(), [&](std::size_t begin, std::size_t end, std::size_t) {
    detail::ElementKernel kernel(bases);
    const std::size_t nq = kernel.n_qp();
    std::vector<double> u(nq), grad(nq), acc(nq);
    const auto weights = kernel.weights();
    const std::size_t ny = dim == 3 ? bases[1].n_elem() : 1;
    for (std::size_t es = begin; es < end; ++es) {
      std::vector<double> slab_terms;
      for (std::size_t ey = 0; ey < ny; ++ey) {
        for (std::size_t ex = 0; ex < bases[0].n_elem(); ++ex) {
          std::array<std::size_t, 3> e{ex, dim == 3 ? ey : es, dim == 3 ? es : 0};
          kernel.gather(field.values(), e);
          kernel.interpolate(e, -1, u);
          for (std::size_t q = 0; q < nq; ++q) acc[q] = double_well(u[q], a0);
          for (std::size_t a = 0; a < dim; ++a) {
            kernel.interpolate(e, static_cast<int>(a), grad);
            for (std::size_t q = 0; q < nq; ++q) acc[q] += 0.5 * kappa * grad[q] * grad[q];
          }
          double elem = 0.0;
          for (std::size_t q = 0; q < nq; ++q) elem += weights[q] * acc[q];
          slab_terms.push_back(elem);
        }
      }
      per_slab[es] = pairwise_sum(slab_terms);
    }
  });
  return pairwise_sum(per_slab);
}

}  // namespace ctd
