#pragma once

// Galerkin integral of the frozen nonlinearity against the tensor-product
// basis: C[i, j(, k)] = integral of N_i(x) N_j(y) (N_k(z)) L w(u) over the
// domain. Stored as a nodal-sized array, x fastest. In 2D this is the
// n_x by n_y coupling matrix used by the separated solver and also the load
// vector of the full-order step.

#include <cstddef>
#include <string>

#include "ctd/cfe_basis.hpp"
#include "ctd/field.hpp"

namespace ctd {

enum class CouplingStrategy { full, separated, reduced };
/// Where w is evaluated: at nodes and then interpolated, or at quadrature
/// points from the interpolated u.
enum class WEvaluation { nodal, quadrature };

struct CouplingOptions {
  CouplingStrategy strategy = CouplingStrategy::reduced;
  double svd_tol = 1e-8;
  double reduced_rel_threshold = 1e-12;
  WEvaluation w_eval = WEvaluation::nodal;
};

std::string to_string(CouplingStrategy s);
CouplingStrategy parse_coupling_strategy(const std::string& name);

struct CouplingMatrix {
  FullField values;
  CouplingStrategy provenance = CouplingStrategy::full;
  std::size_t rank = 0;            // separated: number of terms
  double threshold = 0.0;          // reduced: absolute exclusion threshold
  std::size_t elements_visited = 0;
};

/// w(u) evaluated node by node.
FullField nodal_nonlinearity(const FullField& u, double a0);

CouplingMatrix assemble_coupling_full(const BasisSet& bases, const FullField& w_nodal, double mobility);

/// Skips every element whose |w| at all quadrature points is <= threshold.
CouplingMatrix assemble_coupling_reduced(const BasisSet& bases, const FullField& w_nodal, double mobility,
                                         double threshold);

/// Truncated SVD of a nodal scalar field, keeping the fewest terms whose
/// discarded Frobenius mass is <= tol * ||w||_F. 3D fields go through two
/// sequential SVDs (x against (y, z), then y against z) with tol / sqrt(2)
/// per stage.
SeparatedScalarField decompose_scalar_field(const FullField& w_nodal, double tol);

CouplingMatrix assemble_coupling_separated(const BasisSet& bases, const SeparatedScalarField& sep, double mobility);

/// integral of N_i(x) f_h(x) dx for every node i, where f_h interpolates the
/// nodal vector f with the basis.
std::vector<double> load_vector_1d(const Basis1D& basis, std::span<const double> nodal);

/// Coupling for the state u according to the options.
CouplingMatrix assemble_coupling(const BasisSet& bases, const FullField& u, double mobility, double a0,
                                 const CouplingOptions& options);

}  // namespace ctd
