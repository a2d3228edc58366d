#pragma once

#include <cstddef>
#include <vector>

#include "ctd/coupling.hpp"
#include "ctd/field.hpp"
#include "ctd/free_energy.hpp"
#include "ctd/operators.hpp"

namespace ctd {

/// Matrix-free context for K = c M + L kappa S on a tensor-product grid,
/// where c = 1/dt + alpha L and M, S are Kronecker compositions of the
/// per-axis mass and stiffness operators.
struct FullSystem {
  Grid grid;
  const BasisSet* bases = nullptr;
  std::vector<AxisOperators> ops;
  PhysParams params;
  double mass_coef = 0.0;       // 1/dt + alpha L
  double stiffness_coef = 0.0;  // L kappa
  std::vector<Operator1D> axis_combined;  // mass_coef M_a + stiffness_coef S_a
  std::vector<double> diagonal;
};

FullSystem make_full_system(const Grid& grid, const BasisSet& bases, const PhysParams& params);

FullField apply_K(const FullSystem& sys, const FullField& v);

/// Scratch buffers for repeated operator applications on one grid.
struct ApplyWorkspace {
  std::vector<double> a, b, c;
};

/// out = K v without allocating once the workspace has been sized.
void apply_K(const FullSystem& sys, std::span<const double> v, std::span<double> out, ApplyWorkspace& work);
/// (M_x (x) M_y (x) M_z) v.
FullField apply_mass(const FullSystem& sys, const FullField& v);

/// c M u_prev - (load of L w(u_prev)).
FullField build_rhs(const FullSystem& sys, const FullField& u_prev, const CouplingOptions& coupling);
FullField build_rhs(const FullSystem& sys, const FullField& u_prev, const CouplingMatrix& coupling);

struct PcgResult {
  FullField solution;
  std::size_t iterations = 0;
  double relative_residual = 0.0;
};

struct PcgOptions {
  double tol = 1e-5;
  std::size_t max_iter = 0;  // 0 selects 10 sqrt(N)
};

/// Jacobi-preconditioned CG from a zero initial guess. Throws
/// ConvergenceError when max_iter is exhausted.
PcgResult pcg_solve(const FullSystem& sys, const FullField& rhs, const PcgOptions& options = {});

struct FullStepStats {
  std::size_t iterations = 0;
  double relative_residual = 0.0;
  double assembly_ms = 0.0;
  double solve_ms = 0.0;
};

FullField step_full(const FullSystem& sys, const FullField& state, const CouplingOptions& coupling,
                    const PcgOptions& pcg = {}, FullStepStats* stats = nullptr);

}  // namespace ctd
