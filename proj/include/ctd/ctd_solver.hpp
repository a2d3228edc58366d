#pragma once

// Greedy separated solver for one stabilized semi-implicit step.
//
// Each step solves K u = Q in the space of sums of rank-one tensors. Modes
// are added one at a time; each mode is found by alternating directions:
// with all but one axis vector fixed, the Galerkin projection of K u = Q
// onto that axis is a banded system
//
//     (alpha_a M_a + beta_a S_a) u_a = Q_a
//
// whose scalar coefficients come from contracting the fixed vectors with
// their axis operators. The right-hand side contracts the fixed vectors with
// the step residual: the source c M u^k - C (C the coupling of L w(u^k))
// minus the action of K on the modes already accepted this step.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ctd/coupling.hpp"
#include "ctd/fe_reference.hpp"
#include "ctd/field.hpp"
#include "ctd/free_energy.hpp"
#include "ctd/operators.hpp"

namespace ctd {

enum class ModeInit { ones, random };

struct FixedPointConfig {
  double eps1 = 1e-2;          // mode stagnation, relative max-norm
  double eps2 = 1e-4;          // enrichment stop, relative max-norm
  std::size_t max_sweeps = 20;
  std::size_t max_modes = 1000;
  /// Adaptive cap: a step that needs more modes falls back to the
  /// full-order solver. The maximum value disables the fallback.
  std::size_t mode_cap = std::numeric_limits<std::size_t>::max();
  ModeInit init = ModeInit::ones;
  std::uint64_t init_seed = 1;
  /// Recompress each step's modes by SVD at eps2 / 10 before storing.
  bool recompress = false;
};

void validate(const FixedPointConfig& config);

/// Operators and coefficients shared by every step of a run.
struct CtdContext {
  Grid grid;
  const BasisSet* bases = nullptr;
  std::vector<AxisOperators> ops;
  PhysParams params;
  double mass_coef = 0.0;       // 1/dt + alpha L
  double stiffness_coef = 0.0;  // L kappa
};

CtdContext make_ctd_context(const Grid& grid, const BasisSet& bases, const PhysParams& params);

/// c (M_x (x) M_y (x) M_z) u_prev - coupling: the projection of the step's
/// right-hand side onto the full tensor basis.
FullField step_source(const CtdContext& ctx, const FullField& u_prev, const CouplingMatrix& coupling);

/// Residual of the step in the full tensor basis, R = source - K U, where
/// U is the sum of the modes accepted so far. Accepting a mode subtracts its
/// image under K, which is a sum of d rank-one tensors.
class StepResidual {
 public:
  StepResidual(const CtdContext& ctx, FullField source);

  void accept(const CtdContext& ctx, RankOne mode);
  std::size_t size() const { return modes_.mode_count(); }
  const SeparatedField& modes() const { return modes_; }
  const FullField& values() const { return residual_; }

 private:
  SeparatedField modes_;
  FullField residual_;
};

struct AxisSystem {
  double mass_weight = 0.0;       // alpha_a
  double stiffness_weight = 0.0;  // beta_a
  Operator1D matrix;
  std::vector<double> rhs;
};

/// Projected system for `axis` with the other axes' vectors taken from
/// `fixed` (fixed[axis] is ignored). Throws DegenerateModeError when a
/// fixed vector makes the projection singular or non-finite.
AxisSystem assemble_axis_system(const CtdContext& ctx, std::size_t axis, const std::vector<std::vector<double>>& fixed,
                                const StepResidual& residual);

std::vector<double> solve_axis(const CtdContext& ctx, std::size_t axis, const std::vector<std::vector<double>>& fixed,
                               const StepResidual& residual);

struct ModeResult {
  RankOne mode;
  std::size_t sweeps = 0;
  bool converged = false;
  bool zero = false;
};

ModeResult fixed_point_mode(const CtdContext& ctx, const StepResidual& residual, const FixedPointConfig& config,
                            std::size_t mode_index = 0);

struct EnrichResult {
  SeparatedField field;
  FullField dense;
  bool tolerance_met = false;
  std::vector<double> increment_max;  // max |mode| per accepted mode
  std::size_t total_sweeps = 0;
  std::size_t unconverged_modes = 0;
};

/// Adds modes until the newest one is below eps2 relative to the
/// accumulated field (floor 1) or `mode_limit` modes exist.
EnrichResult enrich_step(const CtdContext& ctx, const FullField& source, const FixedPointConfig& config,
                         std::size_t mode_limit);

struct StepResult {
  FullField dense;
  std::optional<SeparatedField> modes;  // empty for a full-order step
  std::string method;                   // "ctd" or "cfe"
  std::size_t mode_count = 0;
  bool fell_back = false;
  bool tolerance_met = true;
  double assembly_ms = 0.0;
  double solve_ms = 0.0;
};

/// One step of the adaptive hybrid: the separated solver, or the
/// full-order solver when more than config.mode_cap modes would be needed.
StepResult step_actd(const CtdContext& ctx, const FullSystem& fallback, const FullField& u_prev,
                     const FixedPointConfig& config, const CouplingOptions& coupling, const PcgOptions& pcg = {});

/// Separated approximation of a nodal field with Frobenius error <= tol ||field||.
SeparatedField compress_full_to_separated(const FullField& field, double tol);

}  // namespace ctd
