#include "ctd/ctd_solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "ctd/errors.hpp"
#include "ctd/random.hpp"

namespace ctd {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

using ConstVec = Eigen::Map<const Eigen::VectorXd>;
using ConstMat = Eigen::Map<const Eigen::MatrixXd>;

ConstVec as_vec(std::span<const double> v) { return ConstVec(v.data(), static_cast<Eigen::Index>(v.size())); }

// Contracts the source tensor with the given vectors on every axis except `axis`.
std::vector<double> contract_except(const FullField& source, const std::vector<std::vector<double>>& vecs,
                                    std::size_t axis) {
  const auto dims = source.grid().node_counts();
  const auto nx = static_cast<Eigen::Index>(dims[0]);
  const auto rest = static_cast<Eigen::Index>(source.size() / dims[0]);
  ConstMat S(source.values().data(), nx, rest);
  std::vector<double> r(dims[axis]);
  Eigen::Map<Eigen::VectorXd> out(r.data(), static_cast<Eigen::Index>(r.size()));
  if (dims.size() == 2) {
    if (axis == 0)
      out.noalias() = S * as_vec(vecs[1]);
    else
      out.noalias() = S.transpose() * as_vec(vecs[0]);
    return r;
  }
  const auto ny = static_cast<Eigen::Index>(dims[1]);
  const auto nz = static_cast<Eigen::Index>(dims[2]);
  if (axis == 0) {
    Eigen::VectorXd yz(ny * nz);
    for (Eigen::Index k = 0; k < nz; ++k) yz.segment(k * ny, ny) = as_vec(vecs[1]) * vecs[2][k];
    out.noalias() = S * yz;
    return r;
  }
  const Eigen::VectorXd t = S.transpose() * as_vec(vecs[0]);
  Eigen::Map<const Eigen::MatrixXd> T(t.data(), ny, nz);
  if (axis == 1)
    out.noalias() = T * as_vec(vecs[2]);
  else
    out.noalias() = T.transpose() * as_vec(vecs[1]);
  return r;
}

// Whether |prod_b a_b[i_b] - prod_b c_b[i_b]| <= bound at every grid index.
// Stops at the first line that exceeds the bound.
bool rank_one_change_within(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& c,
                            double bound) {
  const std::size_t ny = a[1].size(), nz = a.size() == 3 ? a[2].size() : 1;
  const ConstVec a0 = as_vec(a[0]), c0 = as_vec(c[0]);
  for (std::size_t k = 0; k < nz; ++k) {
    const double az = a.size() == 3 ? a[2][k] : 1.0;
    const double cz = a.size() == 3 ? c[2][k] : 1.0;
    for (std::size_t j = 0; j < ny; ++j)
      if ((a0 * (a[1][j] * az) - c0 * (c[1][j] * cz)).cwiseAbs().maxCoeff() > bound) return false;
  }
  return true;
}

double rank_one_max(const std::vector<std::vector<double>>& v) {
  double p = 1.0;
  for (const auto& f : v) p *= max_abs(f);
  return p;
}

// Rescales so every factor has norm (product of norms)^(1/d). Returns false
// if the product vanishes.
bool balance(std::vector<std::vector<double>>& vecs) {
  std::vector<double> norms;
  double product = 1.0;
  for (const auto& v : vecs) {
    norms.push_back(std::sqrt(dot(v, v)));
    product *= norms.back();
  }
  if (!(product > 0.0)) return false;
  const double target = std::pow(product, 1.0 / static_cast<double>(vecs.size()));
  for (std::size_t a = 0; a < vecs.size(); ++a)
    for (double& x : vecs[a]) x *= target / norms[a];
  return true;
}

}  // namespace

void validate(const FixedPointConfig& config) {
  if (!(config.eps2 > 0.0) || !(config.eps1 > config.eps2))
    throw ConfigError("solver: tolerances must satisfy 0 < eps2 < eps1");
  if (config.max_sweeps < 2) throw ConfigError("solver.max_sweeps must be at least 2");
  if (config.max_modes < 1) throw ConfigError("solver.max_modes must be at least 1");
}

CtdContext make_ctd_context(const Grid& grid, const BasisSet& bases, const PhysParams& params) {
  if (bases.size() != grid.dim()) throw std::logic_error("make_ctd_context: basis count does not match grid");
  CtdContext ctx{grid, &bases, assemble_axis_operators(bases), params, 0.0, 0.0};
  ctx.mass_coef = 1.0 / params.dt + params.alpha * params.mobility;
  ctx.stiffness_coef = params.mobility * params.kappa;
  return ctx;
}

FullField step_source(const CtdContext& ctx, const FullField& u_prev, const CouplingMatrix& coupling) {
  if (!ctx.grid.same_shape(u_prev.grid()) || !ctx.grid.same_shape(coupling.values.grid()))
    throw std::logic_error("step_source: field does not match grid");
  const auto dims = ctx.grid.node_counts();
  std::vector<double> cur(u_prev.values().begin(), u_prev.values().end());
  std::vector<double> next(cur.size());
  for (std::size_t a = 0; a < ctx.grid.dim(); ++a) {
    apply_along_axis(ctx.ops[a].mass, dims, a, cur, next);
    cur.swap(next);
  }
  for (std::size_t i = 0; i < cur.size(); ++i) cur[i] = ctx.mass_coef * cur[i] - coupling.values[i];
  return FullField(ctx.grid, std::move(cur));
}

StepResidual::StepResidual(const CtdContext& ctx, FullField source)
    : modes_(ctx.grid), residual_(std::move(source)) {
  if (!ctx.grid.same_shape(residual_.grid())) throw std::logic_error("StepResidual: source does not match grid");
}

void StepResidual::accept(const CtdContext& ctx, RankOne mode) {
  const std::size_t d = ctx.grid.dim();
  std::vector<std::vector<double>> mu(d), su(d);
  for (std::size_t a = 0; a < d; ++a) {
    mu[a] = ctx.ops[a].mass.multiply(mode.factors[a]);
    su[a] = ctx.ops[a].stiffness.multiply(mode.factors[a]);
  }
  // K U = (c Mx + Lk Sx) u_x (x) M u_y [(x) M u_z] + Lk M u_x (x) (the stiffness terms of the other axes)
  std::vector<double> lead(mu[0].size());
  for (std::size_t i = 0; i < lead.size(); ++i) lead[i] = ctx.mass_coef * mu[0][i] + ctx.stiffness_coef * su[0][i];
  auto values = residual_.values();
  if (d == 2) {
    add_rank_one(ctx.grid, RankOne{{lead, mu[1]}}, -1.0, values);
    add_rank_one(ctx.grid, RankOne{{mu[0], su[1]}}, -ctx.stiffness_coef, values);
  } else {
    add_rank_one(ctx.grid, RankOne{{lead, mu[1], mu[2]}}, -1.0, values);
    add_rank_one(ctx.grid, RankOne{{mu[0], su[1], mu[2]}}, -ctx.stiffness_coef, values);
    add_rank_one(ctx.grid, RankOne{{mu[0], mu[1], su[2]}}, -ctx.stiffness_coef, values);
  }
  modes_.add_mode(std::move(mode));
}

AxisSystem assemble_axis_system(const CtdContext& ctx, std::size_t axis, const std::vector<std::vector<double>>& fixed,
                                const StepResidual& residual) {
  const std::size_t d = ctx.grid.dim();
  if (fixed.size() != d || axis >= d) throw std::logic_error("assemble_axis_system: wrong number of axis vectors");

  // alpha = c prod m_b + Lk sum_b k_b prod_{c != b} m_c and beta = Lk prod m_b,
  // with m_b = v_b' M_b v_b and k_b = v_b' S_b v_b over the fixed axes b.
  double mass_prod = 1.0, mixed = 0.0;
  std::vector<double> m(d, 1.0), k(d, 0.0);
  for (std::size_t b = 0; b < d; ++b) {
    if (b == axis) continue;
    m[b] = ctx.ops[b].mass.bilinear(fixed[b], fixed[b]);
    k[b] = ctx.ops[b].stiffness.bilinear(fixed[b], fixed[b]);
  }
  for (std::size_t b = 0; b < d; ++b) {
    if (b == axis) continue;
    double term = k[b];
    for (std::size_t c = 0; c < d; ++c)
      if (c != axis && c != b) term *= m[c];
    mixed += term;
    mass_prod *= m[b];
  }
  const double alpha = ctx.mass_coef * mass_prod + ctx.stiffness_coef * mixed;
  const double beta = ctx.stiffness_coef * mass_prod;
  if (!(alpha > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta))
    throw DegenerateModeError("separated solver: fixed vectors give a singular projection on axis " +
                              std::to_string(axis));

  return AxisSystem{alpha, beta, combine(alpha, ctx.ops[axis].mass, beta, ctx.ops[axis].stiffness),
                    contract_except(residual.values(), fixed, axis)};
}

std::vector<double> solve_axis(const CtdContext& ctx, std::size_t axis, const std::vector<std::vector<double>>& fixed,
                               const StepResidual& residual) {
  AxisSystem sys = assemble_axis_system(ctx, axis, fixed, residual);
  BandedCholesky(sys.matrix).solve_in_place(sys.rhs);
  for (double v : sys.rhs)
    if (!std::isfinite(v)) throw DegenerateModeError("separated solver: non-finite axis solution");
  return std::move(sys.rhs);
}

ModeResult fixed_point_mode(const CtdContext& ctx, const StepResidual& residual, const FixedPointConfig& config,
                            std::size_t mode_index) {
  const std::size_t d = ctx.grid.dim();
  std::vector<std::vector<double>> vecs(d);
  SplitMix64 rng(config.init_seed + 0x100000001b3ULL * mode_index);
  for (std::size_t a = 0; a < d; ++a) {
    const std::size_t n = ctx.grid.axis(a).n_node();
    vecs[a].assign(n, 1.0);
    if (config.init == ModeInit::random)
      for (double& x : vecs[a]) x = 2.0 * rng.uniform() - 1.0;
    const double norm = std::sqrt(dot(vecs[a], vecs[a]));
    for (double& x : vecs[a]) x /= norm;
  }

  ModeResult result;
  auto previous = vecs;
  for (std::size_t sweep = 1; sweep <= config.max_sweeps; ++sweep) {
    result.sweeps = sweep;
    for (std::size_t a = 0; a < d; ++a) {
      vecs[a] = solve_axis(ctx, a, vecs, residual);
      if (max_abs(vecs[a]) == 0.0) {
        result.zero = true;
        result.converged = true;
        for (std::size_t b = 0; b < d; ++b) vecs[b].assign(vecs[b].size(), 0.0);
        result.mode.factors = std::move(vecs);
        return result;
      }
    }
    if (!balance(vecs)) throw DegenerateModeError("separated solver: mode collapsed during normalization");
    if (sweep >= 2) {
      if (rank_one_change_within(vecs, previous, config.eps1 * rank_one_max(vecs))) {
        result.converged = true;
        break;
      }
    }
    previous = vecs;
  }
  result.mode.factors = std::move(vecs);
  return result;
}

EnrichResult enrich_step(const CtdContext& ctx, const FullField& source, const FixedPointConfig& config,
                         std::size_t mode_limit) {
  StepResidual residual(ctx, source);
  EnrichResult result{SeparatedField(ctx.grid), FullField(ctx.grid), false, {}, 0, 0};
  while (residual.size() < mode_limit) {
    ModeResult mode = fixed_point_mode(ctx, residual, config, residual.size());
    result.total_sweeps += mode.sweeps;
    if (mode.zero) {
      result.tolerance_met = true;
      break;
    }
    if (!mode.converged) ++result.unconverged_modes;
    const double increment = mode.mode.max_abs();
    add_rank_one(ctx.grid, mode.mode, 1.0, result.dense.values());
    residual.accept(ctx, std::move(mode.mode));
    result.increment_max.push_back(increment);
    if (increment <= config.eps2 * std::max(result.dense.max_abs(), 1.0)) {
      result.tolerance_met = true;
      break;
    }
  }
  result.field = residual.modes();
  return result;
}

StepResult step_actd(const CtdContext& ctx, const FullSystem& fallback, const FullField& u_prev,
                     const FixedPointConfig& config, const CouplingOptions& coupling, const PcgOptions& pcg) {
  const auto t0 = Clock::now();
  const CouplingMatrix c = assemble_coupling(*ctx.bases, u_prev, ctx.params.mobility, ctx.params.a0, coupling);
  StepResult out{FullField(ctx.grid), std::nullopt, "ctd", 0, false, true, 0.0, 0.0};
  out.assembly_ms = ms_since(t0);

  const bool capped = config.mode_cap != std::numeric_limits<std::size_t>::max();
  const auto t1 = Clock::now();
  if (!capped || config.mode_cap > 0) {
    const FullField source = step_source(ctx, u_prev, c);
    const std::size_t limit = capped ? std::min(config.max_modes, config.mode_cap) : config.max_modes;
    EnrichResult enriched = enrich_step(ctx, source, config, limit);
    const bool over_cap = capped && !enriched.tolerance_met && enriched.field.mode_count() >= config.mode_cap;
    if (!over_cap) {
      out.mode_count = enriched.field.mode_count();
      out.tolerance_met = enriched.tolerance_met;
      if (config.recompress) {
        SeparatedField packed = compress_full_to_separated(enriched.dense, config.eps2 / 10.0);
        out.dense = reconstruct(packed);
        out.modes = std::move(packed);
      } else {
        out.dense = std::move(enriched.dense);
        out.modes = std::move(enriched.field);
      }
      out.solve_ms = ms_since(t1);
      return out;
    }
    out.mode_count = enriched.field.mode_count();
  }

  out.method = "cfe";
  out.fell_back = true;
  out.dense = pcg_solve(fallback, build_rhs(fallback, u_prev, c), pcg).solution;
  out.solve_ms = ms_since(t1);
  return out;
}

SeparatedField compress_full_to_separated(const FullField& field, double tol) {
  return decompose_scalar_field(field, tol);
}

}  // namespace ctd
