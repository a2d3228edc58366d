#include "ctd/fe_reference.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "ctd/errors.hpp"

namespace ctd {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void check_grid(const FullSystem& sys, const FullField& v) {
  if (!sys.grid.same_shape(v.grid())) throw std::logic_error("full system: field does not match grid");
}

std::vector<double> along(const Operator1D& A, const std::vector<std::size_t>& dims, std::size_t axis,
                          std::span<const double> in) {
  std::vector<double> out(in.size());
  apply_along_axis(A, dims, axis, in, out);
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

FullSystem make_full_system(const Grid& grid, const BasisSet& bases, const PhysParams& params) {
  if (bases.size() != grid.dim()) throw std::logic_error("make_full_system: basis count does not match grid");
  FullSystem sys{grid, &bases, assemble_axis_operators(bases), params, 0.0, 0.0, {}, {}};
  sys.mass_coef = 1.0 / params.dt + params.alpha * params.mobility;
  sys.stiffness_coef = params.mobility * params.kappa;
  for (const auto& op : sys.ops)
    sys.axis_combined.push_back(combine(sys.mass_coef, op.mass, sys.stiffness_coef, op.stiffness));

  const auto dims = grid.node_counts();
  std::vector<std::vector<double>> md, sd;
  for (const auto& op : sys.ops) {
    md.push_back(op.mass.diagonal());
    sd.push_back(op.stiffness.diagonal());
  }
  sys.diagonal.resize(grid.total_nodes());
  std::vector<std::size_t> idx(grid.dim());
  for (std::size_t g = 0; g < sys.diagonal.size(); ++g) {
    std::size_t rem = g;
    for (std::size_t a = 0; a < grid.dim(); ++a) {
      idx[a] = rem % dims[a];
      rem /= dims[a];
    }
    double mass = 1.0, stiff = 0.0;
    for (std::size_t a = 0; a < grid.dim(); ++a) {
      double term = sd[a][idx[a]];
      for (std::size_t b = 0; b < grid.dim(); ++b)
        if (b != a) term *= md[b][idx[b]];
      stiff += term;
      mass *= md[a][idx[a]];
    }
    sys.diagonal[g] = sys.mass_coef * mass + sys.stiffness_coef * stiff;
  }
  return sys;
}

void apply_K(const FullSystem& sys, std::span<const double> v, std::span<double> out, ApplyWorkspace& work) {
  const std::size_t n = sys.grid.total_nodes();
  if (v.size() != n || out.size() != n) throw std::logic_error("apply_K: size mismatch");
  const auto dims = sys.grid.node_counts();
  const auto& ops = sys.ops;
  for (auto* buf : {&work.a, &work.b, &work.c}) buf->resize(n);
  std::span<double> a(work.a), b(work.b), c(work.c);
  const double sk = sys.stiffness_coef;
  if (sys.grid.dim() == 2) {
    // (c Mx + Lk Sx) My v + Lk Mx Sy v
    apply_along_axis(ops[1].mass, dims, 1, v, a);
    apply_along_axis(sys.axis_combined[0], dims, 0, a, out);
    apply_along_axis(ops[1].stiffness, dims, 1, v, a);
    apply_along_axis(ops[0].mass, dims, 0, a, b);
    for (std::size_t i = 0; i < n; ++i) out[i] += sk * b[i];
    return;
  }
  // (c Mx + Lk Sx) My Mz v + Lk Mx (Sy Mz + My Sz) v
  apply_along_axis(ops[2].mass, dims, 2, v, a);
  apply_along_axis(ops[1].mass, dims, 1, a, b);
  apply_along_axis(sys.axis_combined[0], dims, 0, b, out);
  apply_along_axis(ops[1].stiffness, dims, 1, a, b);
  apply_along_axis(ops[2].stiffness, dims, 2, v, a);
  apply_along_axis(ops[1].mass, dims, 1, a, c);
  for (std::size_t i = 0; i < n; ++i) b[i] += c[i];
  apply_along_axis(ops[0].mass, dims, 0, b, a);
  for (std::size_t i = 0; i < n; ++i) out[i] += sk * a[i];
}

FullField apply_K(const FullSystem& sys, const FullField& v) {
  check_grid(sys, v);
  FullField out(sys.grid);
  ApplyWorkspace work;
  apply_K(sys, v.values(), out.values(), work);
  return out;
}

FullField apply_mass(const FullSystem& sys, const FullField& v) {
  check_grid(sys, v);
  const auto dims = sys.grid.node_counts();
  std::vector<double> cur(v.values().begin(), v.values().end());
  for (std::size_t a = 0; a < sys.grid.dim(); ++a) cur = along(sys.ops[a].mass, dims, a, cur);
  return FullField(sys.grid, std::move(cur));
}

FullField build_rhs(const FullSystem& sys, const FullField& u_prev, const CouplingMatrix& coupling) {
  check_grid(sys, u_prev);
  check_grid(sys, coupling.values);
  FullField rhs = apply_mass(sys, u_prev);
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = sys.mass_coef * rhs[i] - coupling.values[i];
  return rhs;
}

FullField build_rhs(const FullSystem& sys, const FullField& u_prev, const CouplingOptions& coupling) {
  return build_rhs(sys, u_prev,
                   assemble_coupling(*sys.bases, u_prev, sys.params.mobility, sys.params.a0, coupling));
}

PcgResult pcg_solve(const FullSystem& sys, const FullField& rhs, const PcgOptions& options) {
  check_grid(sys, rhs);
  const std::size_t n = rhs.size();
  const std::size_t max_iter =
      options.max_iter > 0 ? options.max_iter
                           : static_cast<std::size_t>(std::ceil(10.0 * std::sqrt(static_cast<double>(n))));
  PcgResult result{FullField(sys.grid), 0, 0.0};
  const double bnorm = std::sqrt(dot(rhs.values(), rhs.values()));
  if (bnorm == 0.0) return result;

  auto x = result.solution.values();
  std::vector<double> r(rhs.values().begin(), rhs.values().end());
  std::vector<double> z(n), p(n), Ap(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / sys.diagonal[i];
  p = z;
  double rz = dot(r, z);
  ApplyWorkspace work;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    apply_K(sys, p, Ap, work);
    const double alpha = rz / dot(p, Ap);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
    }
    const double rel = std::sqrt(dot(r, r)) / bnorm;
    result.iterations = it;
    result.relative_residual = rel;
    if (!std::isfinite(rel)) throw SolverError("PCG: non-finite residual");
    if (rel <= options.tol) return result;
    for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / sys.diagonal[i];
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  throw ConvergenceError("PCG did not reach tolerance within " + std::to_string(max_iter) + " iterations",
                         result.relative_residual);
}

FullField step_full(const FullSystem& sys, const FullField& state, const CouplingOptions& coupling,
                    const PcgOptions& pcg, FullStepStats* stats) {
  const auto t0 = Clock::now();
  const CouplingMatrix c = assemble_coupling(*sys.bases, state, sys.params.mobility, sys.params.a0, coupling);
  const double assembly_ms = ms_since(t0);
  const auto t1 = Clock::now();
  const FullField rhs = build_rhs(sys, state, c);
  PcgResult solved = pcg_solve(sys, rhs, pcg);
  if (stats != nullptr) {
    stats->iterations = solved.iterations;
    stats->relative_residual = solved.relative_residual;
    stats->assembly_ms = assembly_ms;
    stats->solve_ms = ms_since(t1);
  }
  return std::move(solved.solution);
}

}  // namespace ctd
