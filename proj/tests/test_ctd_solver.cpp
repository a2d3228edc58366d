#include <doctest.h>

#include <cmath>
#include <limits>

#include "ctd/ctd_solver.hpp"
#include "ctd/errors.hpp"
#include "ctd/random.hpp"
#include "oracle.hpp"

using namespace ctd;

namespace {

Grid cube(std::vector<std::size_t> n) {
  std::vector<Axis1D> axes;
  for (auto k : n) axes.emplace_back(0.0, 5.0, k);
  return Grid(axes);
}

BasisSet cfe_bases(const Grid& g, CfeParams prm = {}) {
  BasisSet b;
  for (const auto& ax : g.axes()) b.push_back(build_cfe_basis(ax, prm));
  return b;
}

RankOne random_mode(const Grid& g, std::uint64_t seed) {
  SplitMix64 rng(seed);
  RankOne m;
  for (const auto& ax : g.axes()) {
    std::vector<double> v(ax.n_node());
    for (auto& x : v) x = 2.0 * rng.uniform() - 1.0;
    m.factors.push_back(v);
  }
  return m;
}

FullField run_steps(const Grid& g, const BasisSet& bases, const PhysParams& p, FullField u, int steps, bool separated,
                    const FixedPointConfig& cfg = {}) {
  const auto ctx = make_ctd_context(g, bases, p);
  const auto sys = make_full_system(g, bases, p);
  for (int k = 0; k < steps; ++k)
    u = separated ? step_actd(ctx, sys, u, cfg, CouplingOptions{}).dense
                  : step_full(sys, u, CouplingOptions{}, PcgOptions{1e-10, 0});
  return u;
}

}  // namespace

TEST_CASE("axis systems match the term-by-term oracle") {
  PhysParams p;
  p.kappa = 0.8;
  for (const auto& dims : {std::vector<std::size_t>{8, 10}, std::vector<std::size_t>{6, 7, 5}}) {
    CAPTURE(dims.size());
    const Grid g = cube(dims);
    const auto bases = cfe_bases(g, {1, 2, 12.0});
    const auto ctx = make_ctd_context(g, bases, p);

    SeparatedField prev(g);
    for (std::uint64_t s = 1; s <= 3; ++s) prev.add_mode(random_mode(g, s));
    const FullField u_prev = reconstruct(prev);
    const auto coupling = assemble_coupling(bases, u_prev, p.mobility, p.a0, CouplingOptions{});
    StepResidual residual(ctx, step_source(ctx, u_prev, coupling));
    std::vector<RankOne> accepted{random_mode(g, 11), random_mode(g, 12)};
    for (const auto& m : accepted) residual.accept(ctx, m);
    CHECK(residual.size() == 2);

    const auto fixed = random_mode(g, 99).factors;
    for (std::size_t axis = 0; axis < g.dim(); ++axis) {
      CAPTURE(axis);
      const auto sys = assemble_axis_system(ctx, axis, fixed, residual);
      const auto ref = oracle::axis_system(bases, p, axis, fixed, prev.modes(), accepted, coupling.values);
      const oracle::Dense K = oracle::to_dense(sys.matrix);
      CHECK((K - ref.matrix).norm() <= 1e-12 * ref.matrix.norm());
      CHECK(oracle::rel_diff(oracle::to_vec(sys.rhs), ref.rhs) < 1e-12);

      const auto x = solve_axis(ctx, axis, fixed, residual);
      CHECK(oracle::rel_diff(K * oracle::to_vec(x), ref.rhs) < 1e-11);
    }
  }
}

TEST_CASE("step residual equals source minus K applied to accepted modes") {
  PhysParams p;
  const Grid g = cube({7, 6, 5});
  const auto bases = cfe_bases(g);
  const auto ctx = make_ctd_context(g, bases, p);
  const auto u = seeded_initial_condition(g, 5, -1.0, 1.0);
  const auto C = assemble_coupling(bases, u, p.mobility, p.a0, CouplingOptions{});
  const auto source = step_source(ctx, u, C);
  const oracle::Vec uv = oracle::to_vec(u.values());
  const oracle::Vec ref_source =
      ctx.mass_coef * (oracle::full_mass(bases) * uv) - oracle::to_vec(C.values.values());
  CHECK(oracle::rel_diff(oracle::to_vec(source.values()), ref_source) < 1e-12);

  StepResidual r(ctx, source);
  const auto m = random_mode(g, 3);
  r.accept(ctx, m);
  SeparatedField one(g);
  one.add_mode(m);
  const oracle::Vec ref = ref_source - oracle::full_K(bases, p) * oracle::to_vec(reconstruct(one).values());
  CHECK(oracle::rel_diff(oracle::to_vec(r.values().values()), ref) < 1e-12);
}

TEST_CASE("solver configuration validation") {
  FixedPointConfig cfg;
  CHECK_NOTHROW(validate(cfg));
  cfg.eps2 = 0.1;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg = FixedPointConfig{};
  cfg.max_sweeps = 1;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg = FixedPointConfig{};
  cfg.max_modes = 0;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
}

TEST_CASE("zero fixed vector is a degenerate projection") {
  PhysParams p;
  const Grid g = cube({5, 5});
  const auto bases = cfe_bases(g);
  const auto ctx = make_ctd_context(g, bases, p);
  StepResidual r(ctx, FullField(g, 1.0));
  std::vector<std::vector<double>> fixed{std::vector<double>(6, 1.0), std::vector<double>(6, 0.0)};
  CHECK_THROWS_AS(solve_axis(ctx, 0, fixed, r), DegenerateModeError);
}

TEST_CASE("a zero residual gives a zero mode") {
  PhysParams p;
  const Grid g = cube({5, 6});
  const auto bases = cfe_bases(g);
  const auto ctx = make_ctd_context(g, bases, p);
  const auto res = fixed_point_mode(ctx, StepResidual(ctx, FullField(g)), FixedPointConfig{});
  CHECK(res.zero);
  CHECK(res.converged);
  const auto e = enrich_step(ctx, FullField(g), FixedPointConfig{}, 10);
  CHECK(e.tolerance_met);
  CHECK(e.field.mode_count() == 0);
}

TEST_CASE("an exactly rank-one step is recovered") {
  PhysParams p;
  const Grid g = cube({12, 9});
  const auto bases = cfe_bases(g);
  const auto ctx = make_ctd_context(g, bases, p);
  RankOne target;
  for (const auto& ax : g.axes()) {
    std::vector<double> v(ax.n_node());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 + 0.5 * std::sin(0.4 * static_cast<double>(i));
    target.factors.push_back(v);
  }
  SeparatedField t(g);
  t.add_mode(target);
  const FullField exact = reconstruct(t);
  const oracle::Vec src = oracle::full_K(bases, p) * oracle::to_vec(exact.values());
  const FullField source(g, std::vector<double>(src.data(), src.data() + src.size()));
  FixedPointConfig cfg;
  cfg.eps1 = 1e-8;
  cfg.eps2 = 1e-10;
  cfg.max_sweeps = 50;
  const auto e = enrich_step(ctx, source, cfg, 20);
  CHECK(e.tolerance_met);
  CHECK(relative_l2(e.dense.values(), exact.values()) < 1e-8);
  CHECK(relative_l2(reconstruct(e.field).values(), e.dense.values()) < 1e-14);
}

TEST_CASE("a pure phase stays put under the separated solver") {
  PhysParams p;
  const Grid g = cube({10, 10, 6});
  const auto bases = cfe_bases(g);
  const auto ctx = make_ctd_context(g, bases, p);
  const auto sys = make_full_system(g, bases, p);
  const auto res = step_actd(ctx, sys, FullField(g, 1.0), FixedPointConfig{}, CouplingOptions{});
  CHECK(res.method == "ctd");
  CHECK(res.tolerance_met);
  CHECK(res.mode_count <= 2);
  for (double v : res.dense.values()) CHECK(v == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("separated steps track the full-order solution") {
  PhysParams p;
  const Grid g = cube({16, 16});
  const auto bases = cfe_bases(g);
  const auto u0 = seeded_initial_condition(g, 42, -0.5, 0.5);
  const auto ref = run_steps(g, bases, p, u0, 5, false);
  const auto sep = run_steps(g, bases, p, u0, 5, true);
  const double err = relative_l2(sep.values(), ref.values());
  MESSAGE("16x16, 5 steps: relative L2 to full order " << err);
  CHECK(err <= 5e-2);
}

TEST_CASE("mode cap semantics") {
  PhysParams p;
  const Grid g = cube({16, 16});
  const auto bases = cfe_bases(g);
  const auto ctx = make_ctd_context(g, bases, p);
  const auto sys = make_full_system(g, bases, p);
  const auto u0 = seeded_initial_condition(g, 42, -0.5, 0.5);

  FixedPointConfig cfg;
  const auto free_run = step_actd(ctx, sys, u0, cfg, CouplingOptions{});
  CHECK(free_run.method == "ctd");
  CHECK_FALSE(free_run.fell_back);
  CHECK(free_run.modes.has_value());
  REQUIRE(free_run.mode_count > 3);

  cfg.mode_cap = 0;
  const auto always = step_actd(ctx, sys, u0, cfg, CouplingOptions{});
  CHECK(always.fell_back);
  CHECK(always.method == "cfe");
  CHECK_FALSE(always.modes.has_value());
  const auto full = step_full(sys, u0, CouplingOptions{});
  CHECK(relative_l2(always.dense.values(), full.values()) < 1e-14);

  cfg.mode_cap = 3;
  const auto capped = step_actd(ctx, sys, u0, cfg, CouplingOptions{});
  CHECK(capped.fell_back);
  CHECK(capped.mode_count == 3);

  cfg.mode_cap = free_run.mode_count;
  CHECK_FALSE(step_actd(ctx, sys, u0, cfg, CouplingOptions{}).fell_back);
}

TEST_CASE("random initialization is reproducible") {
  PhysParams p;
  const Grid g = cube({10, 10});
  const auto bases = cfe_bases(g);
  const auto ctx = make_ctd_context(g, bases, p);
  const auto u0 = seeded_initial_condition(g, 1, -0.5, 0.5);
  const auto source = step_source(ctx, u0, assemble_coupling(bases, u0, p.mobility, p.a0, CouplingOptions{}));
  FixedPointConfig cfg;
  cfg.init = ModeInit::random;
  const auto a = enrich_step(ctx, source, cfg, 50);
  const auto b = enrich_step(ctx, source, cfg, 50);
  CHECK(a.field.mode_count() == b.field.mode_count());
  CHECK(relative_l2(a.dense.values(), b.dense.values()) == 0.0);
  cfg.init = ModeInit::ones;
  const auto c = enrich_step(ctx, source, cfg, 50);
  CHECK(relative_l2(a.dense.values(), c.dense.values()) < 1e-2);
}

TEST_CASE("error against the full-order step decreases with the mode count") {
  PhysParams p;
  const Grid g = cube({20, 20});
  const auto bases = cfe_bases(g);
  const auto ctx = make_ctd_context(g, bases, p);
  const auto sys = make_full_system(g, bases, p);
  const auto u0 = seeded_initial_condition(g, 7, -0.5, 0.5);
  const auto coupling = assemble_coupling(bases, u0, p.mobility, p.a0, CouplingOptions{});
  const auto exact = pcg_solve(sys, build_rhs(sys, u0, coupling), PcgOptions{1e-12, 0}).solution;
  const auto e = enrich_step(ctx, step_source(ctx, u0, coupling), FixedPointConfig{}, 1000);
  REQUIRE(e.field.mode_count() > 10);
  std::vector<double> errs;
  for (std::size_t m : {std::size_t{1}, std::size_t{5}, std::size_t{10}, e.field.mode_count()}) {
    SeparatedField t = e.field;
    t.truncate(m);
    errs.push_back(relative_l2(reconstruct(t).values(), exact.values()));
  }
  MESSAGE("errors at M = 1, 5, 10, all: " << errs[0] << " " << errs[1] << " " << errs[2] << " " << errs[3]);
  CHECK(errs[3] < errs[0] / 3.0);
  CHECK(errs[3] < 1e-2);
  // The greedy sequence is not guaranteed monotone, so only report it.
  if (!(errs[1] <= errs[0] && errs[2] <= errs[1])) MESSAGE("non-monotone intermediate errors");
}

TEST_CASE("transposing the initial state transposes the result") {
  PhysParams p;
  const Grid g = cube({14, 14});
  const auto bases = cfe_bases(g);
  const auto u0 = seeded_initial_condition(g, 3, -0.5, 0.5);
  FullField u0t(g);
  for (std::size_t j = 0; j < 15; ++j)
    for (std::size_t i = 0; i < 15; ++i) u0t[j + 15 * i] = u0[i + 15 * j];
  const auto a = run_steps(g, bases, p, u0, 3, true);
  const auto b = run_steps(g, bases, p, u0t, 3, true);
  FullField bt(g);
  for (std::size_t j = 0; j < 15; ++j)
    for (std::size_t i = 0; i < 15; ++i) bt[j + 15 * i] = b[i + 15 * j];
  const double err = relative_l2(bt.values(), a.values());
  MESSAGE("transpose mismatch " << err);
  CHECK(err < 5e-2);
}

TEST_CASE("recompression keeps the dense field within its tolerance") {
  PhysParams p;
  const Grid g = cube({16, 16});
  const auto bases = cfe_bases(g);
  const auto ctx = make_ctd_context(g, bases, p);
  const auto sys = make_full_system(g, bases, p);
  const auto u0 = seeded_initial_condition(g, 42, -0.5, 0.5);
  FixedPointConfig cfg;
  const auto plain = step_actd(ctx, sys, u0, cfg, CouplingOptions{});
  cfg.recompress = true;
  const auto packed = step_actd(ctx, sys, u0, cfg, CouplingOptions{});
  REQUIRE(packed.modes.has_value());
  CHECK(packed.modes->mode_count() <= 17);
  CHECK(relative_l2(packed.dense.values(), plain.dense.values()) <= 1e-5);
}

TEST_CASE("compression of a full field") {
  const Grid g = cube({9, 11});
  const auto f = seeded_initial_condition(g, 2, -1.0, 1.0);
  for (double tol : {1e-1, 1e-3, 1e-12}) {
    const auto sep = compress_full_to_separated(f, tol);
    CHECK(relative_l2(reconstruct(sep).values(), f.values()) <= tol * (1 + 1e-10));
  }
}

TEST_CASE("a symmetric step gives a symmetric converged mode") {
  PhysParams p;
  const Grid g = cube({12, 12});
  const auto bases = cfe_bases(g);
  const auto ctx = make_ctd_context(g, bases, p);
  FullField u(g);
  for (std::size_t j = 0; j < 13; ++j)
    for (std::size_t i = 0; i < 13; ++i)
      u[i + 13 * j] = 0.4 * std::cos(0.3 * static_cast<double>(i)) * std::cos(0.3 * static_cast<double>(j)) +
                      0.2 * std::sin(0.2 * static_cast<double>(i + j));
  const auto source = step_source(ctx, u, assemble_coupling(bases, u, p.mobility, p.a0, CouplingOptions{}));
  FixedPointConfig cfg;
  cfg.eps1 = 1e-12;
  cfg.eps2 = 1e-13;
  cfg.max_sweeps = 200;
  const auto res = fixed_point_mode(ctx, StepResidual(ctx, source), cfg);
  CHECK(res.converged);
  const auto& fx = res.mode.factors[0];
  const auto& fy = res.mode.factors[1];
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < fx.size(); ++i) {
    diff = std::max(diff, std::abs(fx[i] - fy[i]));
    scale = std::max(scale, std::abs(fx[i]));
  }
  CHECK(diff <= 1e-8 * scale);
}

TEST_CASE("enrichment increments shrink after the first modes") {
  PhysParams p;
  const Grid g = cube({24, 24});
  const auto bases = cfe_bases(g);
  const auto ctx = make_ctd_context(g, bases, p);
  for (std::uint64_t seed : {42u, 7u}) {
    const auto u0 = seeded_initial_condition(g, seed, -0.5, 0.5);
    const auto source = step_source(ctx, u0, assemble_coupling(bases, u0, p.mobility, p.a0, CouplingOptions{}));
    const auto e = enrich_step(ctx, source, FixedPointConfig{}, 1000);
    std::size_t rises = 0;
    for (std::size_t m = 4; m < e.increment_max.size(); ++m) rises += e.increment_max[m] > e.increment_max[m - 1];
    MESSAGE("seed " << seed << ": " << e.increment_max.size() << " modes, " << rises
                    << " increments larger than their predecessor after mode 3");
    CHECK(e.tolerance_met);
    CHECK(e.increment_max.back() < e.increment_max.front());
  }
}
