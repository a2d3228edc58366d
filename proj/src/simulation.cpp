#include "ctd/simulation.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "ctd/errors.hpp"
#include "ctd/random.hpp"

namespace ctd {

std::string to_string(Method m) {
  switch (m) {
    case Method::fe: return "fe";
    case Method::cfe: return "cfe";
    case Method::ctd: return "ctd";
    case Method::actd: return "actd";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  if (name == "fe") return Method::fe;
  if (name == "cfe") return Method::cfe;
  if (name == "ctd") return Method::ctd;
  if (name == "actd") return Method::actd;
  throw ConfigError("method: expected one of fe, cfe, ctd, actd (got '" + name + "')");
}

std::size_t SimConfig::step_count() const {
  if (steps) return *steps;
  return static_cast<std::size_t>(std::llround(physics.final_time / physics.dt));
}

Grid make_grid(const GridSpec& spec) {
  const std::size_t d = spec.n_elem.size();
  if (d != 2 && d != 3) throw ConfigError("grid.n_elem: expected 2 or 3 entries");
  if (spec.extent.size() != d) throw ConfigError("grid.extent: length must match grid.n_elem");
  if (!spec.origin.empty() && spec.origin.size() != d) throw ConfigError("grid.origin: length must match grid.n_elem");
  std::vector<Axis1D> axes;
  for (std::size_t a = 0; a < d; ++a)
    axes.push_back(build_axis(spec.origin.empty() ? 0.0 : spec.origin[a], spec.extent[a], spec.n_elem[a]));
  return Grid(std::move(axes));
}

BasisSet make_bases(const Grid& grid, Method method, const CfeParams& cfe, std::size_t quad_points) {
  BasisSet bases;
  for (const Axis1D& axis : grid.axes())
    bases.push_back(method == Method::fe ? build_linear_basis(axis, quad_points)
                                         : build_cfe_basis(axis, cfe, quad_points));
  return bases;
}

SimulationResult run_simulation(const SimConfig& config, const StepObserver& observer) {
  const Grid grid = make_grid(config.grid);
  return run_simulation(
      config, seeded_initial_condition(grid, config.initial.seed, config.initial.lo, config.initial.hi), observer);
}

SimulationResult run_simulation(const SimConfig& config, FullField initial, const StepObserver& observer) {
  using Clock = std::chrono::steady_clock;
  validate(config.physics);
  validate(config.solver);
  const Grid grid = make_grid(config.grid);
  if (!grid.same_shape(initial.grid())) throw ConfigError("initial state does not match the configured grid");
  const BasisSet bases = make_bases(grid, config.method, config.cfe, config.quad_points);
  const PhysParams& phys = config.physics;

  SimulationResult result{std::move(initial), std::nullopt, {}, 0.0, {}};
  result.min_alpha = min_alpha(phys.a0, config.alpha_range_lo, config.alpha_range_hi);
  if (phys.alpha < result.min_alpha) {
    std::ostringstream msg;
    msg << "alpha = " << phys.alpha << " is below the stability bound " << result.min_alpha << " for u in ["
        << config.alpha_range_lo << ", " << config.alpha_range_hi << "]";
    result.warnings.push_back(msg.str());
  }

  const FullSystem full = make_full_system(grid, bases, phys);
  std::optional<CtdContext> ctx;
  FixedPointConfig solver = config.solver;
  if (config.method == Method::ctd || config.method == Method::actd) {
    ctx = make_ctd_context(grid, bases, phys);
    if (config.method == Method::ctd) solver.mode_cap = std::numeric_limits<std::size_t>::max();
  }

  FullField& state = result.final_state;
  result.trace.push_back({0, 0.0, total_energy(state, bases, phys.kappa, phys.a0), 0, to_string(config.method)});
  if (observer) observer(0, 0.0, state, nullptr);

  bool range_warned = false;
  const std::size_t steps = config.step_count();
  for (std::size_t k = 1; k <= steps; ++k) {
    const auto t0 = Clock::now();
    EnergyRow row;
    row.step = k;
    row.time = static_cast<double>(k) * phys.dt;
    try {
      if (ctx) {
        StepResult step = step_actd(*ctx, full, state, solver, config.coupling, config.pcg);
        state = std::move(step.dense);
        result.final_modes = std::move(step.modes);
        row.modes = step.mode_count;
        row.method = step.method;
        row.solve_ms = step.solve_ms;
        row.assembly_ms = step.assembly_ms;
        if (!step.tolerance_met && !step.fell_back)
          result.warnings.push_back("step " + std::to_string(k) + ": mode limit reached before the enrichment tolerance");
      } else {
        FullStepStats stats;
        state = step_full(full, state, config.coupling, config.pcg, &stats);
        result.final_modes.reset();
        row.method = to_string(config.method);
        row.solve_ms = stats.solve_ms;
        row.assembly_ms = stats.assembly_ms;
      }
    } catch (const ConvergenceError& e) {
      throw ConvergenceError("step " + std::to_string(k) + ": " + e.what(), e.residual());
    } catch (const SolverError& e) {
      throw SolverError("step " + std::to_string(k) + ": " + e.what());
    }
    row.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    row.energy = total_energy(state, bases, phys.kappa, phys.a0);
    if (!std::isfinite(row.energy)) throw SolverError("step " + std::to_string(k) + ": energy is not finite");
    result.trace.push_back(row);

    if (!range_warned) {
      double lo = 0.0, hi = 0.0;
      for (double v : state.values()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (lo < config.alpha_range_lo || hi > config.alpha_range_hi) {
        std::ostringstream msg;
        msg << "step " << k << ": u left the range [" << config.alpha_range_lo << ", " << config.alpha_range_hi
            << "] used to choose alpha (min " << lo << ", max " << hi << ")";
        result.warnings.push_back(msg.str());
        range_warned = true;
      }
    }
    if (observer) observer(k, row.time, state, result.final_modes ? &*result.final_modes : nullptr);
  }
  return result;
}

}  // namespace ctd
