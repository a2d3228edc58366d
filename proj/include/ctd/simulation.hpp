#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ctd/cfe_basis.hpp"
#include "ctd/coupling.hpp"
#include "ctd/ctd_solver.hpp"
#include "ctd/fe_reference.hpp"
#include "ctd/free_energy.hpp"

namespace ctd {

enum class Method { fe, cfe, ctd, actd };

std::string to_string(Method m);
Method parse_method(const std::string& name);

struct GridSpec {
  std::vector<std::size_t> n_elem;  // 2 or 3 entries
  std::vector<double> extent;       // same length as n_elem
  std::vector<double> origin;
};

struct InitialConditionSpec {
  std::uint64_t seed = 42;
  double lo = -0.5;
  double hi = 0.5;
};

struct OutputSpec {
  std::string dir = "out";
  std::size_t snapshot_stride = 0;  // 0 writes the final state only
  std::vector<std::string> formats{"csv", "modes"};
  bool pgm = false;
};

struct SimConfig {
  GridSpec grid;
  Method method = Method::actd;
  PhysParams physics;
  std::optional<std::size_t> steps;  // defaults to round(T / dt)
  CfeParams cfe;
  std::size_t quad_points = 6;
  FixedPointConfig solver;
  CouplingOptions coupling;
  PcgOptions pcg;
  InitialConditionSpec initial;
  OutputSpec output;
  double alpha_range_lo = -1.0;  // u range used to judge alpha
  double alpha_range_hi = 1.0;

  std::size_t step_count() const;
};

Grid make_grid(const GridSpec& spec);
/// Linear bases for the fe method, convolution bases otherwise.
BasisSet make_bases(const Grid& grid, Method method, const CfeParams& cfe, std::size_t quad_points);

struct EnergyRow {
  std::size_t step = 0;
  double time = 0.0;
  double energy = 0.0;
  std::size_t modes = 0;
  std::string method;
  double wall_ms = 0.0;
  double solve_ms = 0.0;
  double assembly_ms = 0.0;
};

using EnergyTrace = std::vector<EnergyRow>;

struct SimulationResult {
  FullField final_state;
  std::optional<SeparatedField> final_modes;
  EnergyTrace trace;
  double min_alpha = 0.0;
  std::vector<std::string> warnings;
};

/// Called after the initial state (step 0) and after every step.
using StepObserver =
    std::function<void(std::size_t step, double time, const FullField& state, const SeparatedField* modes)>;

/// Seeded random initial condition followed by the time loop of the
/// configured method. Solver failures are rethrown with the step index.
SimulationResult run_simulation(const SimConfig& config, const StepObserver& observer = {});
/// Same, from a given initial state.
SimulationResult run_simulation(const SimConfig& config, FullField initial, const StepObserver& observer = {});

}  // namespace ctd
