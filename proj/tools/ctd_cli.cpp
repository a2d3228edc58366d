#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "ctd/bench.hpp"
#include "ctd/compare.hpp"
#include "ctd/config.hpp"
#include "ctd/errors.hpp"
#include "ctd/snapshot_io.hpp"

namespace fs = std::filesystem;
using namespace ctd;

namespace {

void write_state(const SimConfig& cfg, const fs::path& dir, std::size_t step, double time, const FullField& state,
                 const SeparatedField* modes) {
  std::ostringstream stem;
  stem << "u_" << std::setw(6) << std::setfill('0') << step;
  for (const auto& format : cfg.output.formats) {
    if (format == "csv") write_csv(state, time, (dir / (stem.str() + ".csv")).string());
    if (format == "vtk") write_vtk(state, time, (dir / (stem.str() + ".vtk")).string());
    if (format == "modes" && modes != nullptr) write_modes(*modes, time, (dir / (stem.str() + ".modes")).string());
  }
  if (cfg.output.pgm) write_pgm(state, (dir / (stem.str() + ".pgm")).string());
}

int run_solve(const std::string& config_path, const std::string& method, const std::string& out_dir) {
  SimConfig cfg = load_config(config_path);
  if (!method.empty()) cfg.method = parse_method(method);
  if (!out_dir.empty()) cfg.output.dir = out_dir;
  const fs::path dir = cfg.output.dir;
  fs::create_directories(dir);
  {
    std::ofstream echo(dir / "config.json");
    echo << config_to_json(cfg);
  }
  const std::size_t steps = cfg.step_count();
  auto observer = [&](std::size_t step, double time, const FullField& state, const SeparatedField* modes) {
    const bool stride_hit = cfg.output.snapshot_stride > 0 && step % cfg.output.snapshot_stride == 0;
    if (stride_hit || step == steps) write_state(cfg, dir, step, time, state, modes);
  };
  const SimulationResult result = run_simulation(cfg, observer);
  write_energy_trace(result.trace, (dir / "energy.csv").string());
  write_mode_counts(result.trace, (dir / "modes.csv").string());
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  const auto& last = result.trace.back();
  std::cout << "method=" << to_string(cfg.method) << " steps=" << steps << " final_energy=" << std::setprecision(12)
            << last.energy << " min_alpha=" << result.min_alpha << " out=" << dir.string() << '\n';
  return 0;
}

int run_compare(const std::string& a, const std::string& b, const std::string& diff_path) {
  const Snapshot sa = read_snapshot(a);
  const Snapshot sb = read_snapshot(b);
  const CompareReport report = compare_fields(sa.field, sb.field);
  if (!diff_path.empty()) write_csv(report.difference, sb.time, diff_path);
  std::cout << summary_line(report) << '\n';
  return 0;
}

int run_bench_cmd(const std::string& matrix_path, const std::string& out_dir) {
  const BenchMatrix matrix = load_bench_matrix(matrix_path);
  const BenchReport report = run_bench(matrix);
  write_bench_report(report, out_dir);
  for (const auto& [m, s] : report.slopes) std::cout << to_string(m) << " slope=" << s << '\n';
  return 0;
}

int run_dump_basis(const std::string& config_path, const std::string& out_path) {
  const SimConfig cfg = load_config(config_path);
  const Grid grid = make_grid(cfg.grid);
  const Basis1D basis = cfg.method == Method::fe ? build_linear_basis(grid.axis(0), cfg.quad_points)
                                                 : build_cfe_basis(grid.axis(0), cfg.cfe, cfg.quad_points);
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw std::runtime_error("cannot write '" + out_path + "'");
  }
  std::ostream& out = out_path.empty() ? std::cout : file;
  out.precision(17);
  out << "element,quad_point,xi,node,N,dNdx\n";
  for (std::size_t e = 0; e < basis.n_elem(); ++e) {
    const ElementTable& t = basis.element(e);
    for (std::size_t g = 0; g < basis.n_quad(); ++g)
      for (std::size_t k = 0; k < t.count; ++k)
        out << e << ',' << g << ',' << basis.quad_xi()[g] << ',' << t.first + k << ',' << t.N[g * t.count + k] << ','
            << t.dN[g * t.count + k] << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convolution tensor decomposition solver for the Allen-Cahn equation"};
  app.require_subcommand(1);

  std::string config, method, out, a, b, diff, matrix;
  auto* solve = app.add_subcommand("solve", "Run a simulation");
  solve->add_option("--config", config, "Run configuration (JSON)")->required();
  solve->add_option("--method", method, "Override the method: fe, cfe, ctd or actd");
  solve->add_option("--out", out, "Override the output directory");

  auto* compare = app.add_subcommand("compare", "Compare two snapshots");
  compare->add_option("--a", a, "Snapshot (.csv, .vtk or .modes)")->required();
  compare->add_option("--b", b, "Reference snapshot")->required();
  compare->add_option("--diff", diff, "Write |a - b| as a csv snapshot");

  auto* bench = app.add_subcommand("bench", "Run a cost-scaling matrix");
  bench->add_option("--matrix", matrix, "Bench matrix (JSON)")->required();
  bench->add_option("--out", out, "Output directory")->required();

  auto* dump = app.add_subcommand("dump-basis", "Tabulate the x-axis shape functions as CSV");
  dump->add_option("--config", config, "Run configuration (JSON)")->required();
  dump->add_option("--out", out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*solve) return run_solve(config, method, out);
    if (*compare) return run_compare(a, b, diff);
    if (*bench) return run_bench_cmd(matrix, out);
    if (*dump) return run_dump_basis(config, out);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
