#pragma once

#include <string>
#include <vector>

#include "ctd/simulation.hpp"

namespace ctd {

/// A scaling study: the base configuration is rerun for every method and
/// every per-axis element count n (all axes set to n).
struct BenchMatrix {
  SimConfig base;
  std::vector<Method> methods;
  std::vector<std::size_t> sizes;
  std::size_t steps = 20;
};

struct BenchRow {
  Method method = Method::fe;
  std::size_t n = 0;
  std::size_t dofs = 0;
  std::size_t steps = 0;
  double total_solve_ms = 0.0;
  double total_assembly_ms = 0.0;
  double mean_modes = 0.0;
  std::size_t max_modes = 0;
  std::size_t fallbacks = 0;
  double final_energy = 0.0;

  double mean_solve_ms() const { return steps ? total_solve_ms / static_cast<double>(steps) : 0.0; }
};

struct BenchReport {
  std::vector<BenchRow> rows;
  /// Least-squares slope of log(mean per-step solve time) against log(n), per method.
  std::vector<std::pair<Method, double>> slopes;

  double slope(Method m) const;
  const BenchRow* find(Method m, std::size_t n) const;
};

/// JSON: {"base": <config object> | "<config path>", "methods": [...],
/// "n": [...], "steps": k}. Relative base paths resolve against the matrix file.
BenchMatrix load_bench_matrix(const std::string& path);

BenchReport run_bench(const BenchMatrix& matrix);

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Writes bench.csv and bench.md into dir.
void write_bench_report(const BenchReport& report, const std::string& dir);

}  // namespace ctd
