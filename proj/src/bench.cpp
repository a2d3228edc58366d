#include "ctd/bench.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ctd/config.hpp"
#include "ctd/errors.hpp"

namespace ctd {

double BenchReport::slope(Method m) const {
  for (const auto& [method, s] : slopes)
    if (method == m) return s;
  return std::nan("");
}

const BenchRow* BenchReport::find(Method m, std::size_t n) const {
  for (const auto& r : rows)
    if (r.method == m && r.n == n) return &r;
  return nullptr;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) return std::nan("");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

BenchMatrix load_bench_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read bench matrix '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("bench matrix: malformed JSON: ") + e.what());
  }
  for (const auto& item : doc.items())
    if (item.key() != "base" && item.key() != "methods" && item.key() != "n" && item.key() != "steps")
      throw ConfigError("bench matrix: unknown key '" + item.key() + "'");
  if (!doc.contains("base") || !doc.contains("methods") || !doc.contains("n"))
    throw ConfigError("bench matrix: required keys are base, methods, n");

  BenchMatrix m;
  const auto& base = doc["base"];
  if (base.is_string()) {
    std::filesystem::path p = base.get<std::string>();
    if (p.is_relative()) p = std::filesystem::path(path).parent_path() / p;
    m.base = load_config(p.string());
  } else {
    m.base = parse_config(base.dump());
  }
  try {
    for (const auto& name : doc["methods"].get<std::vector<std::string>>()) m.methods.push_back(parse_method(name));
    m.sizes = doc["n"].get<std::vector<std::size_t>>();
    if (doc.contains("steps")) m.steps = doc["steps"].get<std::size_t>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("bench matrix: methods must be strings, n and steps non-negative integers");
  }
  if (m.methods.empty() || m.sizes.empty()) throw ConfigError("bench matrix: methods and n must be non-empty");
  return m;
}

BenchReport run_bench(const BenchMatrix& matrix) {
  BenchReport report;
  for (Method method : matrix.methods) {
    std::vector<double> xs, ys;
    for (std::size_t n : matrix.sizes) {
      SimConfig cfg = matrix.base;
      cfg.method = method;
      cfg.steps = matrix.steps;
      for (auto& ne : cfg.grid.n_elem) ne = n;
      const SimulationResult sim = run_simulation(cfg);
      BenchRow row;
      row.method = method;
      row.n = n;
      row.dofs = sim.final_state.size();
      row.steps = matrix.steps;
      double modes = 0.0;
      for (const auto& r : sim.trace) {
        if (r.step == 0) continue;
        row.total_solve_ms += r.solve_ms;
        row.total_assembly_ms += r.assembly_ms;
        modes += static_cast<double>(r.modes);
        row.max_modes = std::max(row.max_modes, r.modes);
        if (r.method == "cfe" && (method == Method::actd || method == Method::ctd)) ++row.fallbacks;
      }
      row.mean_modes = matrix.steps ? modes / static_cast<double>(matrix.steps) : 0.0;
      row.final_energy = sim.trace.back().energy;
      report.rows.push_back(row);
      xs.push_back(static_cast<double>(n));
      ys.push_back(std::max(row.mean_solve_ms(), 1e-9));
    }
    report.slopes.emplace_back(method, loglog_slope(xs, ys));
  }
  return report;
}

void write_bench_report(const BenchReport& report, const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream csv(std::filesystem::path(dir) / "bench.csv");
  if (!csv) throw std::runtime_error("cannot write bench.csv in '" + dir + "'");
  csv.precision(10);
  csv << "method,n,dofs,steps,total_solve_ms,mean_solve_ms,total_assembly_ms,mean_modes,max_modes,fallbacks,"
         "final_energy\n";
  for (const auto& r : report.rows)
    csv << to_string(r.method) << ',' << r.n << ',' << r.dofs << ',' << r.steps << ',' << r.total_solve_ms << ','
        << r.mean_solve_ms() << ',' << r.total_assembly_ms << ',' << r.mean_modes << ',' << r.max_modes << ','
        << r.fallbacks << ',' << r.final_energy << '\n';

  std::ofstream md(std::filesystem::path(dir) / "bench.md");
  if (!md) throw std::runtime_error("cannot write bench.md in '" + dir + "'");
  md << "| method | n | DoFs | steps | solve ms (total) | solve ms / step | assembly ms (total) | mean modes |\n";
  md << "|---|---|---|---|---|---|---|---|\n";
  md.setf(std::ios::fixed);
  md.precision(2);
  for (const auto& r : report.rows)
    md << "| " << to_string(r.method) << " | " << r.n << " | " << r.dofs << " | " << r.steps << " | "
       << r.total_solve_ms << " | " << r.mean_solve_ms() << " | " << r.total_assembly_ms << " | " << r.mean_modes
       << " |\n";
  md << "\n| method | log-log slope of solve time vs n |\n|---|---|\n";
  md.precision(3);
  for (const auto& [m, s] : report.slopes) md << "| " << to_string(m) << " | " << s << " |\n";
}

}  // namespace ctd
