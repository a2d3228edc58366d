#include "ctd/snapshot_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace ctd {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out.precision(17);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  return in;
}

[[noreturn]] void malformed(const std::string& path, const std::string& what) {
  throw std::runtime_error("malformed file '" + path + "': " + what);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

std::vector<double> numbers_after(const std::vector<std::string>& parts, const std::string& path) {
  std::vector<double> out;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    try {
      out.push_back(std::stod(parts[i]));
    } catch (const std::exception&) {
      malformed(path, "bad number '" + parts[i] + "'");
    }
  }
  return out;
}

Grid grid_from(const std::vector<double>& nodes, const std::vector<double>& spacing,
               const std::vector<double>& origin) {
  std::vector<Axis1D> axes;
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    const auto n_elem = static_cast<std::size_t>(nodes[a]) - 1;
    axes.emplace_back(origin[a], spacing[a] * static_cast<double>(n_elem), n_elem);
  }
  return Grid(std::move(axes));
}

}  // namespace

void write_csv(const FullField& field, double time, const std::string& path) {
  auto out = open_out(path);
  const Grid& g = field.grid();
  out << "dims," << g.dim() << "\nnodes";
  for (const auto& a : g.axes()) out << ',' << a.n_node();
  out << "\nspacing";
  for (const auto& a : g.axes()) out << ',' << a.h();
  out << "\norigin";
  for (const auto& a : g.axes()) out << ',' << a.origin();
  out << "\ntime," << time << "\nvalue\n";
  for (double v : field.values()) out << v << '\n';
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

Snapshot read_csv(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  std::vector<std::vector<double>> header;
  const char* keys[] = {"dims", "nodes", "spacing", "origin", "time"};
  for (const char* key : keys) {
    if (!std::getline(in, line)) malformed(path, "truncated header");
    const auto parts = split(line, ',');
    if (parts.empty() || parts[0] != key) malformed(path, std::string("expected '") + key + "' line");
    header.push_back(numbers_after(parts, path));
  }
  if (!std::getline(in, line) || line != "value") malformed(path, "expected 'value' line");
  const Grid grid = grid_from(header[1], header[2], header[3]);
  std::vector<double> values;
  values.reserve(grid.total_nodes());
  while (std::getline(in, line))
    if (!line.empty()) values.push_back(std::stod(line));
  if (values.size() != grid.total_nodes()) malformed(path, "value count does not match the node counts");
  return {FullField(grid, std::move(values)), header[4].at(0)};
}

void write_vtk(const FullField& field, double time, const std::string& path) {
  auto out = open_out(path);
  const Grid& g = field.grid();
  auto axis_or = [&](std::size_t a, auto get, double fallback) { return a < g.dim() ? get(g.axis(a)) : fallback; };
  out << "# vtk DataFile Version 3.0\n";
  out << "ctd field t=" << time << "\n";
  out << "ASCII\nDATASET STRUCTURED_POINTS\n";
  out << "DIMENSIONS";
  for (std::size_t a = 0; a < 3; ++a) out << ' ' << axis_or(a, [](const Axis1D& x) { return double(x.n_node()); }, 1.0);
  out << "\nORIGIN";
  for (std::size_t a = 0; a < 3; ++a) out << ' ' << axis_or(a, [](const Axis1D& x) { return x.origin(); }, 0.0);
  out << "\nSPACING";
  for (std::size_t a = 0; a < 3; ++a) out << ' ' << axis_or(a, [](const Axis1D& x) { return x.h(); }, 1.0);
  out << "\nPOINT_DATA " << field.size() << "\nSCALARS u double 1\nLOOKUP_TABLE default\n";
  for (double v : field.values()) out << v << '\n';
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

Snapshot read_vtk(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# vtk DataFile", 0) != 0) malformed(path, "missing VTK signature");
  std::getline(in, line);
  double time = 0.0;
  if (const auto pos = line.find("t="); pos != std::string::npos) time = std::stod(line.substr(pos + 2));
  std::string token;
  in >> token;
  if (token != "ASCII") malformed(path, "only ASCII files are supported");
  std::vector<double> dims(3), origin(3), spacing(3);
  std::size_t count = 0;
  while (in >> token) {
    if (token == "DATASET") {
      in >> token;
      if (token != "STRUCTURED_POINTS") malformed(path, "dataset is not STRUCTURED_POINTS");
    } else if (token == "DIMENSIONS") {
      in >> dims[0] >> dims[1] >> dims[2];
    } else if (token == "ORIGIN") {
      in >> origin[0] >> origin[1] >> origin[2];
    } else if (token == "SPACING" || token == "ASPECT_RATIO") {
      in >> spacing[0] >> spacing[1] >> spacing[2];
    } else if (token == "POINT_DATA") {
      in >> count;
    } else if (token == "SCALARS") {
      std::getline(in, line);
    } else if (token == "LOOKUP_TABLE") {
      in >> token;
      break;
    }
  }
  const std::size_t d = dims[2] > 1 ? 3 : 2;
  dims.resize(d);
  origin.resize(d);
  spacing.resize(d);
  const Grid grid = grid_from(dims, spacing, origin);
  if (count != grid.total_nodes()) malformed(path, "POINT_DATA does not match DIMENSIONS");
  std::vector<double> values(count);
  for (double& v : values)
    if (!(in >> v)) malformed(path, "truncated scalar data");
  return {FullField(grid, std::move(values)), time};
}

void write_modes(const SeparatedField& field, double time, const std::string& path) {
  auto out = open_out(path);
  const Grid& g = field.grid();
  out << "ctd-modes 1\ndims " << g.dim() << "\nmodes " << field.mode_count() << "\ntime " << time << '\n';
  for (std::size_t a = 0; a < g.dim(); ++a)
    out << "axis " << a << ' ' << g.axis(a).origin() << ' ' << g.axis(a).extent() << ' ' << g.axis(a).n_elem() << '\n';
  for (std::size_t m = 0; m < field.mode_count(); ++m) {
    for (std::size_t a = 0; a < g.dim(); ++a) {
      const auto& f = field.mode(m).factors[a];
      for (std::size_t i = 0; i < f.size(); ++i) out << (i ? " " : "") << f[i];
      out << '\n';
    }
  }
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

SeparatedField read_modes(const std::string& path, double* time) {
  auto in = open_in(path);
  std::string tag;
  int version = 0;
  std::size_t dims = 0, modes = 0;
  double t = 0.0;
  if (!(in >> tag >> version) || tag != "ctd-modes" || version != 1) malformed(path, "missing 'ctd-modes 1' signature");
  if (!(in >> tag >> dims) || tag != "dims" || (dims != 2 && dims != 3)) malformed(path, "bad 'dims' line");
  if (!(in >> tag >> modes) || tag != "modes") malformed(path, "bad 'modes' line");
  if (!(in >> tag >> t) || tag != "time") malformed(path, "bad 'time' line");
  std::vector<Axis1D> axes;
  for (std::size_t a = 0; a < dims; ++a) {
    std::size_t index = 0, n_elem = 0;
    double origin = 0.0, extent = 0.0;
    if (!(in >> tag >> index >> origin >> extent >> n_elem) || tag != "axis" || index != a)
      malformed(path, "bad 'axis' line");
    axes.emplace_back(origin, extent, n_elem);
  }
  SeparatedField field{Grid(std::move(axes))};
  for (std::size_t m = 0; m < modes; ++m) {
    RankOne term;
    for (std::size_t a = 0; a < dims; ++a) {
      std::vector<double> f(field.grid().axis(a).n_node());
      for (double& v : f)
        if (!(in >> v)) malformed(path, "truncated mode data");
      term.factors.push_back(std::move(f));
    }
    field.add_mode(std::move(term));
  }
  if (time != nullptr) *time = t;
  return field;
}

void write_pgm(const FullField& field, const std::string& path) {
  const Grid& g = field.grid();
  const std::size_t nx = g.axis(0).n_node(), ny = g.axis(1).n_node();
  const std::size_t offset = g.dim() == 3 ? (g.axis(2).n_node() / 2) * nx * ny : 0;
  const auto slice = field.values().subspan(offset, nx * ny);
  const auto [lo, hi] = std::minmax_element(slice.begin(), slice.end());
  const double range = *hi - *lo;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "P5\n" << nx << ' ' << ny << "\n255\n";
  // PGM rows run top to bottom, so write y descending.
  for (std::size_t j = ny; j-- > 0;) {
    for (std::size_t i = 0; i < nx; ++i) {
      const double v = range > 0.0 ? (slice[j * nx + i] - *lo) / range : 0.5;
      out.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * v))));
    }
  }
}

Snapshot read_snapshot(const std::string& path) {
  auto ends_with = [&](const std::string& ext) {
    return path.size() >= ext.size() && path.compare(path.size() - ext.size(), ext.size(), ext) == 0;
  };
  if (ends_with(".csv")) return read_csv(path);
  if (ends_with(".vtk")) return read_vtk(path);
  if (ends_with(".modes")) {
    double t = 0.0;
    SeparatedField f = read_modes(path, &t);
    return {reconstruct(f), t};
  }
  throw std::runtime_error("unrecognized snapshot extension for '" + path + "' (expected .csv, .vtk or .modes)");
}

void write_energy_trace(const EnergyTrace& trace, const std::string& path) {
  auto out = open_out(path);
  out << "step,time,energy,modes,method,wall_ms,solve_ms,assembly_ms\n";
  for (const auto& r : trace)
    out << r.step << ',' << r.time << ',' << r.energy << ',' << r.modes << ',' << r.method << ',' << r.wall_ms << ','
        << r.solve_ms << ',' << r.assembly_ms << '\n';
}

void write_mode_counts(const EnergyTrace& trace, const std::string& path) {
  auto out = open_out(path);
  out << "step,modes,method\n";
  for (const auto& r : trace)
    if (r.step > 0) out << r.step << ',' << r.modes << ',' << r.method << '\n';
}

}  // namespace ctd
