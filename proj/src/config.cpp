#include "ctd/config.hpp"

#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ctd/errors.hpp"

namespace ctd {

namespace {

using nlohmann::json;

// Accessor that rejects unknown keys and reports full key paths.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(where() + "expected an object");
  }

  template <typename T>
  void read(const std::string& key, T& out) {
    seen_.insert(key);
    if (!node_.contains(key)) return;
    try {
      out = node_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(name(key) + ": wrong type");
    }
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return node_.contains(key);
  }

  Section child(const std::string& key) {
    seen_.insert(key);
    return Section(node_.at(key), name(key));
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return node_.at(key);
  }

  std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& item : node_.items())
      if (!seen_.count(item.key())) throw ConfigError("unknown key '" + name(item.key()) + "'");
  }

 private:
  std::string where() const { return path_.empty() ? "" : path_ + ": "; }
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

ModeInit parse_init(const std::string& s) {
  if (s == "ones") return ModeInit::ones;
  if (s == "random") return ModeInit::random;
  throw ConfigError("solver.init: expected 'ones' or 'random'");
}

WEvaluation parse_w_eval(const std::string& s) {
  if (s == "nodal") return WEvaluation::nodal;
  if (s == "quadrature") return WEvaluation::quadrature;
  throw ConfigError("coupling.w_eval: expected 'nodal' or 'quadrature'");
}

}  // namespace

SimConfig parse_config(const std::string& text) {
  json doc;
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    doc = json::object();
  } else {
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
  }
  if (!doc.is_object()) throw ConfigError("top level: expected an object");
  std::string missing;
  for (const char* key : {"grid", "physics"})
    if (!doc.contains(key)) missing += (missing.empty() ? "" : ", ") + std::string(key);
  if (!missing.empty()) throw ConfigError("missing required keys: " + missing);

  SimConfig cfg;
  Section top(doc, "");

  {
    Section g = top.child("grid");
    if (!g.has("n_elem")) throw ConfigError("missing required key 'grid.n_elem'");
    g.read("n_elem", cfg.grid.n_elem);
    cfg.grid.extent.assign(cfg.grid.n_elem.size(), 5.0);
    g.read("extent", cfg.grid.extent);
    g.read("origin", cfg.grid.origin);
    g.finish();
  }
  if (top.has("method")) {
    std::string m;
    top.read("method", m);
    cfg.method = parse_method(m);
  }
  {
    Section p = top.child("physics");
    p.read("L", cfg.physics.mobility);
    p.read("kappa", cfg.physics.kappa);
    p.read("a0", cfg.physics.a0);
    p.read("alpha", cfg.physics.alpha);
    p.read("dt", cfg.physics.dt);
    p.read("T", cfg.physics.final_time);
    if (p.has("steps")) {
      std::size_t steps = 0;
      p.read("steps", steps);
      cfg.steps = steps;
    }
    p.finish();
  }
  if (top.has("basis")) {
    Section b = top.child("basis");
    b.read("p", cfg.cfe.p);
    b.read("s", cfg.cfe.s);
    b.read("a", cfg.cfe.a);
    b.read("quad_points", cfg.quad_points);
    b.finish();
  }
  if (top.has("solver")) {
    Section s = top.child("solver");
    s.read("eps1", cfg.solver.eps1);
    s.read("eps2", cfg.solver.eps2);
    s.read("max_sweeps", cfg.solver.max_sweeps);
    s.read("max_modes", cfg.solver.max_modes);
    if (s.has("mode_cap") && !s.raw("mode_cap").is_null()) s.read("mode_cap", cfg.solver.mode_cap);
    if (s.has("init")) {
      std::string init;
      s.read("init", init);
      cfg.solver.init = parse_init(init);
    }
    s.read("init_seed", cfg.solver.init_seed);
    s.read("recompress", cfg.solver.recompress);
    s.finish();
  }
  if (top.has("coupling")) {
    Section c = top.child("coupling");
    if (c.has("strategy")) {
      std::string strategy;
      c.read("strategy", strategy);
      cfg.coupling.strategy = parse_coupling_strategy(strategy);
    }
    c.read("svd_tol", cfg.coupling.svd_tol);
    c.read("reduced_threshold", cfg.coupling.reduced_rel_threshold);
    if (c.has("w_eval")) {
      std::string w;
      c.read("w_eval", w);
      cfg.coupling.w_eval = parse_w_eval(w);
    }
    c.finish();
  }
  if (top.has("pcg")) {
    Section p = top.child("pcg");
    p.read("tol", cfg.pcg.tol);
    p.read("max_iter", cfg.pcg.max_iter);
    p.finish();
  }
  if (top.has("initial_condition")) {
    Section i = top.child("initial_condition");
    i.read("seed", cfg.initial.seed);
    i.read("lo", cfg.initial.lo);
    i.read("hi", cfg.initial.hi);
    i.finish();
  }
  if (top.has("output")) {
    Section o = top.child("output");
    o.read("dir", cfg.output.dir);
    o.read("snapshot_stride", cfg.output.snapshot_stride);
    o.read("formats", cfg.output.formats);
    o.read("pgm", cfg.output.pgm);
    o.finish();
    for (const auto& f : cfg.output.formats)
      if (f != "csv" && f != "vtk" && f != "modes") throw ConfigError("output.formats: unknown format '" + f + "'");
  }
  if (top.has("alpha_range")) {
    std::vector<double> range;
    top.read("alpha_range", range);
    if (range.size() != 2 || !(range[0] < range[1]))
      throw ConfigError("alpha_range: expected [lo, hi] with lo < hi");
    cfg.alpha_range_lo = range[0];
    cfg.alpha_range_hi = range[1];
  }
  top.finish();

  if (cfg.initial.lo > cfg.initial.hi) throw ConfigError("initial_condition: lo exceeds hi");
  if (cfg.quad_points < 2) throw ConfigError("basis.quad_points must be at least 2");
  if (cfg.coupling.svd_tol < 0.0) throw ConfigError("coupling.svd_tol must be non-negative");
  if (cfg.coupling.reduced_rel_threshold < 0.0) throw ConfigError("coupling.reduced_threshold must be non-negative");
  if (!(cfg.pcg.tol > 0.0)) throw ConfigError("pcg.tol must be positive");
  validate(cfg.cfe);
  validate(cfg.physics);
  validate(cfg.solver);
  make_grid(cfg.grid);
  return cfg;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_json(const SimConfig& c) {
  json doc;
  doc["grid"] = {{"n_elem", c.grid.n_elem}, {"extent", c.grid.extent}};
  doc["grid"]["origin"] = c.grid.origin.empty() ? std::vector<double>(c.grid.n_elem.size(), 0.0) : c.grid.origin;
  doc["method"] = to_string(c.method);
  doc["physics"] = {{"L", c.physics.mobility}, {"kappa", c.physics.kappa}, {"a0", c.physics.a0},
                    {"alpha", c.physics.alpha}, {"dt", c.physics.dt},        {"T", c.physics.final_time},
                    {"steps", c.step_count()}};
  doc["basis"] = {{"p", c.cfe.p}, {"s", c.cfe.s}, {"a", c.cfe.a}, {"quad_points", c.quad_points}};
  doc["solver"] = {{"eps1", c.solver.eps1},
                   {"eps2", c.solver.eps2},
                   {"max_sweeps", c.solver.max_sweeps},
                   {"max_modes", c.solver.max_modes},
                   {"init", c.solver.init == ModeInit::ones ? "ones" : "random"},
                   {"init_seed", c.solver.init_seed},
                   {"recompress", c.solver.recompress}};
  if (c.solver.mode_cap == std::numeric_limits<std::size_t>::max())
    doc["solver"]["mode_cap"] = nullptr;
  else
    doc["solver"]["mode_cap"] = c.solver.mode_cap;
  doc["coupling"] = {{"strategy", to_string(c.coupling.strategy)},
                     {"svd_tol", c.coupling.svd_tol},
                     {"reduced_threshold", c.coupling.reduced_rel_threshold},
                     {"w_eval", c.coupling.w_eval == WEvaluation::nodal ? "nodal" : "quadrature"}};
  doc["pcg"] = {{"tol", c.pcg.tol}, {"max_iter", c.pcg.max_iter}};
  doc["initial_condition"] = {{"seed", c.initial.seed}, {"lo", c.initial.lo}, {"hi", c.initial.hi}};
  doc["output"] = {{"dir", c.output.dir},
                   {"snapshot_stride", c.output.snapshot_stride},
                   {"formats", c.output.formats},
                   {"pgm", c.output.pgm}};
  doc["alpha_range"] = {c.alpha_range_lo, c.alpha_range_hi};
  return doc.dump(2) + "\n";
}

}  // namespace ctd
