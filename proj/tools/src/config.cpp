#include "wrfm_cli/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "wrfm/errors.hpp"

namespace wrfm::cli {

namespace {

std::string anchor(const std::string& source, int line) {
  return line > 0 ? source + ":" + std::to_string(line) + ": " : source + ": ";
}

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& message) const {
    throw ConfigError(source_, node.Mark().line + 1, message);
  }

  void require_map(const YAML::Node& node, const std::string& what) const {
    if (!node.IsMap()) fail(node, what + " must be a mapping");
  }

  void check_keys(const YAML::Node& node, const std::set<std::string>& allowed,
                  const std::string& where) const {
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.contains(key)) fail(kv.first, "unknown key '" + key + "' in " + where);
    }
  }

  template <typename T>
  T scalar(const YAML::Node& node, const std::string& key) const {
    if (!node.IsScalar()) fail(node, "'" + key + "' must be a scalar");
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      fail(node, "'" + key + "' has an invalid value '" + node.Scalar() + "'");
    }
  }

  int positive(const YAML::Node& node, const std::string& key) const {
    const int v = scalar<int>(node, key);
    if (v < 1) fail(node, "'" + key + "' must be positive");
    return v;
  }

  /// A positive count or a list with one count per axis.
  MultiIndex per_axis(const YAML::Node& node, const std::string& key, int dim) const {
    MultiIndex out{1, 1, 1};
    if (node.IsScalar()) {
      const int v = positive(node, key);
      for (int i = 0; i < dim; ++i) out[i] = v;
      return out;
    }
    if (!node.IsSequence()) fail(node, "'" + key + "' must be an integer or a list");
    if (static_cast<int>(node.size()) != dim)
      fail(node, "'" + key + "' needs " + std::to_string(dim) + " entries");
    for (int i = 0; i < dim; ++i) out[i] = positive(node[i], key);
    return out;
  }

  std::vector<double> reals(const YAML::Node& node, const std::string& key) const {
    if (!node.IsSequence()) fail(node, "'" + key + "' must be a list");
    std::vector<double> v;
    for (const auto& item : node) v.push_back(scalar<double>(item, key));
    return v;
  }

  std::vector<int> counts(const YAML::Node& node, const std::string& key) const {
    if (!node.IsSequence() || node.size() == 0) fail(node, "'" + key + "' must be a non-empty list");
    std::vector<int> v;
    for (const auto& item : node) v.push_back(positive(item, key));
    return v;
  }

  template <typename Parse>
  auto named(const YAML::Node& node, const std::string& key, Parse parse) const {
    const auto text = scalar<std::string>(node, key);
    try {
      return parse(text);
    } catch (const wrfm::Error& e) {
      fail(node, e.what());
    }
  }

  const std::string& source() const { return source_; }

 private:
  std::string source_;
};

Exclusion parse_exclusion(const Reader& rd, const YAML::Node& node, int dim) {
  rd.require_map(node, "an exclusion");
  if (node.size() != 1) rd.fail(node, "an exclusion has exactly one of 'disk' or 'box'");
  if (const auto disk = node["disk"]) {
    rd.require_map(disk, "'disk'");
    rd.check_keys(disk, {"center", "radius"}, "disk");
    if (dim != 2) rd.fail(disk, "disks need a two-dimensional problem");
    if (!disk["center"] || !disk["radius"]) rd.fail(disk, "disk needs 'center' and 'radius'");
    const auto c = rd.reals(disk["center"], "center");
    if (c.size() != 2) rd.fail(disk["center"], "disk center needs 2 entries");
    const double r = rd.scalar<double>(disk["radius"], "radius");
    if (!(r > 0.0)) rd.fail(disk["radius"], "disk radius must be positive");
    return Disk{c[0], c[1], r};
  }
  if (const auto box = node["box"]) {
    rd.require_map(box, "'box'");
    rd.check_keys(box, {"lo", "hi"}, "box");
    if (!box["lo"] || !box["hi"]) rd.fail(box, "box needs 'lo' and 'hi'");
    const auto lo = rd.reals(box["lo"], "lo");
    const auto hi = rd.reals(box["hi"], "hi");
    if (static_cast<int>(lo.size()) != dim || static_cast<int>(hi.size()) != dim)
      rd.fail(box, "box corners need " + std::to_string(dim) + " entries");
    try {
      return AxisBox::make(lo, hi);
    } catch (const wrfm::Error& e) {
      rd.fail(box, e.what());
    }
  }
  rd.fail(node, "an exclusion has exactly one of 'disk' or 'box'");
}

void parse_problem(const Reader& rd, const YAML::Node& node, RunConfig& cfg) {
  if (node.IsScalar()) {
    cfg.problem = rd.scalar<std::string>(node, "problem");
  } else {
    rd.require_map(node, "'problem'");
    rd.check_keys(node, {"name", "helmholtz_lambda", "heat_rate", "exclusions"}, "problem");
    if (!node["name"]) rd.fail(node, "'problem' needs a 'name'");
    cfg.problem = rd.scalar<std::string>(node["name"], "name");
    if (node["helmholtz_lambda"])
      cfg.parameters.helmholtz_lambda = rd.scalar<double>(node["helmholtz_lambda"], "helmholtz_lambda");
    if (node["heat_rate"]) {
      cfg.parameters.heat_rate = rd.scalar<double>(node["heat_rate"], "heat_rate");
      if (!(*cfg.parameters.heat_rate > 0.0)) rd.fail(node["heat_rate"], "'heat_rate' must be positive");
    }
  }
  const auto names = builtin_names();
  if (std::find(names.begin(), names.end(), cfg.problem) == names.end())
    rd.fail(node.IsMap() ? node["name"] : node, "unknown problem '" + cfg.problem + "'");
  if (node.IsMap() && node["exclusions"]) {
    const auto& ex = node["exclusions"];
    if (!ex.IsSequence()) rd.fail(ex, "'exclusions' must be a list");
    const int dim = builtin(cfg.problem).dim();
    std::vector<Exclusion> list;
    for (const auto& item : ex) list.push_back(parse_exclusion(rd, item, dim));
    cfg.parameters.exclusions = std::move(list);
  }
}

void parse_hyperparameters(const Reader& rd, const YAML::Node& node, int dim, RunConfig& cfg) {
  rd.require_map(node, "'hyperparameters'");
  rd.check_keys(node,
                {"subdomains", "features_per_subdomain", "test_functions", "boundary_partitions",
                 "interface_partitions", "interior_partitions", "quadrature_order",
                 "feature_range", "activation", "pou", "pou_alpha", "window", "window_alpha",
                 "hole_quadrature", "rcond", "rescale", "weights"},
                "hyperparameters");
  SolverConfig& s = cfg.solver;
  if (const auto n = node["subdomains"]) s.subdomains = rd.per_axis(n, "subdomains", dim);
  if (const auto n = node["features_per_subdomain"])
    s.features = rd.positive(n, "features_per_subdomain");
  if (const auto n = node["test_functions"]) s.tests = rd.per_axis(n, "test_functions", dim);
  if (const auto n = node["boundary_partitions"])
    s.boundary_partitions = rd.per_axis(n, "boundary_partitions", dim);
  if (const auto n = node["interface_partitions"])
    s.interface_partitions = rd.per_axis(n, "interface_partitions", dim);
  if (const auto n = node["interior_partitions"])
    s.interior_partitions = rd.per_axis(n, "interior_partitions", dim);
  if (const auto n = node["quadrature_order"]) {
    if (!(n.IsScalar() && n.Scalar() == "auto")) {
      s.quadrature_order = rd.per_axis(n, "quadrature_order", dim);
      for (int i = 0; i < dim; ++i)
        if (s.quadrature_order[i] > kMaxGaussOrder)
          rd.fail(n, "'quadrature_order' must be at most 256");
    }
  }
  if (const auto n = node["feature_range"]) {
    s.feature_range = rd.scalar<double>(n, "feature_range");
    if (!(*s.feature_range > 0.0)) rd.fail(n, "'feature_range' must be positive");
  }
  if (const auto n = node["activation"]) s.activation = rd.named(n, "activation", parse_activation);
  if (const auto n = node["pou"]) {
    s.pou.kind = rd.named(n, "pou", parse_pou);
    cfg.pou_line = n.Mark().line + 1;
  }
  if (const auto n = node["pou_alpha"]) {
    s.pou.alpha = rd.scalar<double>(n, "pou_alpha");
    if (!(s.pou.alpha > 0.0)) rd.fail(n, "'pou_alpha' must be positive");
  }
  if (const auto n = node["window"]) s.window.kind = rd.named(n, "window", parse_window);
  if (const auto n = node["window_alpha"]) {
    s.window.alpha = rd.scalar<double>(n, "window_alpha");
    if (!(s.window.alpha > 0.0)) rd.fail(n, "'window_alpha' must be positive");
  }
  if (const auto n = node["hole_quadrature"])
    s.hole_quadrature = rd.named(n, "hole_quadrature", parse_hole_quadrature);
  if (const auto n = node["rcond"]) {
    s.rcond = rd.scalar<double>(n, "rcond");
    if (!(*s.rcond >= 0.0)) rd.fail(n, "'rcond' must be non-negative");
  }
  if (const auto n = node["rescale"]) s.rescale = rd.named(n, "rescale", parse_rescale);
  if (const auto n = node["weights"]) {
    rd.require_map(n, "'weights'");
    rd.check_keys(n, {"weak", "boundary", "interface"}, "weights");
    if (n["weak"]) s.weights.weak = rd.scalar<double>(n["weak"], "weak");
    if (n["boundary"]) s.weights.boundary = rd.scalar<double>(n["boundary"], "boundary");
    if (n["interface"]) s.weights.interface = rd.scalar<double>(n["interface"], "interface");
  }
}

nlohmann::ordered_json axes(const MultiIndex& m, int dim) {
  auto a = nlohmann::ordered_json::array();
  for (int i = 0; i < dim; ++i) a.push_back(m[i]);
  return a;
}

}  // namespace

void check_pipeline(const RunConfig& config, const std::string& source) {
  if (config.solver.pipeline == Pipeline::weak && config.solver.pou.kind != PouKind::psi_a)
    throw ConfigError(source, config.pou_line, "the weak pipeline requires pou = psi_a");
}

ConfigError::ConfigError(const std::string& source, int line, const std::string& message)
    : std::runtime_error(anchor(source, line) + message), line_(line) {}

RunConfig parse_config(const std::string& text, const std::string& source) {
  const Reader rd(source);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(source, e.mark.line + 1, e.msg);
  }
  if (!root.IsMap()) throw ConfigError(source, root.Mark().line + 1, "config must be a mapping");
  rd.check_keys(root,
                {"problem", "pipeline", "seed", "output", "hyperparameters", "metric_grid",
                 "sweep"},
                "config");
  RunConfig cfg;
  if (!root["problem"]) throw ConfigError(source, 1, "missing required key 'problem'");
  parse_problem(rd, root["problem"], cfg);
  const int dim = builtin(cfg.problem).dim();

  if (const auto n = root["pipeline"]) cfg.solver.pipeline = rd.named(n, "pipeline", parse_pipeline);
  if (const auto n = root["seed"]) cfg.solver.seed = rd.scalar<std::uint64_t>(n, "seed");
  if (const auto n = root["output"]) cfg.output = rd.scalar<std::string>(n, "output");
  if (const auto n = root["hyperparameters"]) parse_hyperparameters(rd, n, dim, cfg);
  if (const auto n = root["metric_grid"]) {
    cfg.metric_grid = rd.per_axis(n, "metric_grid", dim);
    for (int i = 0; i < dim; ++i)
      if (cfg.metric_grid[i] < 2) rd.fail(n, "'metric_grid' needs at least 2 points per axis");
  }
  if (const auto n = root["sweep"]) {
    rd.require_map(n, "'sweep'");
    rd.check_keys(n, {"S_values", "J_values", "repeats"}, "sweep");
    SweepSpec sw;
    if (!n["S_values"] || !n["J_values"]) rd.fail(n, "'sweep' needs 'S_values' and 'J_values'");
    sw.s_values = rd.counts(n["S_values"], "S_values");
    sw.j_values = rd.counts(n["J_values"], "J_values");
    if (n["repeats"]) {
      sw.repeats = rd.scalar<int>(n["repeats"], "repeats");
      if (sw.repeats < 2) rd.fail(n["repeats"], "'repeats' must be at least 2");
    }
    cfg.sweep = std::move(sw);
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, "cannot open config file");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path);
}

ProblemSpec make_problem(const RunConfig& config) {
  return builtin(config.problem, config.parameters);
}

RunConfig resolve(const RunConfig& config, const ProblemSpec& problem) {
  RunConfig r = config;
  r.solver = config.solver.resolved(problem);
  for (int i = 0; i < kMaxDim; ++i)
    if (r.metric_grid[i] == 0) r.metric_grid[i] = problem.defaults.metric_grid[i];
  if (r.problem.starts_with("helmholtz") && !r.parameters.helmholtz_lambda)
    r.parameters.helmholtz_lambda = 1.0;
  if (r.problem == "heat3d" && !r.parameters.heat_rate) r.parameters.heat_rate = 1.0;
  r.parameters.exclusions = problem.domain.exclusions();
  return r;
}

nlohmann::ordered_json to_json(const RunConfig& c, int dim) {
  using nlohmann::ordered_json;
  ordered_json problem;
  problem["name"] = c.problem;
  if (c.parameters.helmholtz_lambda) problem["helmholtz_lambda"] = *c.parameters.helmholtz_lambda;
  if (c.parameters.heat_rate) problem["heat_rate"] = *c.parameters.heat_rate;
  if (c.parameters.exclusions) {
    auto list = ordered_json::array();
    for (const auto& ex : *c.parameters.exclusions) {
      if (const auto* d = std::get_if<Disk>(&ex)) {
        list.push_back({{"disk", {{"center", {d->cx, d->cy}}, {"radius", d->radius}}}});
      } else {
        const auto& b = std::get<AxisBox>(ex);
        auto lo = ordered_json::array(), hi = ordered_json::array();
        for (int i = 0; i < b.dim; ++i) {
          lo.push_back(b.lo[i]);
          hi.push_back(b.hi[i]);
        }
        list.push_back({{"box", {{"lo", lo}, {"hi", hi}}}});
      }
    }
    problem["exclusions"] = list;
  }

  const SolverConfig& s = c.solver;
  ordered_json h;
  const auto put_axes = [&](const char* key, const MultiIndex& m) {
    if (m[0] != 0) h[key] = axes(m, dim);
  };
  put_axes("subdomains", s.subdomains);
  if (s.features != 0) h["features_per_subdomain"] = s.features;
  put_axes("test_functions", s.tests);
  put_axes("boundary_partitions", s.boundary_partitions);
  put_axes("interface_partitions", s.interface_partitions);
  put_axes("interior_partitions", s.interior_partitions);
  if (s.quadrature_order[0] != 0)
    h["quadrature_order"] = axes(s.quadrature_order, dim);
  else
    h["quadrature_order"] = "auto";
  if (s.feature_range) h["feature_range"] = *s.feature_range;
  h["activation"] = std::string(to_string(s.activation));
  h["pou"] = std::string(to_string(s.pou.kind));
  h["pou_alpha"] = s.pou.alpha;
  h["window"] = std::string(to_string(s.window.kind));
  h["window_alpha"] = s.window.alpha;
  h["hole_quadrature"] = std::string(to_string(s.hole_quadrature));
  if (s.rcond) h["rcond"] = *s.rcond;
  h["rescale"] = std::string(to_string(s.rescale));
  h["weights"] = {{"weak", s.weights.weak},
                  {"boundary", s.weights.boundary},
                  {"interface", s.weights.interface}};

  ordered_json j;
  j["problem"] = problem;
  j["pipeline"] = std::string(to_string(s.pipeline));
  j["seed"] = s.seed;
  j["hyperparameters"] = h;
  if (c.metric_grid[0] != 0) j["metric_grid"] = axes(c.metric_grid, dim);
  if (c.sweep)
    j["sweep"] = {{"S_values", c.sweep->s_values},
                  {"J_values", c.sweep->j_values},
                  {"repeats", c.sweep->repeats}};
  return j;
}

}  // namespace wrfm::cli
