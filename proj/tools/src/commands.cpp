#include "wrfm_cli/commands.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "wrfm/benchmarks.hpp"
#include "wrfm/errors.hpp"
#include "wrfm/validation.hpp"
#include "wrfm_cli/config.hpp"

#ifndef WRFM_VERSION
#define WRFM_VERSION "unknown"
#endif

namespace wrfm::cli {

namespace {

struct Prepared {
  RunConfig resolved;
  ProblemSpec problem;
};

/// Load, apply overrides, resolve and validate. Throws ConfigError.
Prepared prepare(const CommandOptions& options) {
  RunConfig cfg = load_config(options.config_path);
  if (options.seed) cfg.solver.seed = *options.seed;
  if (options.pipeline) cfg.solver.pipeline = *options.pipeline;
  if (options.output) cfg.output = options.output;
  check_pipeline(cfg, options.config_path);
  try {
    ProblemSpec problem = make_problem(cfg);
    RunConfig resolved = resolve(cfg, problem);
    resolved.solver.validate(problem.dim());
    return {std::move(resolved), std::move(problem)};
  } catch (const wrfm::InvalidArgument& e) {
    throw ConfigError(options.config_path, 0, e.what());
  } catch (const wrfm::UnsupportedConfiguration& e) {
    throw ConfigError(options.config_path, 0, e.what());
  }
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

nlohmann::ordered_json manifest(const Prepared& p) {
  nlohmann::ordered_json m;
  m["version"] = WRFM_VERSION;
  m["config"] = to_json(p.resolved, p.problem.dim());
  return m;
}

bool write_file(const std::string& path, const std::string& text, std::ostream& err) {
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << text)) {
    err << "error: cannot write " << path << "\n";
    return false;
  }
  return true;
}

void dump_system(const Prepared& p, const std::string& path) {
  const SolverConfig& c = p.resolved.solver;
  const int dim = p.problem.dim();
  const Decomposition dec = decompose(p.problem.domain.bounding(),
                                      std::span<const int>(c.subdomains.data(), dim));
  const auto bases = sample_bases(dec, c);
  AssembledSystem system = build_system(p.problem, c, dec, bases);
  system = rescale_rows(std::move(system), c.rescale);
  apply_category_weights(system, c.weights);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw wrfm::InvalidInput("cannot open dump file " + path);
  write_system(system, f);
}

}  // namespace

int cmd_run(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  std::optional<Prepared> prepared;
  try {
    prepared = prepare(options);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  const Prepared& p = *prepared;

  nlohmann::ordered_json record;
  try {
    const SolveResult result = solve_problem(p.problem, p.resolved.solver);
    const MetricsReport m = metrics(result.model, p.problem, p.resolved.metric_grid);
    record["problem"] = p.problem.name;
    record["pipeline"] = std::string(to_string(p.resolved.solver.pipeline));
    record["M"] = result.model.num_columns();
    record["rows"] = result.rows;
    record["seed"] = p.resolved.solver.seed;
    record["time_s"] = result.report.wall_time_s;
    record["l2"] = m.l2;
    record["linf"] = m.linf;
    record["rank"] = result.report.effective_rank;
    record["residual"] = result.report.residual_norm;
    record["sigma_max"] = result.report.sigma_max;
    record["sigma_min_retained"] = result.report.sigma_min_retained;
    record["metric_points"] = m.points;
    record["warnings"] = result.warnings;
    record["manifest"] = manifest(p);
    if (options.dump) dump_system(p, *options.dump);
  } catch (const std::exception& e) {
    err << "solver error: " << e.what() << "\n";
    return kSolverError;
  }

  const std::string text = record.dump(2) + "\n";
  std::ostream* summary = &out;
  if (p.resolved.output) {
    if (!write_file(*p.resolved.output, text, err)) return kSolverError;
  } else {
    out << text;
    summary = &err;
  }
  if (!options.quiet)
    *summary << record["problem"].get<std::string>() << " M=" << record["M"].get<int>()
             << " rows=" << record["rows"].get<long>()
             << " time_s=" << fmt("%.3f", record["time_s"].get<double>())
             << " L2=" << fmt("%.4e", record["l2"].get<double>())
             << " Linf=" << fmt("%.4e", record["linf"].get<double>()) << "\n";
  return kOk;
}

int cmd_sweep(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  std::optional<Prepared> prepared;
  try {
    prepared = prepare(options);
    if (!prepared->resolved.sweep)
      throw ConfigError(options.config_path, 0, "config has no 'sweep' section");
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  const Prepared& p = *prepared;

  std::ostringstream csv;
  try {
    const SweepSpec& sw = *p.resolved.sweep;
    SweepOptions so;
    so.repeats = sw.repeats;
    so.metric_grid = p.resolved.metric_grid;
    const auto rows = sensitivity_sweep(p.problem, p.resolved.solver, sw.s_values, sw.j_values, so);
    csv << kCsvHeader << "\n";
    for (const auto& r : rows) {
      csv << r.subdomains << ',' << r.features << ',' << r.parameters << ',' << r.repeats << ','
          << fmt("%.10g", r.l2_mean) << ',' << fmt("%.10g", r.l2_std) << ','
          << fmt("%.10g", r.linf_mean) << ',' << fmt("%.10g", r.linf_std) << ','
          << fmt("%.6g", r.time_mean_s) << "\n";
      if (!options.quiet)
        err << "S=" << r.subdomains << " J=" << r.features << " L2=" << fmt("%.4e", r.l2_mean)
            << " +- " << fmt("%.2e", r.l2_std) << "\n";
    }
  } catch (const std::exception& e) {
    err << "solver error: " << e.what() << "\n";
    return kSolverError;
  }

  if (p.resolved.output) {
    if (!write_file(*p.resolved.output, csv.str(), err)) return kSolverError;
    if (!write_file(*p.resolved.output + ".manifest.json", manifest(p).dump(2) + "\n", err))
      return kSolverError;
  } else {
    out << csv.str();
  }
  return kOk;
}

int cmd_validate(const ValidateOptions& options, std::ostream& out, std::ostream& err) {
  ValidationOptions vo;
  vo.suites = options.suites;
  vo.quadrature_weight_scale = options.quadrature_weight_scale;
  std::vector<SuiteResult> results;
  try {
    results = run_validation(vo);
  } catch (const wrfm::InvalidArgument& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  int passed = 0;
  for (const auto& r : results) {
    passed += r.passed;
    if (!options.quiet || !r.passed)
      out << (r.passed ? "PASS " : "FAIL ") << r.name << " worst=" << fmt("%.3e", r.worst)
          << " tol=" << fmt("%.1e", r.tolerance) << " time_s=" << fmt("%.2f", r.seconds)
          << " " << r.detail << "\n";
  }
  out << passed << " of " << results.size() << " suites passed\n";
  return passed == static_cast<int>(results.size()) ? kOk : kValidationFailure;
}

}  // namespace wrfm::cli
