#include <iostream>

#include <CLI11.hpp>

#include "wrfm/errors.hpp"
#include "wrfm_cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace wrfm::cli;
  CLI::App app{"Weak random feature method solver"};
  app.require_subcommand(1);

  CommandOptions run_opts;
  std::string pipeline;
  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", run_opts.config_path, "YAML or JSON config file")->required();
    cmd->add_option("--seed", run_opts.seed, "override the config seed");
    cmd->add_option("--output", run_opts.output, "result path");
    cmd->add_option("--pipeline", pipeline, "weak or strong")
        ->check(CLI::IsMember({"weak", "strong"}));
    cmd->add_flag("--quiet", run_opts.quiet, "suppress the summary");
  };
  auto* run = app.add_subcommand("run", "solve one problem and report errors");
  add_common(run);
  run->add_option("--dump", run_opts.dump, "binary dump of the assembled system");
  auto* sweep = app.add_subcommand("sweep", "sweep subdomain and feature counts");
  add_common(sweep);

  ValidateOptions val_opts;
  auto* validate = app.add_subcommand("validate", "run the self-check suites");
  validate->add_option("--suite", val_opts.suites, "run only these suites (repeatable)");
  validate->add_flag("--quiet", val_opts.quiet, "print failing suites only");
  validate->add_option("--inject-quadrature-fault", val_opts.quadrature_weight_scale)
      ->group("");  // test hook, hidden from --help

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  if (!pipeline.empty()) run_opts.pipeline = wrfm::parse_pipeline(pipeline);

  if (run->parsed()) return cmd_run(run_opts, std::cout, std::cerr);
  if (sweep->parsed()) return cmd_sweep(run_opts, std::cout, std::cerr);
  return cmd_validate(val_opts, std::cout, std::cerr);
}
