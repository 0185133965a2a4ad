// iqctl: run, sweep or validate indirect-control experiment configs.

#include "iqc/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Indirect quantum control experiment runner"};
  app.require_subcommand(1);
  app.fallthrough(); // global options may follow the subcommand

  iqc::cli::Options opts;
  std::string out_dir = opts.out_dir.string();
  app.add_option("--out", out_dir, "Directory for result files")
      ->capture_default_str();
  app.add_flag("--quiet", opts.quiet, "Suppress progress messages");
  app.add_flag("--timing", opts.timing,
               "Record wall-clock time in JSON results (breaks byte-identical "
               "reruns)");

  std::string config;
  auto* run = app.add_subcommand("run", "Execute a simulate/solve/reach/thermal config");
  run->add_option("config", config, "JSON config file")->required();
  auto* sweep = app.add_subcommand("sweep", "Execute a sweep config");
  sweep->add_option("config", config, "JSON config file")->required();
  auto* check = app.add_subcommand("check", "Validate a config without executing it");
  check->add_option("config", config, "JSON config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Usage errors share exit code 1 with config errors.
    const int code = app.exit(e);
    return code == 0 ? 0 : iqc::cli::kError;
  }
  opts.out_dir = out_dir;

  if (*run)
    return iqc::cli::run(config, opts, std::cout, std::cerr);
  if (*sweep)
    return iqc::cli::sweep(config, opts, std::cout, std::cerr);
  return iqc::cli::check(config, opts, std::cout, std::cerr);
}
