// Command-line front end: run JSON configs, materialize presets, and compare
// output tables. Exit codes: 0 success, 1 comparison mismatch, 2 config
// error, 3 runtime/physics error.
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "quadsim/errors.hpp"
#include "quadsim/harness.hpp"

namespace {

int finish(const quadsim::harness::RunOutcome& outcome) {
  if (outcome.exit_code == quadsim::harness::kExitOk) {
    std::printf("%s\n", outcome.message.c_str());
    for (const auto& file : outcome.files) {
      std::printf("  %s\n", file.c_str());
    }
  } else {
    std::fprintf(stderr, "%s\n", outcome.message.c_str());
  }
  return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quadsim - adaptive Gaussian dynamics toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  auto* run_cmd = app.add_subcommand("run", "execute a JSON run config");
  run_cmd->add_option("config", config_path, "path to the config file")
      ->required();
  run_cmd->add_option("--out", out_dir, "output directory (default: out)");

  std::string preset_name;
  std::string preset_out;
  bool full_scale = false;
  bool print_only = false;
  auto* preset_cmd =
      app.add_subcommand("preset", "execute (or print) a named preset");
  preset_cmd->add_option("name", preset_name, "preset name")->required();
  preset_cmd->add_option("--out", preset_out,
                         "output directory (default: out/<name>)");
  preset_cmd->add_flag("--full", full_scale,
                       "publication-scale lattice parameters");
  preset_cmd->add_flag("--print", print_only,
                       "print the materialized config instead of running");

  std::string csv_a;
  std::string csv_b;
  std::string tol_spec;
  auto* compare_cmd =
      app.add_subcommand("compare", "compare two output CSV tables");
  compare_cmd->add_option("a", csv_a, "first CSV file")->required();
  compare_cmd->add_option("b", csv_b, "second CSV file")->required();
  compare_cmd
      ->add_option("--tol", tol_spec, "tolerance spec, e.g. abs=1e-9,rel=0.01")
      ->required();

  auto* list_cmd = app.add_subcommand("list-presets", "list preset names");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      return finish(quadsim::harness::run_config_file(config_path, out_dir));
    }
    if (preset_cmd->parsed()) {
      const nlohmann::json config =
          quadsim::harness::preset_config(preset_name, full_scale);
      if (print_only) {
        std::printf("%s\n", config.dump(2).c_str());
        return quadsim::harness::kExitOk;
      }
      const std::string dir =
          preset_out.empty() ? ("out/" + preset_name) : preset_out;
      return finish(quadsim::harness::run_config_json(config, dir));
    }
    if (compare_cmd->parsed()) {
      const auto report =
          quadsim::harness::compare_tables(csv_a, csv_b, tol_spec);
      std::printf("%s: %s (max abs dev %.3g, max rel dev %.3g)\n",
                  report.pass ? "PASS" : "FAIL", report.detail.c_str(),
                  report.max_abs_dev, report.max_rel_dev);
      return report.pass ? quadsim::harness::kExitOk
                         : quadsim::harness::kExitCompareFail;
    }
    if (list_cmd->parsed()) {
      for (const auto& name : quadsim::harness::preset_names()) {
        std::printf("%s\n", name.c_str());
      }
      return quadsim::harness::kExitOk;
    }
  } catch (const quadsim::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return quadsim::harness::kExitConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return quadsim::harness::kExitPhysicsError;
  }
  return quadsim::harness::kExitOk;
}
