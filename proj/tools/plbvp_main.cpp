// Command-line front end for the p-Laplacian boundary-value solver library.
// Talks to the library exclusively through the C API in plbvp.h.

#include "plbvp.h"

#include "CLI11.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct CommonOpts {
  std::string config_path;
  std::string output_dir = ".";
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("config", opts.config_path, "Path to a run configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("-o,--output-dir", opts.output_dir,
                  "Directory for output files (created if missing)");
  cmd->add_option("--override", opts.overrides,
                  "Override a config entry as section.key=value (repeatable)");
  cmd->add_option("--seed", opts.seed, "Seed for randomized hypothesis probes");
  cmd->add_flag("-q,--quiet", opts.quiet, "Suppress the stdout summary");
}

int fail_with_last_error() {
  const char* msg = plbvp_last_error();
  std::cerr << "error: " << (msg != nullptr && msg[0] != '\0' ? msg : "unknown failure")
            << "\n";
  return 1;
}

int load_run(const CommonOpts& opts, plbvp_run** out) {
  std::ifstream in(opts.config_path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot open config file: " << opts.config_path << "\n";
    return 1;
  }
  std::ostringstream text;
  text << in.rdbuf();
  const std::string content = text.str();

  plbvp_run* run = nullptr;
  if (plbvp_run_parse(content.c_str(), &run) != PLBVP_OK) return fail_with_last_error();

  for (const std::string& entry : opts.overrides) {
    const std::size_t eq = entry.find('=');
    if (eq == std::string::npos) {
      std::cerr << "error: override '" << entry << "' is not of the form key=value\n";
      plbvp_run_free(run);
      return 1;
    }
    const std::string key = entry.substr(0, eq);
    const std::string value = entry.substr(eq + 1);
    if (plbvp_run_override(run, key.c_str(), value.c_str()) != PLBVP_OK) {
      int rc = fail_with_last_error();
      plbvp_run_free(run);
      return rc;
    }
  }
  *out = run;
  return 0;
}

using RunVerb = int (*)(const plbvp_run*, const char*, std::uint64_t, int, int*);

int execute(const CommonOpts& opts, RunVerb verb) {
  plbvp_run* run = nullptr;
  if (int rc = load_run(opts, &run); rc != 0) return rc;
  int exit_code = 1;
  const int api_rc = verb(run, opts.output_dir.c_str(), opts.seed,
                          opts.quiet ? 1 : 0, &exit_code);
  plbvp_run_free(run);
  if (api_rc != PLBVP_OK) return fail_with_last_error();
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Solver for second-order p-Laplacian boundary-value problems with "
      "monotone perturbations and multivalued boundary conditions"};
  app.require_subcommand(1);

  CommonOpts solve_opts;
  CLI::App* solve_cmd =
      app.add_subcommand("solve", "Solve a problem and write solution.csv + report.json");
  add_common(solve_cmd, solve_opts);

  CommonOpts verify_opts;
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "Check runtime hypotheses without solving");
  add_common(verify_cmd, verify_opts);

  CommonOpts study_opts;
  CLI::App* study_cmd =
      app.add_subcommand("study", "Run a mesh-refinement convergence study");
  add_common(study_cmd, study_opts);

  CLI::App* catalog_cmd =
      app.add_subcommand("catalog", "Print the built-in problem catalog schema");

  CLI11_PARSE(app, argc, argv);

  if (catalog_cmd->parsed()) {
    char* text = nullptr;
    if (plbvp_catalog_text(&text) != PLBVP_OK) return fail_with_last_error();
    std::cout << text;
    plbvp_string_free(text);
    return 0;
  }
  if (solve_cmd->parsed()) return execute(solve_opts, &plbvp_run_solve);
  if (verify_cmd->parsed()) return execute(verify_opts, &plbvp_run_verify);
  if (study_cmd->parsed()) return execute(study_opts, &plbvp_run_study);
  return 1;
}
