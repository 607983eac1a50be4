#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "solver.hpp"

namespace plbvp {

// Syntax problems in config text (bad section, unknown key, malformed line).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Semantically invalid values (wrong ranges, missing required keys, ...).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parsed key/value configuration.  Entries are keyed "section.key" with raw
// (trimmed) values; serialization emits sections and keys in a fixed order,
// so parse -> serialize -> parse is the identity.
struct RunConfig {
  std::map<std::string, std::string> entries;

  bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config(const std::string& text);
std::string serialize_config(const RunConfig& cfg);

// Sets "section.key" (dot path) to a raw value, validating the key name.
void apply_override(RunConfig& cfg, const std::string& dotted_key,
                    const std::string& value);

// Fully validated problem + solver + output locations built from a RunConfig.
struct BuiltRun {
  BuiltRun(ProblemSpec s, SolverConfig c, std::string cat)
      : spec(std::move(s)), solver(std::move(c)), catalog(std::move(cat)) {}

  ProblemSpec spec;
  SolverConfig solver;
  std::string catalog;  // "example1".."example6" or "" for inline boundary
  std::string solution_table = "solution.csv";
  std::string report_path = "report.json";
  std::string study_table = "study.csv";
  std::vector<int> study_grids;
  std::string study_reference;  // "sinpi", "parabola", "zero" or ""
};

// Throws ValidationError (never ParseError) on semantic problems.
BuiltRun build_run(const RunConfig& cfg, std::uint64_t seed);

// Verbs.  Summaries go to `out`, diagnostics to `err`; files are written under
// `out_dir`.  Returned exit codes: 0 success (all verdicts pass), 2 finished
// with failed verdicts, 1 hard errors (parse/validation/non-convergence).
int run_solve(const RunConfig& cfg, const std::string& out_dir, std::uint64_t seed,
              std::ostream& out, std::ostream& err);
int run_verify(const RunConfig& cfg, const std::string& out_dir, std::uint64_t seed,
               std::ostream& out, std::ostream& err);
int run_study(const RunConfig& cfg, const std::string& out_dir, std::uint64_t seed,
              std::ostream& out, std::ostream& err);

// Parameter schema of the built-in problem catalog (stable text).
std::string catalog_text();

// Shortest round-trip decimal formatting used in all CSV output.
std::string format_double(double v);

const char* map_kind_name(MapKind k);
const char* bc_kind_name(BcKind k);

}  // namespace plbvp
