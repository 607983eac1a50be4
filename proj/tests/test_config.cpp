#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "run_config.hpp"

using plbvp::apply_override;
using plbvp::BcKind;
using plbvp::build_run;
using plbvp::BuiltRun;
using plbvp::catalog_text;
using plbvp::format_double;
using plbvp::MapKind;
using plbvp::parse_config;
using plbvp::ParseError;
using plbvp::RunConfig;
using plbvp::run_solve;
using plbvp::run_study;
using plbvp::run_verify;
using plbvp::serialize_config;
using plbvp::ValidationError;

namespace {

const char* kMinimalDirichlet =
    "[problem]\n"
    "catalog = example3\n"
    "p = 2\n"
    "T = 1\n"
    "N = 1\n"
    "field = builtin:msin\n";

std::string read_file(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  REQUIRE(is.good());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::filesystem::path fresh_dir(const std::string& leaf) {
  const auto dir = std::filesystem::temp_directory_path() / ("plbvp_cfg_" + leaf);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

struct VerbResult {
  int code;
  std::string out;
  std::string err;
};

template <typename Verb>
VerbResult run(Verb verb, const std::string& text, const std::filesystem::path& dir,
               std::uint64_t seed = 7) {
  std::ostringstream out, err;
  const int code = verb(parse_config(text), dir.string(), seed, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("minimal catalog config parses into the expected entries") {
  const RunConfig cfg = parse_config(kMinimalDirichlet);
  CHECK(cfg.entries.size() == 5);
  CHECK(cfg.entries.at("problem.catalog") == "example3");
  CHECK(cfg.entries.at("problem.p") == "2");
  CHECK(cfg.entries.at("problem.field") == "builtin:msin");
  CHECK_NOTHROW(build_run(cfg, 0));
}

TEST_CASE("comments, blank lines, and whitespace are tolerated") {
  const RunConfig cfg = parse_config(
      "# leading comment\n"
      "\n"
      "  [problem]  \n"
      "   catalog =   example3  \n"
      "field= builtin:msin\n"
      "# trailing comment\n");
  CHECK(cfg.entries.at("problem.catalog") == "example3");
  CHECK(cfg.entries.at("problem.field") == "builtin:msin");
}

TEST_CASE("parse diagnostics name the offending line") {
  auto message_of = [](const std::string& text) -> std::string {
    try {
      parse_config(text);
    } catch (const ParseError& e) {
      return e.what();
    }
    return "";
  };
  CHECK(message_of("[problem\ncatalog = x\n").find("line 1") != std::string::npos);
  CHECK(message_of("[nosuch]\n").find("unknown section") != std::string::npos);
  CHECK(message_of("catalog = x\n").find("outside any [section]") != std::string::npos);
  CHECK(message_of("[problem]\njust words\n").find("line 2") != std::string::npos);
  CHECK(message_of("[problem]\n= 3\n").find("empty key") != std::string::npos);
  CHECK(message_of("[problem]\nwrong = 3\n").find("unknown key 'wrong'") !=
        std::string::npos);
  const std::string dup = message_of("[problem]\np = 2\np = 3\n");
  CHECK(dup.find("duplicate key 'p'") != std::string::npos);
  CHECK(dup.find("line 3") != std::string::npos);
}

TEST_CASE("serialize then parse is the identity on every catalog entry") {
  const std::vector<std::string> catalog_configs = {
      "[problem]\ncatalog = example1\nN = 2\nfield = builtin:constant\n"
      "[field]\nvalue = 0.25,-0.5\n"
      "[boundary]\nk1 = box:0,0;1,1\nk2 = ball:0,0;2\n",
      "[problem]\ncatalog = example2\nN = 1\nM = 1\nfield = builtin:constant\n"
      "[field]\nvalue = -1\n[boundary]\nk1 = orthant\nk2 = orthant\n",
      kMinimalDirichlet,
      "[problem]\ncatalog = example4\nfield = builtin:negated\n",
      "[problem]\ncatalog = example5\nA = l1:0.5\nfield = builtin:step\n"
      "[field]\nvalue1 = 1\nvalue2 = -1\nswitch = 0.5\n",
      "[problem]\ncatalog = example6\nfield = builtin:msin\n"
      "[boundary]\ntheta = 1\neta = 1\n",
      "[problem]\nN = 2\nA = halfspace:1,0;0.5\nfield = tabulated\n"
      "[field]\nrows = 0 1 0; 0.5 0 1; 1 -1 -1\n"
      "[boundary]\nkind = product\nk1 = singleton:0,0\nk2 = identity:2\n"
      "[solver]\nn = 16\nlambda_schedule = 1,0.1,0.01\nmu = 2\n"
      "[outputs]\nsolution_table = sol.csv\nstudy_grids = 8,16\nstudy_reference = zero\n",
  };
  for (const std::string& text : catalog_configs) {
    const RunConfig cfg = parse_config(text);
    const std::string round = serialize_config(cfg);
    CHECK(parse_config(round) == cfg);
    CHECK(serialize_config(parse_config(round)) == round);
    CHECK_NOTHROW(build_run(cfg, 11));
  }
}

TEST_CASE("serialization emits sections in schema order") {
  const RunConfig cfg = parse_config(
      "[outputs]\nreport = r.json\n"
      "[solver]\nn = 8\n"
      "[problem]\ncatalog = example3\nfield = builtin:msin\n");
  const std::string text = serialize_config(cfg);
  CHECK(text.find("[problem]") < text.find("[solver]"));
  CHECK(text.find("[solver]") < text.find("[outputs]"));
}

TEST_CASE("overrides replace or add entries and reject unknown keys") {
  RunConfig cfg = parse_config(kMinimalDirichlet);
  apply_override(cfg, "solver.n", "32");
  CHECK(cfg.entries.at("solver.n") == "32");
  apply_override(cfg, "problem.p", "3");
  CHECK(cfg.entries.at("problem.p") == "3");
  CHECK_THROWS_AS(apply_override(cfg, "nodots", "1"), ValidationError);
  CHECK_THROWS_AS(apply_override(cfg, "problem.bogus", "1"), ValidationError);
  CHECK_THROWS_AS(apply_override(cfg, "bogus.n", "1"), ValidationError);
}

TEST_CASE("semantic validation rejects out-of-range problem data") {
  auto reject = [](const std::string& text, const std::string& needle) {
    try {
      build_run(parse_config(text), 0);
      FAIL_CHECK("expected ValidationError for: " << text);
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  reject("[problem]\ncatalog = example3\np = 1.5\nfield = builtin:msin\n",
         "p must be >= 2");
  reject("[problem]\ncatalog = example3\nfield = builtin:msin\n[boundary]\nkind = dirichlet\n",
         "mutually exclusive");
  reject("[problem]\nfield = builtin:msin\n", "problem.catalog or an inline boundary.kind");
  reject("[problem]\ncatalog = example9\nfield = builtin:msin\n", "unknown catalog entry");
  reject("[problem]\ncatalog = example3\nT = 0\nfield = builtin:msin\n",
         "horizon must be positive");
  reject("[problem]\ncatalog = example3\nN = 0\nfield = builtin:msin\n",
         "dimension must be >= 1");
  reject("[problem]\ncatalog = example3\nM = -1\nfield = builtin:msin\n",
         "radius must be positive");
  reject("[problem]\ncatalog = example3\n", "problem.field: required key is missing");
  reject("[problem]\ncatalog = example3\nfield = builtin:nosuch\n", "unknown builtin field");
  reject("[problem]\ncatalog = example3\nfield = wild\n", "expected 'builtin:<name>'");
  reject("[problem]\ncatalog = example3\nA = box:0\nfield = builtin:msin\n",
         "box needs 'lower;upper'");
  reject("[problem]\ncatalog = example3\nA = teapot\nfield = builtin:msin\n",
         "unknown map kind");
  reject("[problem]\ncatalog = example3\nA = orthant:3\nfield = builtin:msin\n",
         "takes no parameters");
  reject("[problem]\ncatalog = example2\nA = identity:1\nfield = builtin:msin\n",
         "example2 pins A to the orthant cone");
  reject("[problem]\ncatalog = example6\nfield = builtin:msin\n[boundary]\ntheta = 0\n",
         "must be positive");
  reject("[problem]\ncatalog = example3\nfield = builtin:msin\n"
         "[outputs]\nstudy_grids = 8,9.5\n",
         "integers >= 2");
  reject("[problem]\ncatalog = example3\nfield = builtin:msin\n"
         "[outputs]\nstudy_reference = cubic\n",
         "unknown reference");
  reject("[problem]\ncatalog = example3\np = two\nfield = builtin:msin\n", "not a number");
  reject("[problem]\ncatalog = example3\nfield = builtin:msin\n[solver]\nlambda_schedule = \n",
         "empty number");
}

TEST_CASE("built runs carry the catalog wiring and solver overrides") {
  const RunConfig cfg = parse_config(
      "[problem]\ncatalog = example6\np = 3\nT = 2\nN = 2\nM = 4\nfield = builtin:plap3\n"
      "[solver]\nn = 48\nlambda_schedule = 1,1e-2,1e-4\nnewton_tol = 1e-9\nmu = 0.5\n"
      "[outputs]\nsolution_table = a.csv\nreport = b.json\nstudy_table = c.csv\n"
      "study_grids = 8,16,32\nstudy_reference = parabola\n");
  const BuiltRun built = build_run(cfg, 99);
  CHECK(built.catalog == "example6");
  CHECK(built.spec.dim == 2);
  CHECK(built.spec.p.p == 3.0);
  CHECK(built.spec.horizon == 2.0);
  CHECK(built.spec.hartman_radius == 4.0);
  CHECK(built.spec.xi.kind() == BcKind::SturmLiouville);
  CHECK(built.spec.A.kind() == MapKind::Zero);
  CHECK(built.solver.intervals == 48);
  CHECK(built.solver.lambda_schedule == std::vector<double>{1.0, 1e-2, 1e-4});
  CHECK(built.solver.newton_tol == 1e-9);
  CHECK(built.solver.mu == 0.5);
  CHECK(built.solver.seed == 99);
  CHECK(built.solution_table == "a.csv");
  CHECK(built.report_path == "b.json");
  CHECK(built.study_table == "c.csv");
  CHECK(built.study_grids == std::vector<int>{8, 16, 32});
  CHECK(built.study_reference == "parabola");

  // example2 defaults A to the orthant cone without an explicit descriptor
  const BuiltRun vi = build_run(
      parse_config("[problem]\ncatalog = example2\nfield = builtin:constant\n"
                   "[field]\nvalue = -1\n"),
      0);
  CHECK(vi.spec.A.kind() == MapKind::OrthantCone);
}

TEST_CASE("float formatting is shortest round-trip") {
  for (double v : {0.1, 1.0 / 3.0, 2.0, -17.25, 1e-300, 6.02214076e23, 3.14159,
                   -0.0, 0.0, 1e16}) {
    const std::string s = format_double(v);
    CHECK(std::stod(s) == v);
    CHECK(s.find(',') == std::string::npos);
  }
  CHECK(format_double(-0.0) == "0");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(0.1) == "0.1");
}

TEST_CASE("catalog text names every entry and descriptor family") {
  const std::string text = catalog_text();
  for (const char* needle :
       {"example1", "example2", "example3", "example4", "example5", "example6",
        "dirichlet", "neumann", "periodic", "sturm_liouville", "product", "zero",
        "identity:alpha", "orthant", "box:", "singleton:", "ball:", "halfspace:",
        "l1:", "builtin:msin", "builtin:plap3", "builtin:constant", "builtin:linear",
        "builtin:negated", "builtin:step", "tabulated", "sinpi", "parabola"}) {
    CHECK_MESSAGE(text.find(needle) != std::string::npos, "missing: " << needle);
  }
}

TEST_CASE("solve verb: exit 0 with files on the manufactured problem") {
  const auto dir = fresh_dir("solve_ok");
  const std::string text = std::string(kMinimalDirichlet) + "[solver]\nn = 32\n";
  const VerbResult r = run(run_solve, text, dir);
  CHECK(r.code == 0);
  CHECK(r.err.empty());
  CHECK(r.out.find("status: converged") != std::string::npos);
  const std::string csv = read_file(dir / "solution.csv");
  CHECK(csv.rfind("t,x_1,flux_1,u_1,f_1\n", 0) == 0);
  // header + n+1 rows
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 34);
  const std::string report = read_file(dir / "report.json");
  CHECK(report.find("\"status\": \"converged\"") != std::string::npos);
  CHECK(report.find("\"verdicts\"") != std::string::npos);
}

TEST_CASE("solve verb: hartman-violating field converges but exits 2") {
  const auto dir = fresh_dir("solve_hartman");
  const VerbResult r = run(run_solve,
                           "[problem]\ncatalog = example3\nM = 1\n"
                           "field = builtin:negated\n[solver]\nn = 16\n",
                           dir);
  CHECK(r.code == 2);
  CHECK(r.out.find("status: converged") != std::string::npos);
  CHECK(r.out.find("verdict hartman_field: FAIL") != std::string::npos);
}

TEST_CASE("solve verb: empty lambda schedule is a hard validation error") {
  const auto dir = fresh_dir("solve_badsched");
  const VerbResult r = run(run_solve,
                           std::string(kMinimalDirichlet) +
                               "[solver]\nlambda_schedule = 0\n",
                           dir);
  CHECK(r.code == 1);
  CHECK(r.err.find("error:") != std::string::npos);
}

TEST_CASE("solve verb: incompatible neumann data exits 1 with diagnostics") {
  const auto dir = fresh_dir("solve_nonconv");
  const VerbResult r = run(run_solve,
                           "[problem]\ncatalog = example4\nfield = builtin:constant\n"
                           "[field]\nvalue = 1\n[solver]\nn = 16\n",
                           dir);
  CHECK(r.code == 1);
  CHECK(r.err.find("did not converge") != std::string::npos);
  // partial artifacts are still written for post-mortems
  CHECK(std::filesystem::exists(dir / "report.json"));
}

TEST_CASE("verify verb: periodic orthant pair passes the compatibility check") {
  const auto dir = fresh_dir("verify_ok");
  const VerbResult r =
      run(run_verify,
          "[problem]\ncatalog = example5\nA = orthant\nfield = builtin:msin\n", dir);
  CHECK(r.code == 0);
  CHECK(r.out.find("hypothesis compatibility_h0: pass") != std::string::npos);
  CHECK(r.out.find("hypothesis xi_structure: pass") != std::string::npos);
  const std::string report = read_file(dir / "report.json");
  CHECK(report.find("\"min_pairing\": 0.0") != std::string::npos);
}

TEST_CASE("verify verb: contracting field fails the sign condition with a witness") {
  const auto dir = fresh_dir("verify_hartman");
  const VerbResult r = run(run_verify,
                           "[problem]\ncatalog = example3\nM = 1\n"
                           "field = builtin:negated\n",
                           dir);
  CHECK(r.code == 2);
  CHECK(r.out.find("hypothesis hartman: FAIL") != std::string::npos);
  const std::string report = read_file(dir / "report.json");
  CHECK(report.find("witness_zeta") != std::string::npos);
}

TEST_CASE("verify verb: sturm-liouville identity coefficients pass") {
  const auto dir = fresh_dir("verify_sl");
  const VerbResult r = run(run_verify,
                           "[problem]\ncatalog = example6\nfield = builtin:msin\n"
                           "[boundary]\ntheta = 1\neta = 1\n",
                           dir);
  CHECK(r.code == 0);
  CHECK(r.out.find("hypothesis xi_structure: pass") != std::string::npos);
}

TEST_CASE("study verb: manufactured p=2 orders land above 1.9") {
  const auto dir = fresh_dir("study_ok");
  const VerbResult r = run(run_study,
                           std::string(kMinimalDirichlet) +
                               "[outputs]\nstudy_grids = 16,32,64,128\n"
                               "study_reference = sinpi\n",
                           dir);
  CHECK(r.code == 0);
  const std::string csv = read_file(dir / "study.csv");
  CHECK(csv.rfind("n,max_error,order\n", 0) == 0);
  std::istringstream rows(csv);
  std::string line;
  std::getline(rows, line);  // header
  int row_index = 0;
  while (std::getline(rows, line)) {
    const size_t c1 = line.find(','), c2 = line.rfind(',');
    REQUIRE(c1 != std::string::npos);
    const double order = std::stod(line.substr(c2 + 1));
    if (row_index > 0) CHECK(order >= 1.9);
    ++row_index;
  }
  CHECK(row_index == 4);
}

TEST_CASE("study verb: missing reference or grids is a validation error") {
  const auto dir = fresh_dir("study_bad");
  const VerbResult missing_ref =
      run(run_study,
          std::string(kMinimalDirichlet) + "[outputs]\nstudy_grids = 16,32\n", dir);
  CHECK(missing_ref.code == 1);
  CHECK(missing_ref.err.find("study_reference") != std::string::npos);
  const VerbResult missing_grids =
      run(run_study,
          std::string(kMinimalDirichlet) + "[outputs]\nstudy_reference = sinpi\n", dir);
  CHECK(missing_grids.code == 1);
  CHECK(missing_grids.err.find("study_grids") != std::string::npos);
}

TEST_CASE("identical configs produce byte-identical artifacts") {
  const auto dir1 = fresh_dir("det_a");
  const auto dir2 = fresh_dir("det_b");
  const std::string text =
      "[problem]\ncatalog = example2\nN = 1\nfield = builtin:constant\n"
      "[field]\nvalue = -1\n[solver]\nn = 32\n";
  CHECK(run(run_solve, text, dir1).code == 0);
  CHECK(run(run_solve, text, dir2).code == 0);
  CHECK(read_file(dir1 / "solution.csv") == read_file(dir2 / "solution.csv"));
  CHECK(read_file(dir1 / "report.json") == read_file(dir2 / "report.json"));
}
