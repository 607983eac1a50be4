#include "run_config.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

namespace plbvp {

using ordered_json = nlohmann::ordered_json;

namespace {

const std::vector<std::pair<std::string, std::vector<std::string>>>& schema() {
  static const std::vector<std::pair<std::string, std::vector<std::string>>> s = {
      {"problem", {"catalog", "p", "T", "N", "M", "A", "field"}},
      {"field", {"value", "value1", "value2", "switch", "rows"}},
      {"boundary", {"kind", "theta", "eta", "k1", "k2"}},
      {"solver",
       {"n", "lambda_schedule", "epsilon_schedule", "newton_max_iters", "newton_tol",
        "backtrack_factor", "min_step", "picard_fallback_iters", "mu"}},
      {"outputs",
       {"solution_table", "report", "study_table", "study_grids", "study_reference"}},
  };
  return s;
}

bool known_key(const std::string& section, const std::string& key) {
  for (const auto& [sec, keys] : schema()) {
    if (sec == section) {
      return std::find(keys.begin(), keys.end(), key) != keys.end();
    }
  }
  return false;
}

bool known_section(const std::string& section) {
  for (const auto& [sec, keys] : schema()) {
    if (sec == section) return true;
  }
  return false;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& raw, const std::string& key) {
  const std::string v = trim(raw);
  if (v.empty()) throw ValidationError(key + ": empty number");
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw ValidationError(key + ": trailing junk in number '" + v + "'");
    return x;
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception&) {
    throw ValidationError(key + ": not a number: '" + v + "'");
  }
}

int parse_int(const std::string& raw, const std::string& key) {
  const double x = parse_number(raw, key);
  const int i = static_cast<int>(x);
  if (static_cast<double>(i) != x) throw ValidationError(key + ": expected an integer");
  return i;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

std::vector<double> parse_number_list(const std::string& raw, const std::string& key) {
  std::vector<double> out;
  for (const std::string& part : split(raw, ',')) {
    out.push_back(parse_number(part, key));
  }
  return out;
}

Vec parse_vec(const std::string& raw, const std::string& key, int expected_dim) {
  const std::vector<double> vals = parse_number_list(raw, key);
  if (expected_dim >= 0 && static_cast<int>(vals.size()) != expected_dim) {
    throw ValidationError(key + ": expected " + std::to_string(expected_dim) +
                          " components, got " + std::to_string(vals.size()));
  }
  Vec v(static_cast<int>(vals.size()));
  for (size_t i = 0; i < vals.size(); ++i) v[static_cast<int>(i)] = vals[i];
  return v;
}

const std::string* find(const RunConfig& cfg, const std::string& key) {
  auto it = cfg.entries.find(key);
  return it == cfg.entries.end() ? nullptr : &it->second;
}

const std::string& require(const RunConfig& cfg, const std::string& key) {
  const std::string* v = find(cfg, key);
  if (!v) throw ValidationError(key + ": required key is missing");
  return *v;
}

// Map descriptors: zero | identity:alpha | orthant | box:l1,..;u1,.. |
// singleton:c1,.. | ball:c1,..;r | halfspace:g1,..;c | l1:gamma
MonotoneMap parse_map_descriptor(const std::string& desc, int N, const std::string& key) {
  const std::string d = trim(desc);
  const size_t colon = d.find(':');
  const std::string head = trim(d.substr(0, colon));
  const std::string rest = colon == std::string::npos ? "" : trim(d.substr(colon + 1));
  auto need_params = [&](bool needed) {
    if (needed && rest.empty()) {
      throw ValidationError(key + ": map kind '" + head + "' needs parameters");
    }
    if (!needed && !rest.empty()) {
      throw ValidationError(key + ": map kind '" + head + "' takes no parameters");
    }
  };
  if (head == "zero") {
    need_params(false);
    return MonotoneMap::zero(N);
  }
  if (head == "identity") {
    need_params(true);
    return MonotoneMap::identity_scaled(N, parse_number(rest, key));
  }
  if (head == "orthant") {
    need_params(false);
    return MonotoneMap::orthant_cone(N);
  }
  if (head == "box") {
    need_params(true);
    const auto halves = split(rest, ';');
    if (halves.size() != 2) throw ValidationError(key + ": box needs 'lower;upper'");
    return MonotoneMap::box_cone(parse_vec(halves[0], key, N), parse_vec(halves[1], key, N));
  }
  if (head == "singleton") {
    need_params(true);
    return MonotoneMap::singleton_cone(parse_vec(rest, key, N));
  }
  if (head == "ball") {
    need_params(true);
    const auto halves = split(rest, ';');
    if (halves.size() != 2) throw ValidationError(key + ": ball needs 'center;radius'");
    return MonotoneMap::ball_cone(parse_vec(halves[0], key, N), parse_number(halves[1], key));
  }
  if (head == "halfspace") {
    need_params(true);
    const auto halves = split(rest, ';');
    if (halves.size() != 2) {
      throw ValidationError(key + ": halfspace needs 'normal;offset'");
    }
    return MonotoneMap::halfspace_cone(parse_vec(halves[0], key, N),
                                       parse_number(halves[1], key));
  }
  if (head == "l1") {
    need_params(true);
    return MonotoneMap::l1_prox(N, parse_number(rest, key));
  }
  throw ValidationError(key + ": unknown map kind '" + head + "'");
}

MultiField build_field(const RunConfig& cfg, int N, double T, double p) {
  const std::string desc = trim(require(cfg, "problem.field"));
  const std::string builtin_prefix = "builtin:";
  if (desc.rfind(builtin_prefix, 0) == 0) {
    const std::string name = trim(desc.substr(builtin_prefix.size()));
    if (name == "msin") return MultiField::msin(N, T);
    if (name == "plap3") return MultiField::plap3(N, T, p);
    if (name == "linear") return MultiField::linear(N, T);
    if (name == "negated") return MultiField::negated(N, T);
    if (name == "constant") {
      return MultiField::constant(N, T, parse_vec(require(cfg, "field.value"), "field.value", N));
    }
    if (name == "step") {
      const Vec v1 = parse_vec(require(cfg, "field.value1"), "field.value1", N);
      const Vec v2 = parse_vec(require(cfg, "field.value2"), "field.value2", N);
      const double ts = parse_number(require(cfg, "field.switch"), "field.switch");
      if (!(ts >= 0.0) || !(ts <= T)) {
        throw ValidationError("field.switch: switch time must lie in [0, T]");
      }
      return MultiField::step(N, T, v1, v2, ts);
    }
    throw ValidationError("problem.field: unknown builtin field '" + name + "'");
  }
  if (desc == "tabulated") {
    const std::string& raw = require(cfg, "field.rows");
    std::vector<std::pair<double, Vec>> rows;
    for (const std::string& row : split(raw, ';')) {
      std::istringstream iss(trim(row));
      std::vector<double> nums;
      std::string tok;
      while (iss >> tok) nums.push_back(parse_number(tok, "field.rows"));
      if (nums.empty()) continue;
      if (static_cast<int>(nums.size()) != N + 1) {
        throw ValidationError("field.rows: each row needs t followed by " +
                              std::to_string(N) + " components");
      }
      Vec v(N);
      for (int k = 0; k < N; ++k) v[k] = nums[k + 1];
      rows.emplace_back(nums[0], v);
    }
    if (rows.empty()) throw ValidationError("field.rows: no rows given");
    try {
      return MultiField::tabulated(N, T, std::move(rows));
    } catch (const std::invalid_argument& e) {
      throw ValidationError(std::string("field.rows: ") + e.what());
    }
  }
  throw ValidationError("problem.field: expected 'builtin:<name>' or 'tabulated', got '" +
                        desc + "'");
}

MonotoneMap default_end_set(int N) { return MonotoneMap::singleton_cone(Vec::Zero(N)); }

BoundaryOperator build_boundary(const RunConfig& cfg, int N, const Exponent& e,
                                const std::string& catalog) {
  auto end_set = [&](const char* key) {
    const std::string* d = find(cfg, key);
    return d ? parse_map_descriptor(*d, N, key) : default_end_set(N);
  };
  auto sl_param = [&](const char* key) {
    const std::string* d = find(cfg, key);
    const double v = d ? parse_number(*d, key) : 1.0;
    if (!(v > 0.0)) throw ValidationError(std::string(key) + ": must be positive");
    return v;
  };
  if (!catalog.empty()) {
    if (catalog == "example1" || catalog == "example2") {
      return BoundaryOperator::product(end_set("boundary.k1"), end_set("boundary.k2"));
    }
    if (catalog == "example3") return BoundaryOperator::dirichlet(N);
    if (catalog == "example4") return BoundaryOperator::neumann(N);
    if (catalog == "example5") return BoundaryOperator::periodic(N);
    if (catalog == "example6") {
      return BoundaryOperator::sturm_liouville(N, e, sl_param("boundary.theta"),
                                               sl_param("boundary.eta"));
    }
    throw ValidationError("problem.catalog: unknown catalog entry '" + catalog + "'");
  }
  const std::string kind = trim(require(cfg, "boundary.kind"));
  if (kind == "dirichlet") return BoundaryOperator::dirichlet(N);
  if (kind == "neumann") return BoundaryOperator::neumann(N);
  if (kind == "periodic") return BoundaryOperator::periodic(N);
  if (kind == "sturm_liouville") {
    return BoundaryOperator::sturm_liouville(N, e, sl_param("boundary.theta"),
                                             sl_param("boundary.eta"));
  }
  if (kind == "product") {
    return BoundaryOperator::product(end_set("boundary.k1"), end_set("boundary.k2"));
  }
  throw ValidationError("boundary.kind: unknown kind '" + kind + "'");
}

std::function<Vec(double)> reference_fn(const std::string& name, int N, double T) {
  const double pi = std::acos(-1.0);
  if (name == "sinpi") {
    return [N, T, pi](double t) { return Vec::Constant(N, std::sin(pi * t / T)); };
  }
  if (name == "parabola") {
    return [N, T](double t) { return Vec::Constant(N, t * (T - t)); };
  }
  if (name == "zero") {
    return [N](double) { return Vec::Zero(N); };
  }
  throw ValidationError("outputs.study_reference: unknown reference '" + name + "'");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream iss(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(iss, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (t.front() == '[') {
      if (t.back() != ']') throw ParseError(where + "unterminated section header");
      section = trim(t.substr(1, t.size() - 2));
      if (!known_section(section)) {
        throw ParseError(where + "unknown section [" + section + "]");
      }
      continue;
    }
    const size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw ParseError(where + "expected 'key = value', got '" + t + "'");
    }
    if (section.empty()) {
      throw ParseError(where + "key outside any [section]");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw ParseError(where + "empty key");
    if (!known_key(section, key)) {
      throw ParseError(where + "unknown key '" + key + "' in [" + section + "]");
    }
    const std::string full = section + "." + key;
    if (cfg.entries.count(full)) {
      throw ParseError(where + "duplicate key '" + key + "' in [" + section + "]");
    }
    cfg.entries[full] = value;
  }
  return cfg;
}

std::string serialize_config(const RunConfig& cfg) {
  std::string out;
  bool first = true;
  for (const auto& [section, keys] : schema()) {
    std::string block;
    for (const std::string& key : keys) {
      const std::string* v = find(cfg, section + "." + key);
      if (v) block += key + " = " + *v + "\n";
    }
    if (block.empty()) continue;
    if (!first) out += "\n";
    out += "[" + section + "]\n" + block;
    first = false;
  }
  return out;
}

void apply_override(RunConfig& cfg, const std::string& dotted_key, const std::string& value) {
  const size_t dot = dotted_key.find('.');
  if (dot == std::string::npos) {
    throw ValidationError("override key must be 'section.key', got '" + dotted_key + "'");
  }
  const std::string section = trim(dotted_key.substr(0, dot));
  const std::string key = trim(dotted_key.substr(dot + 1));
  if (!known_section(section) || !known_key(section, key)) {
    throw ValidationError("unknown override key '" + dotted_key + "'");
  }
  cfg.entries[section + "." + key] = trim(value);
}

BuiltRun build_run(const RunConfig& cfg, std::uint64_t seed) {
  const std::string* catalog_ptr = find(cfg, "problem.catalog");
  const std::string catalog = catalog_ptr ? trim(*catalog_ptr) : "";
  if (!catalog.empty() && find(cfg, "boundary.kind")) {
    throw ValidationError(
        "problem.catalog and boundary.kind are mutually exclusive; give one");
  }
  if (catalog.empty() && !find(cfg, "boundary.kind")) {
    throw ValidationError("specify problem.catalog or an inline boundary.kind");
  }

  const double p = find(cfg, "problem.p") ? parse_number(*find(cfg, "problem.p"), "problem.p") : 2.0;
  if (!(p >= 2.0)) throw ValidationError("problem.p: p must be >= 2");
  const Exponent e(p);
  const double T = find(cfg, "problem.T") ? parse_number(*find(cfg, "problem.T"), "problem.T") : 1.0;
  if (!(T > 0.0)) throw ValidationError("problem.T: horizon must be positive");
  const int N = find(cfg, "problem.N") ? parse_int(*find(cfg, "problem.N"), "problem.N") : 1;
  if (N < 1) throw ValidationError("problem.N: dimension must be >= 1");

  std::optional<double> M;
  if (const std::string* m = find(cfg, "problem.M")) {
    M = parse_number(*m, "problem.M");
    if (!(*M > 0.0)) throw ValidationError("problem.M: radius must be positive");
  }

  MonotoneMap A = MonotoneMap::zero(N);
  const std::string* a_desc = find(cfg, "problem.A");
  if (catalog == "example2") {
    if (a_desc && trim(*a_desc) != "orthant") {
      throw ValidationError("problem.A: example2 pins A to the orthant cone");
    }
    A = MonotoneMap::orthant_cone(N);
  } else if (a_desc) {
    A = parse_map_descriptor(*a_desc, N, "problem.A");
  }

  MultiField F = build_field(cfg, N, T, p);
  BoundaryOperator xi = build_boundary(cfg, N, e, catalog);

  SolverConfig solver;
  if (const std::string* v = find(cfg, "solver.n")) {
    solver.intervals = parse_int(*v, "solver.n");
  }
  if (const std::string* v = find(cfg, "solver.lambda_schedule")) {
    solver.lambda_schedule = parse_number_list(*v, "solver.lambda_schedule");
  }
  if (const std::string* v = find(cfg, "solver.epsilon_schedule")) {
    solver.epsilon_schedule = parse_number_list(*v, "solver.epsilon_schedule");
  }
  if (const std::string* v = find(cfg, "solver.newton_max_iters")) {
    solver.newton_max_iters = parse_int(*v, "solver.newton_max_iters");
  }
  if (const std::string* v = find(cfg, "solver.newton_tol")) {
    solver.newton_tol = parse_number(*v, "solver.newton_tol");
  }
  if (const std::string* v = find(cfg, "solver.backtrack_factor")) {
    solver.backtrack_factor = parse_number(*v, "solver.backtrack_factor");
  }
  if (const std::string* v = find(cfg, "solver.min_step")) {
    solver.min_step = parse_number(*v, "solver.min_step");
  }
  if (const std::string* v = find(cfg, "solver.picard_fallback_iters")) {
    solver.picard_fallback_iters = parse_int(*v, "solver.picard_fallback_iters");
  }
  if (const std::string* v = find(cfg, "solver.mu")) {
    solver.mu = parse_number(*v, "solver.mu");
  }
  solver.seed = seed;
  try {
    solver.validate();
  } catch (const std::invalid_argument& ex) {
    throw ValidationError(std::string("solver: ") + ex.what());
  }

  ProblemSpec spec{N, e, T, std::move(A), std::move(F), std::move(xi), M};
  try {
    spec.validate();
  } catch (const std::invalid_argument& ex) {
    throw ValidationError(std::string("problem: ") + ex.what());
  }

  BuiltRun out(std::move(spec), std::move(solver), catalog);
  if (const std::string* v = find(cfg, "outputs.solution_table")) out.solution_table = *v;
  if (const std::string* v = find(cfg, "outputs.report")) out.report_path = *v;
  if (const std::string* v = find(cfg, "outputs.study_table")) out.study_table = *v;
  if (const std::string* v = find(cfg, "outputs.study_grids")) {
    for (double g : parse_number_list(*v, "outputs.study_grids")) {
      const int n = static_cast<int>(g);
      if (static_cast<double>(n) != g || n < 2) {
        throw ValidationError("outputs.study_grids: entries must be integers >= 2");
      }
      out.study_grids.push_back(n);
    }
  }
  if (const std::string* v = find(cfg, "outputs.study_reference")) {
    out.study_reference = trim(*v);
    reference_fn(out.study_reference, N, T);  // validates the name
  }
  return out;
}

std::string format_double(double v) {
  if (v == 0.0) v = 0.0;  // normalize -0
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

const char* map_kind_name(MapKind k) {
  switch (k) {
    case MapKind::Zero: return "zero";
    case MapKind::IdentityScaled: return "identity";
    case MapKind::OrthantCone: return "orthant";
    case MapKind::BoxCone: return "box";
    case MapKind::SingletonCone: return "singleton";
    case MapKind::BallCone: return "ball";
    case MapKind::HalfspaceCone: return "halfspace";
    case MapKind::PolyhedronCone: return "polyhedron";
    case MapKind::L1Prox: return "l1";
    case MapKind::Custom: return "custom";
  }
  return "unknown";
}

const char* bc_kind_name(BcKind k) {
  switch (k) {
    case BcKind::Dirichlet: return "dirichlet";
    case BcKind::Neumann: return "neumann";
    case BcKind::Periodic: return "periodic";
    case BcKind::SturmLiouville: return "sturm_liouville";
    case BcKind::Product: return "product";
    case BcKind::Custom: return "custom";
  }
  return "unknown";
}

namespace {

std::filesystem::path out_path(const std::string& out_dir, const std::string& file) {
  if (out_dir.empty()) return std::filesystem::path(file);
  std::filesystem::create_directories(out_dir);
  return std::filesystem::path(out_dir) / file;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
  os << content;
  if (!os.good()) throw std::runtime_error("write failed: " + path.string());
}

std::string solution_csv(const SolveReport& rep) {
  const int n = rep.trajectory.intervals();
  const int N = rep.trajectory.dim();
  std::string csv = "t";
  auto add_cols = [&](const char* stem) {
    for (int k = 1; k <= N; ++k) csv += "," + std::string(stem) + "_" + std::to_string(k);
  };
  add_cols("x");
  add_cols("flux");
  add_cols("u");
  add_cols("f");
  csv += "\n";
  for (int i = 0; i <= n; ++i) {
    csv += format_double(rep.trajectory.grid.node(i));
    const Vec& x = rep.trajectory.values[i];
    for (int k = 0; k < N; ++k) csv += "," + format_double(x[k]);
    // flux on the interval left of node i; node 0 repeats the first interval
    const Vec& flx = rep.flux[i == 0 ? 0 : i - 1];
    for (int k = 0; k < N; ++k) csv += "," + format_double(flx[k]);
    const Vec& u = rep.multiplier_trace[i];
    for (int k = 0; k < N; ++k) csv += "," + format_double(u[k]);
    const Vec& f = rep.selection_trace[i];
    for (int k = 0; k < N; ++k) csv += "," + format_double(f[k]);
    csv += "\n";
  }
  return csv;
}

ordered_json problem_echo(const BuiltRun& built) {
  ordered_json j;
  if (!built.catalog.empty()) j["catalog"] = built.catalog;
  j["p"] = built.spec.p.p;
  j["T"] = built.spec.horizon;
  j["N"] = built.spec.dim;
  if (built.spec.hartman_radius) j["M"] = *built.spec.hartman_radius;
  j["monotone_map"] = map_kind_name(built.spec.A.kind());
  j["field"] = built.spec.F.name();
  j["boundary"] = bc_kind_name(built.spec.xi.kind());
  j["n"] = built.solver.intervals;
  j["mu"] = built.solver.mu;
  j["lambda_schedule"] = built.solver.lambda_schedule;
  return j;
}

ordered_json report_json(const BuiltRun& built, const SolveReport& rep) {
  ordered_json j;
  j["status"] = rep.status == SolveStatus::Converged ? "converged" : "non_convergence";
  j["problem"] = problem_echo(built);
  j["lambda_final"] = rep.lambda_final;
  j["residual_norm"] = rep.residual_norm;
  j["bc_residual_norm"] = rep.bc_residual_norm;
  j["hartman_max_norm"] = rep.hartman_max_norm;
  j["graph_membership_residual"] = rep.graph_membership_residual;
  ordered_json verdicts = ordered_json::array();
  for (const Verdict& v : rep.verdicts) {
    verdicts.push_back({{"name", v.name},
                        {"applicable", v.applicable},
                        {"passed", v.passed},
                        {"measured", v.measured},
                        {"threshold", v.threshold}});
  }
  j["verdicts"] = verdicts;
  ordered_json hist = ordered_json::array();
  for (const ContinuationStep& st : rep.history) {
    ordered_json h{{"lambda", st.lambda},
                   {"newton_iters", st.newton_iters},
                   {"picard_iters", st.picard_iters},
                   {"residual_norm", st.residual_norm},
                   {"step_diff", st.step_diff}};
    if (st.complementarity) {
      h["complementarity"] = *st.complementarity;
    } else {
      h["complementarity"] = nullptr;
    }
    hist.push_back(h);
  }
  j["continuation_history"] = hist;
  return j;
}

}  // namespace

int run_solve(const RunConfig& cfg, const std::string& out_dir, std::uint64_t seed,
              std::ostream& out, std::ostream& err) {
  try {
    const BuiltRun built = build_run(cfg, seed);
    SolveReport rep = continuation_solve(built.spec, built.solver);
    if (built.spec.hartman_radius) {
      // A-priori check of the field's sign condition on the sphere of radius M;
      // a violating field must surface as a failed verdict even if the computed
      // trajectory happens to stay inside the ball.
      const HartmanReport hr =
          check_hartman(built.spec.F, *built.spec.hartman_radius, 64, 128, 1e-9, seed);
      Verdict v;
      v.name = "hartman_field";
      v.applicable = true;
      v.passed = hr.passed;
      v.measured = hr.min_inner_product;
      v.threshold = -hr.tolerance;
      rep.verdicts.push_back(v);
    }
    write_text(out_path(out_dir, built.solution_table), solution_csv(rep));
    write_text(out_path(out_dir, built.report_path), report_json(built, rep).dump(2) + "\n");
    out << "status: "
        << (rep.status == SolveStatus::Converged ? "converged" : "non_convergence")
        << "\n";
    out << "lambda_final: " << format_double(rep.lambda_final) << "\n";
    out << "residual_norm: " << format_double(rep.residual_norm) << "\n";
    bool all_passed = true;
    for (const Verdict& v : rep.verdicts) {
      out << "verdict " << v.name << ": "
          << (v.applicable ? (v.passed ? "pass" : "FAIL") : "not applicable")
          << " (measured " << format_double(v.measured) << ", threshold "
          << format_double(v.threshold) << ")\n";
      if (v.applicable && !v.passed) all_passed = false;
    }
    if (rep.status != SolveStatus::Converged) {
      err << "error: solver did not converge (best residual "
          << format_double(rep.residual_norm) << ")\n";
      return 1;
    }
    return all_passed ? 0 : 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int run_verify(const RunConfig& cfg, const std::string& out_dir, std::uint64_t seed,
               std::ostream& out, std::ostream& err) {
  try {
    const BuiltRun built = build_run(cfg, seed);
    const ProblemSpec& spec = built.spec;
    const int N = spec.dim;
    ordered_json hyps = ordered_json::array();
    bool all = true;

    auto note = [&](ordered_json h, bool applicable, bool passed) {
      h["applicable"] = applicable;
      h["passed"] = passed;
      if (applicable && !passed) all = false;
      out << "hypothesis " << h["name"].get<std::string>() << ": "
          << (applicable ? (passed ? "pass" : "FAIL") : "not applicable") << "\n";
      hyps.push_back(std::move(h));
    };

    {
      const double r = spec.A.graph_residual(Vec::Zero(N), Vec::Zero(N));
      note({{"name", "zero_in_A_at_zero"}, {"measured", r}}, true, r <= 1e-9);
    }
    {
      const double r = spec.xi.resolvent(built.solver.mu, Vec::Zero(2 * N)).norm();
      note({{"name", "zero_pair_in_xi"}, {"measured", r}}, true, r <= 1e-9);
    }
    {
      ordered_json h{{"name", "hartman"}};
      bool applicable = spec.hartman_radius.has_value();
      bool passed = true;
      if (applicable) {
        const HartmanReport hr =
            check_hartman(spec.F, *spec.hartman_radius, 64, 128, 1e-9, seed);
        h["radius"] = hr.radius;
        h["min_inner_product"] = hr.min_inner_product;
        h["witness_time"] = hr.witness_time;
        if (!hr.passed) {
          h["witness_zeta"] = std::vector<double>(
              hr.witness_zeta.data(), hr.witness_zeta.data() + hr.witness_zeta.size());
        }
        passed = hr.passed;
      }
      note(std::move(h), applicable, passed);
    }
    {
      const double k = spec.hartman_radius.value_or(1.0);
      const double g = estimate_growth(spec.F, k, 64, 128, seed);
      note({{"name", "growth_bound"}, {"radius", k}, {"measured", g}}, true,
           std::isfinite(g));
    }
    {
      const HxiReport hx = check_h_xi(spec.xi, 100, built.solver.mu, 1.0, 1e-9, seed);
      ordered_json h{{"name", "xi_structure"},
                     {"sign_min", hx.sign_min},
                     {"max_diagonal_gap", hx.max_diagonal_gap},
                     {"max_expansion_ratio", hx.max_expansion_ratio},
                     {"sign_branch", hx.sign_branch},
                     {"diagonal_branch", hx.diagonal_branch}};
      note(std::move(h), true, hx.passed);
    }
    {
      const H0Report h0 = check_h0(spec.A, spec.xi, built.solver.lambda_schedule, 100,
                                   built.solver.mu, 1.0, 1e-9, seed);
      ordered_json h{{"name", "compatibility_h0"},
                     {"min_pairing", h0.min_pairing},
                     {"witness_lambda", h0.witness_lambda}};
      note(std::move(h), true, h0.passed);
    }

    ordered_json j;
    j["problem"] = problem_echo(built);
    j["hypotheses"] = hyps;
    write_text(out_path(out_dir, built.report_path), j.dump(2) + "\n");
    return all ? 0 : 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int run_study(const RunConfig& cfg, const std::string& out_dir, std::uint64_t seed,
              std::ostream& out, std::ostream& err) {
  try {
    const BuiltRun built = build_run(cfg, seed);
    if (built.study_grids.empty()) {
      throw ValidationError("outputs.study_grids: required for study runs");
    }
    if (built.study_reference.empty()) {
      throw ValidationError("outputs.study_reference: required for study runs");
    }
    const auto ref = reference_fn(built.study_reference, built.spec.dim, built.spec.horizon);
    const auto rows = convergence_study(built.spec, built.study_grids, built.solver, ref);
    std::string csv = "n,max_error,order\n";
    for (const StudyRow& r : rows) {
      csv += std::to_string(r.intervals) + "," + format_double(r.max_error) + "," +
             format_double(r.order) + "\n";
      out << "n=" << r.intervals << " max_error=" << format_double(r.max_error)
          << " order=" << format_double(r.order) << "\n";
    }
    write_text(out_path(out_dir, built.study_table), csv);
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

std::string catalog_text() {
  return
      "Problem catalog (set problem.catalog to one of these):\n"
      "  example1  end sets: x(0) in K1, x(T) in K2 with conic flux reactions.\n"
      "            boundary.k1 / boundary.k2: set descriptors (default singleton:0...).\n"
      "  example2  evolutionary variational inequality: A pinned to the orthant\n"
      "            cone (states and reactions stay nonnegative); end sets as in\n"
      "            example1 via boundary.k1 / boundary.k2.\n"
      "  example3  Dirichlet: x(0) = x(T) = 0.\n"
      "  example4  Neumann: x'(0) = x'(T) = 0.\n"
      "  example5  periodic: x(0) = x(T), phi(x'(0)) = phi(x'(T)).\n"
      "  example6  Sturm-Liouville: x(0) - theta x'(0) = 0, x(T) + eta x'(T) = 0;\n"
      "            boundary.theta / boundary.eta (default 1).\n"
      "\n"
      "Inline boundary (mutually exclusive with catalog): boundary.kind one of\n"
      "  dirichlet | neumann | periodic | sturm_liouville | product.\n"
      "\n"
      "Monotone map descriptors (problem.A, boundary.k1, boundary.k2):\n"
      "  zero | identity:alpha | orthant | box:l1,..;u1,.. | singleton:c1,.. |\n"
      "  ball:c1,..;r | halfspace:g1,..;c | l1:gamma\n"
      "\n"
      "Builtin fields (problem.field):\n"
      "  builtin:msin      -pi^2 sin(pi t / T) in every component\n"
      "  builtin:plap3     -2 (p-1) |T - 2t|^(p-2) in every component\n"
      "  builtin:constant  field.value = c1,..,cN\n"
      "  builtin:linear    F(t, zeta) = zeta\n"
      "  builtin:negated   F(t, zeta) = -zeta\n"
      "  builtin:step      field.value1, field.value2, field.switch\n"
      "  tabulated         field.rows = t v1 .. vN; t v1 .. vN; ...\n"
      "\n"
      "Study references (outputs.study_reference): sinpi | parabola | zero\n";
}

}  // namespace plbvp
