#include "plbvp.h"

#include <cstring>
#include <functional>
#include <iostream>
#include <ostream>
#include <streambuf>
#include <string>

#include "boundary.hpp"
#include "core.hpp"
#include "fields.hpp"
#include "monotone.hpp"
#include "run_config.hpp"
#include "solver.hpp"

using plbvp::Vec;

struct plbvp_monotone {
  plbvp::MonotoneMap map;
};
struct plbvp_field {
  plbvp::MultiField field;
};
struct plbvp_boundary {
  plbvp::BoundaryOperator bc;
};
struct plbvp_problem {
  plbvp::ProblemSpec spec;
};
struct plbvp_options {
  plbvp::SolverConfig cfg;
};
struct plbvp_report {
  plbvp::SolveReport rep;
};
struct plbvp_run {
  plbvp::RunConfig cfg;
};

namespace {

thread_local std::string g_last_error;

int fail(int code, const std::string& what) {
  g_last_error = what;
  return code;
}

template <typename F>
int guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return PLBVP_OK;
  } catch (const plbvp::ParseError& e) {
    return fail(PLBVP_ERR_PARSE, e.what());
  } catch (const plbvp::ValidationError& e) {
    return fail(PLBVP_ERR_VALIDATION, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(PLBVP_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::domain_error& e) {
    return fail(PLBVP_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(PLBVP_ERR_RUNTIME, e.what());
  }
}

void require_ptr(const void* p, const char* what) {
  if (!p) throw std::invalid_argument(std::string(what) + " must not be null");
}

Vec to_vec(const double* data, int dim) {
  require_ptr(data, "vector argument");
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = data[i];
  return v;
}

void from_vec(const Vec& v, double* out) {
  require_ptr(out, "output buffer");
  for (int i = 0; i < v.size(); ++i) out[i] = v[i];
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

struct NullBuffer : std::streambuf {
  int overflow(int c) override { return c; }
};

int run_verb(const plbvp_run* run, const char* output_dir, uint64_t seed, int quiet,
             int* exit_code,
             int (*verb)(const plbvp::RunConfig&, const std::string&, std::uint64_t,
                         std::ostream&, std::ostream&)) {
  return guarded([&] {
    require_ptr(run, "run");
    require_ptr(exit_code, "exit_code");
    NullBuffer null_buffer;
    std::ostream null_stream(&null_buffer);
    std::ostream& out = quiet ? null_stream : std::cout;
    const std::string dir = output_dir ? output_dir : "";
    *exit_code = verb(run->cfg, dir, seed, out, std::cerr);
  });
}

int set_option(plbvp_options* options,
               const std::function<void(plbvp::SolverConfig&)>& fn) {
  return guarded([&] {
    require_ptr(options, "options");
    plbvp::SolverConfig next = options->cfg;
    fn(next);
    next.validate();
    options->cfg = next;
  });
}

}  // namespace

extern "C" {

const char* plbvp_last_error(void) { return g_last_error.c_str(); }

/* ---------- monotone maps ---------- */

int plbvp_monotone_zero(int dim, plbvp_monotone** out) {
  return guarded([&] {
    require_ptr(out, "out");
    *out = new plbvp_monotone{plbvp::MonotoneMap::zero(dim)};
  });
}

int plbvp_monotone_identity(int dim, double alpha, plbvp_monotone** out) {
  return guarded([&] {
    require_ptr(out, "out");
    *out = new plbvp_monotone{plbvp::MonotoneMap::identity_scaled(dim, alpha)};
  });
}

int plbvp_monotone_orthant(int dim, plbvp_monotone** out) {
  return guarded([&] {
    require_ptr(out, "out");
    *out = new plbvp_monotone{plbvp::MonotoneMap::orthant_cone(dim)};
  });
}

int plbvp_monotone_box(int dim, const double* lower, const double* upper,
                       plbvp_monotone** out) {
  return guarded([&] {
    require_ptr(out, "out");
    *out = new plbvp_monotone{
        plbvp::MonotoneMap::box_cone(to_vec(lower, dim), to_vec(upper, dim))};
  });
}

int plbvp_monotone_singleton(int dim, const double* point, plbvp_monotone** out) {
  return guarded([&] {
    require_ptr(out, "out");
    *out = new plbvp_monotone{plbvp::MonotoneMap::singleton_cone(to_vec(point, dim))};
  });
}

int plbvp_monotone_ball(int dim, const double* center, double radius,
                        plbvp_monotone** out) {
  return guarded([&] {
    require_ptr(out, "out");
    *out = new plbvp_monotone{plbvp::MonotoneMap::ball_cone(to_vec(center, dim), radius)};
  });
}

int plbvp_monotone_halfspace(int dim, const double* normal, double offset,
                             plbvp_monotone** out) {
  return guarded([&] {
    require_ptr(out, "out");
    *out = new plbvp_monotone{
        plbvp::MonotoneMap::halfspace_cone(to_vec(normal, dim), offset)};
  });
}

int plbvp_monotone_l1(int dim, double weight, plbvp_monotone** out) {
  return guarded([&] {
    require_ptr(out, "out");
    *out = new plbvp_monotone{plbvp::MonotoneMap::l1_prox(dim, weight)};
  });
}

void plbvp_monotone_free(plbvp_monotone* map) { delete map; }

int plbvp_monotone_resolvent(const plbvp_monotone* map, double lambda, const double* x,
                             double* out) {
  return guarded([&] {
    require_ptr(map, "map");
    from_vec(map->map.resolvent(lambda, to_vec(x, map->map.dim())), out);
  });
}

int plbvp_monotone_yosida(const plbvp_monotone* map, double lambda, const double* x,
                          double* out) {
  return guarded([&] {
    require_ptr(map, "map");
    from_vec(map->map.yosida(lambda, to_vec(x, map->map.dim())), out);
  });
}

int plbvp_monotone_minimal_section(const plbvp_monotone* map, const double* x,
                                   double* out) {
  return guarded([&] {
    require_ptr(map, "map");
    from_vec(map->map.minimal_section(to_vec(x, map->map.dim())), out);
  });
}

int plbvp_monotone_graph_residual(const plbvp_monotone* map, const double* x,
                                  const double* v, double* out) {
  return guarded([&] {
    require_ptr(map, "map");
    require_ptr(out, "out");
    *out = map->map.graph_residual(to_vec(x, map->map.dim()), to_vec(v, map->map.dim()));
  });
}

/* ---------- fields ---------- */

int plbvp_field_builtin(const char* name, int dim, double horizon, double p,
                        const double* params, size_t params_len, plbvp_field** out) {
  return guarded([&] {
    require_ptr(name, "name");
    require_ptr(out, "out");
    const std::string n(name);
    auto need = [&](size_t len) {
      if (params_len != len || (len > 0 && !params)) {
        throw std::invalid_argument("field '" + n + "' needs " + std::to_string(len) +
                                    " parameters");
      }
    };
    if (n == "msin") {
      need(0);
      *out = new plbvp_field{plbvp::MultiField::msin(dim, horizon)};
    } else if (n == "plap3") {
      need(0);
      *out = new plbvp_field{plbvp::MultiField::plap3(dim, horizon, p)};
    } else if (n == "linear") {
      need(0);
      *out = new plbvp_field{plbvp::MultiField::linear(dim, horizon)};
    } else if (n == "negated") {
      need(0);
      *out = new plbvp_field{plbvp::MultiField::negated(dim, horizon)};
    } else if (n == "constant") {
      need(static_cast<size_t>(dim));
      *out = new plbvp_field{plbvp::MultiField::constant(dim, horizon, to_vec(params, dim))};
    } else if (n == "step") {
      need(2 * static_cast<size_t>(dim) + 1);
      *out = new plbvp_field{plbvp::MultiField::step(dim, horizon, to_vec(params, dim),
                                                     to_vec(params + dim, dim),
                                                     params[2 * dim])};
    } else {
      throw std::invalid_argument("unknown builtin field '" + n + "'");
    }
  });
}

int plbvp_field_tabulated(int dim, double horizon, const double* rows, size_t row_count,
                          plbvp_field** out) {
  return guarded([&] {
    require_ptr(rows, "rows");
    require_ptr(out, "out");
    std::vector<std::pair<double, Vec>> table;
    for (size_t r = 0; r < row_count; ++r) {
      const double* row = rows + r * (dim + 1);
      table.emplace_back(row[0], to_vec(row + 1, dim));
    }
    *out = new plbvp_field{plbvp::MultiField::tabulated(dim, horizon, std::move(table))};
  });
}

void plbvp_field_free(plbvp_field* field) { delete field; }

int plbvp_field_select(const plbvp_field* field, double t, const double* zeta,
                       double* out) {
  return guarded([&] {
    require_ptr(field, "field");
    from_vec(field->field.select(t, to_vec(zeta, field->field.dim())), out);
  });
}

int plbvp_field_check_hartman(const plbvp_field* field, double radius, int time_samples,
                              int sphere_samples, double tol, uint64_t seed, int* passed,
                              double* min_inner_product) {
  return guarded([&] {
    require_ptr(field, "field");
    const plbvp::HartmanReport rep = plbvp::check_hartman(
        field->field, radius, time_samples, sphere_samples, tol, seed);
    if (passed) *passed = rep.passed ? 1 : 0;
    if (min_inner_product) *min_inner_product = rep.min_inner_product;
  });
}

int plbvp_field_estimate_growth(const plbvp_field* field, double radius,
                                int time_samples, int ball_samples, uint64_t seed,
                                double* out) {
  return guarded([&] {
    require_ptr(field, "field");
    require_ptr(out, "out");
    *out = plbvp::estimate_growth(field->field, radius, time_samples, ball_samples, seed);
  });
}

/* ---------- boundary operators ---------- */

int plbvp_boundary_dirichlet(int dim, plbvp_boundary** out) {
  return guarded([&] {
    require_ptr(out, "out");
    *out = new plbvp_boundary{plbvp::BoundaryOperator::dirichlet(dim)};
  });
}

int plbvp_boundary_neumann(int dim, plbvp_boundary** out) {
  return guarded([&] {
    require_ptr(out, "out");
    *out = new plbvp_boundary{plbvp::BoundaryOperator::neumann(dim)};
  });
}

int plbvp_boundary_periodic(int dim, plbvp_boundary** out) {
  return guarded([&] {
    require_ptr(out, "out");
    *out = new plbvp_boundary{plbvp::BoundaryOperator::periodic(dim)};
  });
}

int plbvp_boundary_sturm_liouville(int dim, double p, double theta, double eta,
                                   plbvp_boundary** out) {
  return guarded([&] {
    require_ptr(out, "out");
    *out = new plbvp_boundary{plbvp::BoundaryOperator::sturm_liouville(
        dim, plbvp::Exponent(p), theta, eta)};
  });
}

int plbvp_boundary_product(const plbvp_monotone* first, const plbvp_monotone* second,
                           plbvp_boundary** out) {
  return guarded([&] {
    require_ptr(first, "first");
    require_ptr(second, "second");
    require_ptr(out, "out");
    *out = new plbvp_boundary{plbvp::BoundaryOperator::product(first->map, second->map)};
  });
}

void plbvp_boundary_free(plbvp_boundary* bc) { delete bc; }

int plbvp_boundary_resolvent(const plbvp_boundary* bc, double mu, const double* w,
                             double* out) {
  return guarded([&] {
    require_ptr(bc, "boundary");
    from_vec(bc->bc.resolvent(mu, to_vec(w, 2 * bc->bc.dim())), out);
  });
}

int plbvp_boundary_residual(const plbvp_boundary* bc, double mu, const double* a,
                            const double* aT, const double* b, const double* bT,
                            double* out) {
  return guarded([&] {
    require_ptr(bc, "boundary");
    const int dim = bc->bc.dim();
    from_vec(plbvp::bc_residual(bc->bc, mu, to_vec(a, dim), to_vec(aT, dim),
                                to_vec(b, dim), to_vec(bT, dim)),
             out);
  });
}

/* ---------- problems, options, reports ---------- */

int plbvp_problem_create(int dim, double p, double horizon, const plbvp_monotone* A,
                         const plbvp_field* F, const plbvp_boundary* xi,
                         const double* hartman_radius, plbvp_problem** out) {
  return guarded([&] {
    require_ptr(A, "A");
    require_ptr(F, "F");
    require_ptr(xi, "xi");
    require_ptr(out, "out");
    plbvp::ProblemSpec spec{dim,     plbvp::Exponent(p), horizon, A->map,
                            F->field, xi->bc,            {}};
    if (hartman_radius) spec.hartman_radius = *hartman_radius;
    spec.validate();
    *out = new plbvp_problem{std::move(spec)};
  });
}

void plbvp_problem_free(plbvp_problem* problem) { delete problem; }

int plbvp_options_create(plbvp_options** out) {
  return guarded([&] {
    require_ptr(out, "out");
    *out = new plbvp_options{};
  });
}

void plbvp_options_free(plbvp_options* options) { delete options; }

int plbvp_options_set_intervals(plbvp_options* options, int n) {
  return set_option(options, [n](plbvp::SolverConfig& c) { c.intervals = n; });
}

int plbvp_options_set_lambda_schedule(plbvp_options* options, const double* values,
                                      size_t len) {
  return set_option(options, [&](plbvp::SolverConfig& c) {
    require_ptr(values, "values");
    c.lambda_schedule.assign(values, values + len);
  });
}

int plbvp_options_set_epsilon_schedule(plbvp_options* options, const double* values,
                                       size_t len) {
  return set_option(options, [&](plbvp::SolverConfig& c) {
    if (len > 0) require_ptr(values, "values");
    c.epsilon_schedule.assign(values, values + len);
  });
}

int plbvp_options_set_newton(plbvp_options* options, int max_iters, double tol) {
  return set_option(options, [&](plbvp::SolverConfig& c) {
    c.newton_max_iters = max_iters;
    c.newton_tol = tol;
  });
}

int plbvp_options_set_damping(plbvp_options* options, double backtrack_factor,
                              double min_step) {
  return set_option(options, [&](plbvp::SolverConfig& c) {
    c.backtrack_factor = backtrack_factor;
    c.min_step = min_step;
  });
}

int plbvp_options_set_picard_iters(plbvp_options* options, int iters) {
  return set_option(options, [&](plbvp::SolverConfig& c) { c.picard_fallback_iters = iters; });
}

int plbvp_options_set_mu(plbvp_options* options, double mu) {
  return set_option(options, [&](plbvp::SolverConfig& c) { c.mu = mu; });
}

int plbvp_options_set_seed(plbvp_options* options, uint64_t seed) {
  return set_option(options, [&](plbvp::SolverConfig& c) { c.seed = seed; });
}

int plbvp_solve(const plbvp_problem* problem, const plbvp_options* options,
                plbvp_report** out) {
  return guarded([&] {
    require_ptr(problem, "problem");
    require_ptr(out, "out");
    const plbvp::SolverConfig cfg = options ? options->cfg : plbvp::SolverConfig{};
    *out = new plbvp_report{plbvp::continuation_solve(problem->spec, cfg)};
  });
}

void plbvp_report_free(plbvp_report* report) { delete report; }

int plbvp_report_status(const plbvp_report* report, int* converged) {
  return guarded([&] {
    require_ptr(report, "report");
    require_ptr(converged, "converged");
    *converged = report->rep.status == plbvp::SolveStatus::Converged ? 1 : 0;
  });
}

int plbvp_report_dim(const plbvp_report* report, int* dim) {
  return guarded([&] {
    require_ptr(report, "report");
    require_ptr(dim, "dim");
    *dim = report->rep.trajectory.dim();
  });
}

int plbvp_report_intervals(const plbvp_report* report, int* n) {
  return guarded([&] {
    require_ptr(report, "report");
    require_ptr(n, "n");
    *n = report->rep.trajectory.intervals();
  });
}

int plbvp_report_scalar(const plbvp_report* report, const char* name, double* out) {
  return guarded([&] {
    require_ptr(report, "report");
    require_ptr(name, "name");
    require_ptr(out, "out");
    const std::string n(name);
    const plbvp::SolveReport& r = report->rep;
    if (n == "lambda_final") {
      *out = r.lambda_final;
    } else if (n == "residual_norm") {
      *out = r.residual_norm;
    } else if (n == "bc_residual_norm") {
      *out = r.bc_residual_norm;
    } else if (n == "hartman_max_norm") {
      *out = r.hartman_max_norm;
    } else if (n == "graph_membership_residual") {
      *out = r.graph_membership_residual;
    } else {
      throw std::invalid_argument("unknown report scalar '" + n + "'");
    }
  });
}

int plbvp_report_node(const plbvp_report* report, int i, double* t, double* x) {
  return guarded([&] {
    require_ptr(report, "report");
    const plbvp::TrajectoryGrid& traj = report->rep.trajectory;
    if (i < 0 || i > traj.intervals()) throw std::invalid_argument("node index out of range");
    if (t) *t = traj.grid.node(i);
    if (x) from_vec(traj.values[i], x);
  });
}

int plbvp_report_trace(const plbvp_report* report, const char* name, int i, double* out) {
  return guarded([&] {
    require_ptr(report, "report");
    require_ptr(name, "name");
    const std::string n(name);
    const plbvp::SolveReport& r = report->rep;
    const std::vector<Vec>* trace = nullptr;
    if (n == "flux") {
      trace = &r.flux;
    } else if (n == "selection") {
      trace = &r.selection_trace;
    } else if (n == "multiplier") {
      trace = &r.multiplier_trace;
    } else {
      throw std::invalid_argument("unknown report trace '" + n + "'");
    }
    if (i < 0 || static_cast<size_t>(i) >= trace->size()) {
      throw std::invalid_argument("trace index out of range");
    }
    from_vec((*trace)[i], out);
  });
}

int plbvp_report_history_length(const plbvp_report* report, int* len) {
  return guarded([&] {
    require_ptr(report, "report");
    require_ptr(len, "len");
    *len = static_cast<int>(report->rep.history.size());
  });
}

int plbvp_report_history(const plbvp_report* report, int idx, double* lambda,
                         int* newton_iters, int* picard_iters, double* residual_norm,
                         double* step_diff) {
  return guarded([&] {
    require_ptr(report, "report");
    if (idx < 0 || static_cast<size_t>(idx) >= report->rep.history.size()) {
      throw std::invalid_argument("history index out of range");
    }
    const plbvp::ContinuationStep& st = report->rep.history[idx];
    if (lambda) *lambda = st.lambda;
    if (newton_iters) *newton_iters = st.newton_iters;
    if (picard_iters) *picard_iters = st.picard_iters;
    if (residual_norm) *residual_norm = st.residual_norm;
    if (step_diff) *step_diff = st.step_diff;
  });
}

int plbvp_report_verdict_count(const plbvp_report* report, int* count) {
  return guarded([&] {
    require_ptr(report, "report");
    require_ptr(count, "count");
    *count = static_cast<int>(report->rep.verdicts.size());
  });
}

int plbvp_report_verdict(const plbvp_report* report, int idx, const char** name,
                         int* applicable, int* passed, double* measured,
                         double* threshold) {
  return guarded([&] {
    require_ptr(report, "report");
    if (idx < 0 || static_cast<size_t>(idx) >= report->rep.verdicts.size()) {
      throw std::invalid_argument("verdict index out of range");
    }
    const plbvp::Verdict& v = report->rep.verdicts[idx];
    if (name) *name = v.name.c_str();
    if (applicable) *applicable = v.applicable ? 1 : 0;
    if (passed) *passed = v.passed ? 1 : 0;
    if (measured) *measured = v.measured;
    if (threshold) *threshold = v.threshold;
  });
}

/* ---------- run configurations ---------- */

int plbvp_run_parse(const char* text, plbvp_run** out) {
  return guarded([&] {
    require_ptr(text, "text");
    require_ptr(out, "out");
    *out = new plbvp_run{plbvp::parse_config(text)};
  });
}

int plbvp_run_override(plbvp_run* run, const char* dotted_key, const char* value) {
  return guarded([&] {
    require_ptr(run, "run");
    require_ptr(dotted_key, "dotted_key");
    require_ptr(value, "value");
    plbvp::apply_override(run->cfg, dotted_key, value);
  });
}

int plbvp_run_serialize(const plbvp_run* run, char** out_text) {
  return guarded([&] {
    require_ptr(run, "run");
    require_ptr(out_text, "out_text");
    *out_text = dup_string(plbvp::serialize_config(run->cfg));
  });
}

int plbvp_run_equals(const plbvp_run* a, const plbvp_run* b, int* equal) {
  return guarded([&] {
    require_ptr(a, "a");
    require_ptr(b, "b");
    require_ptr(equal, "equal");
    *equal = a->cfg == b->cfg ? 1 : 0;
  });
}

void plbvp_run_free(plbvp_run* run) { delete run; }

void plbvp_string_free(char* text) { delete[] text; }

int plbvp_run_solve(const plbvp_run* run, const char* output_dir, uint64_t seed,
                    int quiet, int* exit_code) {
  return run_verb(run, output_dir, seed, quiet, exit_code, plbvp::run_solve);
}

int plbvp_run_verify(const plbvp_run* run, const char* output_dir, uint64_t seed,
                     int quiet, int* exit_code) {
  return run_verb(run, output_dir, seed, quiet, exit_code, plbvp::run_verify);
}

int plbvp_run_study(const plbvp_run* run, const char* output_dir, uint64_t seed,
                    int quiet, int* exit_code) {
  return run_verb(run, output_dir, seed, quiet, exit_code, plbvp::run_study);
}

int plbvp_catalog_text(char** out_text) {
  return guarded([&] {
    require_ptr(out_text, "out_text");
    *out_text = dup_string(plbvp::catalog_text());
  });
}

}  // extern "C"
