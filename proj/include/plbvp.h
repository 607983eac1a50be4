/*
 * C interface of the plbvp shared library: a solver for second-order vector
 * p-Laplacian boundary value inclusions
 *
 *     (|x'(t)|^(p-2) x'(t))' in A(x(t)) + F(t, x(t)),   t in [0, T],
 *     (phi(x'(0)), -phi(x'(T))) in xi(x(0), x(T)),
 *
 * with A a maximal monotone map given by its resolvents, F a measurable
 * multivalued field given by a selection, and xi a multivalued boundary
 * operator.  The solver regularizes A by its Yosida approximation, follows a
 * decreasing regularization schedule with damped Newton steps, and reports
 * a-posteriori certificates for the computed trajectory.
 *
 * Conventions:
 *   - All functions returning int yield PLBVP_OK (0) on success or a nonzero
 *     error code; plbvp_last_error() describes the most recent failure in the
 *     calling thread.
 *   - Vectors are caller-allocated double arrays of the documented length.
 *   - Objects are created through factory functions and released with the
 *     matching *_free function.  Handles are opaque.
 */

#ifndef PLBVP_H
#define PLBVP_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define PLBVP_OK 0
#define PLBVP_ERR_INVALID_ARGUMENT 1
#define PLBVP_ERR_PARSE 2
#define PLBVP_ERR_VALIDATION 3
#define PLBVP_ERR_RUNTIME 4

/* Message describing the last failure in this thread; empty string if none. */
const char* plbvp_last_error(void);

typedef struct plbvp_monotone plbvp_monotone;
typedef struct plbvp_field plbvp_field;
typedef struct plbvp_boundary plbvp_boundary;
typedef struct plbvp_problem plbvp_problem;
typedef struct plbvp_options plbvp_options;
typedef struct plbvp_report plbvp_report;
typedef struct plbvp_run plbvp_run;

/* ---------- maximal monotone maps on R^dim ---------- */

int plbvp_monotone_zero(int dim, plbvp_monotone** out);
int plbvp_monotone_identity(int dim, double alpha, plbvp_monotone** out);
/* Normal cones of: the nonnegative orthant, a box [lower, upper] (entries may
 * be +-HUGE_VAL), a single point, a closed ball, a half-space {z: (g,z) <= c}. */
int plbvp_monotone_orthant(int dim, plbvp_monotone** out);
int plbvp_monotone_box(int dim, const double* lower, const double* upper,
                       plbvp_monotone** out);
int plbvp_monotone_singleton(int dim, const double* point, plbvp_monotone** out);
int plbvp_monotone_ball(int dim, const double* center, double radius,
                        plbvp_monotone** out);
int plbvp_monotone_halfspace(int dim, const double* normal, double offset,
                             plbvp_monotone** out);
/* Subdifferential of z -> weight * |z|_1. */
int plbvp_monotone_l1(int dim, double weight, plbvp_monotone** out);
void plbvp_monotone_free(plbvp_monotone* map);

/* J_lambda(x) = (I + lambda A)^(-1) x; out has length dim. */
int plbvp_monotone_resolvent(const plbvp_monotone* map, double lambda, const double* x,
                             double* out);
/* A_lambda(x) = (x - J_lambda(x)) / lambda; out has length dim. */
int plbvp_monotone_yosida(const plbvp_monotone* map, double lambda, const double* x,
                          double* out);
/* Minimal-norm element of A(x); fails if x is outside the domain. */
int plbvp_monotone_minimal_section(const plbvp_monotone* map, const double* x,
                                   double* out);
/* |J_1(x + v) - x|: zero exactly when v belongs to A(x). */
int plbvp_monotone_graph_residual(const plbvp_monotone* map, const double* x,
                                  const double* v, double* out);

/* ---------- multivalued fields F(t, zeta) ---------- */

/* Builtins by name; p is used by "plap3" and ignored otherwise.
 *   "msin"     -pi^2 sin(pi t / horizon) in every component (no params)
 *   "plap3"    -2 (p-1) |horizon - 2t|^(p-2) in every component (no params)
 *   "linear"   F(t, zeta) = zeta (no params)
 *   "negated"  F(t, zeta) = -zeta (no params)
 *   "constant" params = value, params_len = dim
 *   "step"     params = value1, value2, switch_time; params_len = 2*dim + 1
 */
int plbvp_field_builtin(const char* name, int dim, double horizon, double p,
                        const double* params, size_t params_len, plbvp_field** out);
/* rows: row_count rows of (t, v_1..v_dim), strictly increasing in t; linear
 * interpolation between rows, clamped outside. */
int plbvp_field_tabulated(int dim, double horizon, const double* rows, size_t row_count,
                          plbvp_field** out);
void plbvp_field_free(plbvp_field* field);

/* One element of F(t, zeta); out has length dim. */
int plbvp_field_select(const plbvp_field* field, double t, const double* zeta,
                       double* out);
/* Samples the boundary sign condition (u, zeta) >= 0 over |zeta| = radius. */
int plbvp_field_check_hartman(const plbvp_field* field, double radius, int time_samples,
                              int sphere_samples, double tol, uint64_t seed, int* passed,
                              double* min_inner_product);
/* Sampled bound on sup |F(t, zeta)| over t in [0, horizon], |zeta| <= radius. */
int plbvp_field_estimate_growth(const plbvp_field* field, double radius,
                                int time_samples, int ball_samples, uint64_t seed,
                                double* out);

/* ---------- boundary operators on pairs (x(0), x(T)) ---------- */

int plbvp_boundary_dirichlet(int dim, plbvp_boundary** out); /* x(0) = x(T) = 0   */
int plbvp_boundary_neumann(int dim, plbvp_boundary** out);   /* x'(0) = x'(T) = 0 */
int plbvp_boundary_periodic(int dim, plbvp_boundary** out);  /* x(0) = x(T), matching flux */
/* x(0) - theta x'(0) = 0 and x(T) + eta x'(T) = 0; needs p >= 2, theta, eta > 0. */
int plbvp_boundary_sturm_liouville(int dim, double p, double theta, double eta,
                                   plbvp_boundary** out);
/* Blockwise product: first acts on x(0), second on x(T) (both of dimension dim). */
int plbvp_boundary_product(const plbvp_monotone* first, const plbvp_monotone* second,
                           plbvp_boundary** out);
void plbvp_boundary_free(plbvp_boundary* bc);

/* Resolvent on R^(2*dim); w and out have length 2*dim. */
int plbvp_boundary_resolvent(const plbvp_boundary* bc, double mu, const double* w,
                             double* out);
/* Fixed-point residual (a, aT) - J_mu((a, aT) + mu (b, bT)); every argument has
 * length dim, out has length 2*dim.  Zero exactly when (b, bT) in xi(a, aT). */
int plbvp_boundary_residual(const plbvp_boundary* bc, double mu, const double* a,
                            const double* aT, const double* b, const double* bT,
                            double* out);

/* ---------- problems, solver options, reports ---------- */

/* hartman_radius may be NULL (no truncation) or point at a positive radius. */
int plbvp_problem_create(int dim, double p, double horizon, const plbvp_monotone* A,
                         const plbvp_field* F, const plbvp_boundary* xi,
                         const double* hartman_radius, plbvp_problem** out);
void plbvp_problem_free(plbvp_problem* problem);

int plbvp_options_create(plbvp_options** out);
void plbvp_options_free(plbvp_options* options);
int plbvp_options_set_intervals(plbvp_options* options, int n);
int plbvp_options_set_lambda_schedule(plbvp_options* options, const double* values,
                                      size_t len);
int plbvp_options_set_epsilon_schedule(plbvp_options* options, const double* values,
                                       size_t len);
int plbvp_options_set_newton(plbvp_options* options, int max_iters, double tol);
int plbvp_options_set_damping(plbvp_options* options, double backtrack_factor,
                              double min_step);
int plbvp_options_set_picard_iters(plbvp_options* options, int iters);
int plbvp_options_set_mu(plbvp_options* options, double mu);
int plbvp_options_set_seed(plbvp_options* options, uint64_t seed);

/* Runs the full regularization schedule from the zero initial trajectory.
 * Succeeds even when the iteration stalls; query plbvp_report_status. */
int plbvp_solve(const plbvp_problem* problem, const plbvp_options* options,
                plbvp_report** out);
void plbvp_report_free(plbvp_report* report);

/* converged receives 1 when the final schedule step met its tolerance. */
int plbvp_report_status(const plbvp_report* report, int* converged);
int plbvp_report_dim(const plbvp_report* report, int* dim);
int plbvp_report_intervals(const plbvp_report* report, int* n);
/* name: "lambda_final", "residual_norm", "bc_residual_norm", "hartman_max_norm",
 * "graph_membership_residual". */
int plbvp_report_scalar(const plbvp_report* report, const char* name, double* out);
/* Node i in [0, n]; t may be NULL; x has length dim. */
int plbvp_report_node(const plbvp_report* report, int i, double* t, double* x);
/* name: "flux" (i in [0, n)), "selection" or "multiplier" (i in [0, n]);
 * out has length dim. */
int plbvp_report_trace(const plbvp_report* report, const char* name, int i, double* out);
int plbvp_report_history_length(const plbvp_report* report, int* len);
/* Any output pointer may be NULL. */
int plbvp_report_history(const plbvp_report* report, int idx, double* lambda,
                         int* newton_iters, int* picard_iters, double* residual_norm,
                         double* step_diff);
int plbvp_report_verdict_count(const plbvp_report* report, int* count);
/* name points into report-owned storage (valid until the report is freed). */
int plbvp_report_verdict(const plbvp_report* report, int idx, const char** name,
                         int* applicable, int* passed, double* measured,
                         double* threshold);

/* ---------- run configurations (config text -> runs) ---------- */

int plbvp_run_parse(const char* text, plbvp_run** out);
int plbvp_run_override(plbvp_run* run, const char* dotted_key, const char* value);
/* Canonical serialization; free the returned text with plbvp_string_free. */
int plbvp_run_serialize(const plbvp_run* run, char** out_text);
int plbvp_run_equals(const plbvp_run* a, const plbvp_run* b, int* equal);
void plbvp_run_free(plbvp_run* run);
void plbvp_string_free(char* text);

/* Execute a verb.  Files go under output_dir ("" or "." for the working
 * directory); summaries go to stdout unless quiet; diagnostics go to stderr.
 * exit_code receives 0 (success, all verdicts pass), 2 (finished, some verdict
 * failed) or 1 (hard error). */
int plbvp_run_solve(const plbvp_run* run, const char* output_dir, uint64_t seed,
                    int quiet, int* exit_code);
int plbvp_run_verify(const plbvp_run* run, const char* output_dir, uint64_t seed,
                     int quiet, int* exit_code);
int plbvp_run_study(const plbvp_run* run, const char* output_dir, uint64_t seed,
                    int quiet, int* exit_code);

/* Parameter schema of the built-in problem catalog. */
int plbvp_catalog_text(char** out_text);

#ifdef __cplusplus
}
#endif

#endif /* PLBVP_H */
