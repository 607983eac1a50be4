#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "boundary.hpp"
#include "core.hpp"
#include "fields.hpp"
#include "monotone.hpp"

namespace plbvp {

// Data of the boundary value inclusion
//   (phi(x'(t)))' in A(x(t)) + F(t, x(t)),
//   (phi(x'(0)), -phi(x'(T))) in xi(x(0), x(T)).
struct ProblemSpec {
  int dim;
  Exponent p;
  double horizon;  // T
  MonotoneMap A;
  MultiField F;
  BoundaryOperator xi;
  // Truncation radius M.  When set, the solver works with the retracted
  // right-hand side and certifies max_i |x_i| <= M + 10 h afterwards.
  std::optional<double> hartman_radius;

  // Throws std::invalid_argument when dimensions disagree, the horizon is
  // inconsistent, or 0 does not belong to A(0).
  void validate() const;
};

struct SolverConfig {
  int intervals = 64;
  std::vector<double> lambda_schedule = {1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  // Jacobian smoothing values; empty means epsilon = sqrt(lambda) * h.
  std::vector<double> epsilon_schedule;
  int newton_max_iters = 50;
  double newton_tol = 1e-10;
  double backtrack_factor = 0.5;
  double min_step = 9.5367431640625e-07;  // 2^-20
  int picard_fallback_iters = 200;
  double mu = 1.0;  // boundary resolvent parameter
  std::uint64_t seed = 0;

  void validate() const;
  double epsilon_for(size_t schedule_index, double h) const;
};

enum class SolveStatus { Converged, NonConvergence };

struct ContinuationStep {
  double lambda = 0.0;
  int newton_iters = 0;
  int picard_iters = 0;
  double residual_norm = 0.0;
  // max-node difference from the previous lambda solution (initial iterate for
  // the first entry)
  double step_diff = 0.0;
  // max_i,k |min(x_ik, -u_ik)| when A is the orthant normal cone, else unset
  std::optional<double> complementarity;
};

struct Verdict {
  std::string name;
  bool applicable = true;
  bool passed = false;
  double measured = 0.0;
  double threshold = 0.0;
};

struct SolveReport {
  SolveReport(SolveStatus s, TrajectoryGrid t) : status(s), trajectory(std::move(t)) {}

  SolveStatus status = SolveStatus::NonConvergence;
  TrajectoryGrid trajectory;
  std::vector<Vec> flux;             // n entries phi(d_{i+1/2})
  std::vector<Vec> selection_trace;  // n+1 field selections at the nodes
  std::vector<Vec> multiplier_trace; // n+1 entries A_lambda(x_i) at the final lambda
  double lambda_final = 0.0;
  double residual_norm = 0.0;
  double bc_residual_norm = 0.0;
  double hartman_max_norm = 0.0;
  double graph_membership_residual = 0.0;
  std::vector<ContinuationStep> history;
  std::vector<double> newton_residual_history;  // residual norms seen at the last lambda
  std::vector<Verdict> verdicts;
};

// Residual of the discretized regularized (and, when M is set, truncated)
// problem at the given nodal trajectory.  Layout: rows [0, N) first half of
// the boundary residual, rows [iN, iN+N) for i in [1, n) the interior flux
// equations, rows [nN, nN+N) second half of the boundary residual.  A positive
// `epsilon` replaces every phi evaluation by the smoothed
// phi_eps(z) = (|z|^2 + eps^2)^((p-2)/2) z; pass 0 for the exact residual.
Vec assemble_residual(const ProblemSpec& spec, double lambda, double epsilon,
                      const TrajectoryGrid& traj, const SolverConfig& config);

// Damped Newton (finite-difference sparse Jacobian, smoothed phi in the
// Jacobian only) with a Picard fallback x <- x - h^(p-1) residual.
SolveReport solve_regularized(const ProblemSpec& spec, double lambda, double epsilon,
                              const TrajectoryGrid& init, const SolverConfig& config);

// Warm-started sweep over config.lambda_schedule; the final report carries the
// a-posteriori certificates.
SolveReport continuation_solve(const ProblemSpec& spec, const SolverConfig& config);

// Recomputes the certificates from report.trajectory: Hartman bound, discrete
// Green inequality, derivative bound, boundary residual, graph membership.
std::vector<Verdict> verify_solution(const ProblemSpec& spec, const SolveReport& report,
                                     const SolverConfig& config);

struct StudyRow {
  int intervals = 0;
  double max_error = 0.0;
  double order = 0.0;  // log2(previous error / this error); 0 for the first row
};

// Solves on each grid (entries must double) and reports max nodal error
// against the reference trajectory t -> x(t) together with observed orders.
std::vector<StudyRow> convergence_study(const ProblemSpec& spec,
                                        const std::vector<int>& grids,
                                        const SolverConfig& config,
                                        const std::function<Vec(double)>& reference);

}  // namespace plbvp
