#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "core.hpp"
#include "monotone.hpp"

namespace plbvp {

enum class BcKind { Dirichlet, Neumann, Periodic, SturmLiouville, Product, Custom };

// Multivalued boundary operator xi acting on pairs (x(0), x(T)) in R^{2N},
// represented through its resolvents on R^{2N}.  The boundary condition of the
// problem is (phi(x'(0)), -phi(x'(T))) in xi(x(0), x(T)).
class BoundaryOperator {
 public:
  // Dimension N of the state; the operator acts on R^{2N}.
  int dim() const;
  BcKind kind() const;

  // J_mu(w) for w in R^{2N}; mu must be positive.
  Vec resolvent(double mu, const Vec& w) const;

  // x(0) = x(T) = 0 (xi(0,0) = R^{2N}, empty elsewhere; resolvent constant 0).
  static BoundaryOperator dirichlet(int dim);
  // x'(0) = x'(T) = 0 (xi identically {(0,0)}; resolvent is the identity).
  static BoundaryOperator neumann(int dim);
  // x(0) = x(T), phi(x'(0)) = phi(x'(T)) (normal cone of the diagonal).
  static BoundaryOperator periodic(int dim);
  // x(0) - theta x'(0) = 0 and x(T) + eta x'(T) = 0 via
  // xi(z, z') = (phi(z)/theta^(p-1), phi(z')/eta^(p-1)); theta, eta > 0.
  static BoundaryOperator sturm_liouville(int dim, const Exponent& e, double theta,
                                          double eta);
  // xi(a, a') = A1(a) x A2(a'); the blocks resolve independently.  With normal
  // cones of K1, K2 this pins x(0) in K1, x(T) in K2 with conic flux reactions.
  static BoundaryOperator product(const MonotoneMap& first, const MonotoneMap& second);
  static BoundaryOperator custom(int dim, std::function<Vec(double, const Vec&)> resolvent_fn);

  struct Impl;  // definition is internal to the library

 private:
  std::shared_ptr<const Impl> impl_;
  explicit BoundaryOperator(std::shared_ptr<const Impl> impl);

  friend std::vector<struct BoundaryGraphSample> sample_boundary_graph(
      const BoundaryOperator&, int, double, double, std::uint64_t);
};

// Fixed-point residual of the boundary condition:
//   (a, aT) - J_mu((a, aT) + mu (b, bT))  in R^{2N}.
// Zero exactly when (b, bT) belongs to xi(a, aT).
Vec bc_residual(const BoundaryOperator& xi, double mu, const Vec& a, const Vec& aT,
                const Vec& b, const Vec& bT);

// Graph point ((a0, aT), (b0, bT)) of xi, produced via the resolvent identity.
struct BoundaryGraphSample {
  Vec a0, aT;  // domain pair
  Vec b0, bT;  // image pair
};

// Deterministic graph samples obtained by resolving seeded probe points of
// amplitude `amplitude` at parameter mu.
std::vector<BoundaryGraphSample> sample_boundary_graph(const BoundaryOperator& xi,
                                                       int count, double mu,
                                                       double amplitude,
                                                       std::uint64_t seed);

struct HxiReport {
  // min over graph samples of min((b0, a0), (bT, aT))
  double sign_min = 0.0;
  // max over graph samples of |a0 - aT|
  double max_diagonal_gap = 0.0;
  // max over probe pairs of |J(w) - J(w')| / |w - w'|
  double max_expansion_ratio = 0.0;
  double tolerance = 0.0;
  bool sign_branch = false;      // sign_min >= -tolerance
  bool diagonal_branch = false;  // max_diagonal_gap <= tolerance
  bool nonexpansive = false;     // max_expansion_ratio <= 1 + tolerance
  bool passed = false;           // nonexpansive and (sign or diagonal branch)
  BoundaryGraphSample sign_witness;
};

// Samples the structural hypothesis on xi: resolvent nonexpansiveness plus
// either the sign condition on the graph or a diagonal domain.
HxiReport check_h_xi(const BoundaryOperator& xi, int sample_count = 100, double mu = 1.0,
                     double amplitude = 1.0, double tol = 1e-9, std::uint64_t seed = 0);

struct H0Report {
  double min_pairing = 0.0;  // min of (A_lambda(a0), b0) + (A_lambda(aT), bT)
  double tolerance = 0.0;
  bool passed = false;
  double witness_lambda = 0.0;
  BoundaryGraphSample witness;
};

// Samples the compatibility condition between the monotone map A and xi:
//   (A_lambda(a0), b0) + (A_lambda(aT), bT) >= 0
// over graph samples of xi and the given lambda values.
H0Report check_h0(const MonotoneMap& A, const BoundaryOperator& xi,
                  const std::vector<double>& lambdas, int sample_count = 100,
                  double mu = 1.0, double amplitude = 1.0, double tol = 1e-9,
                  std::uint64_t seed = 0);

}  // namespace plbvp
