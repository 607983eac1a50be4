#pragma once

#include <Eigen/Core>
#include <functional>
#include <memory>

#include "core.hpp"

namespace plbvp {

enum class MapKind {
  Zero,            // A(x) = {0}
  IdentityScaled,  // A(x) = {alpha x}, alpha >= 0
  OrthantCone,     // normal cone of the nonnegative orthant
  BoxCone,         // normal cone of a box [lower, upper] (entries may be +-inf)
  SingletonCone,   // normal cone of a single point {c}
  BallCone,        // normal cone of a closed Euclidean ball
  HalfspaceCone,   // normal cone of {z : (g, z) <= c}
  PolyhedronCone,  // normal cone of an intersection of half-spaces
  L1Prox,          // subdifferential of z -> weight * |z|_1
  Custom           // user-supplied resolvent
};

// A maximal monotone map A on R^N represented through its resolvents
// J_lambda = (I + lambda A)^{-1}.  Instances are immutable and cheap to copy.
class MonotoneMap {
 public:
  int dim() const;
  MapKind kind() const;

  // J_lambda(x); lambda must be positive.
  Vec resolvent(double lambda, const Vec& x) const;

  // Yosida approximation A_lambda(x) = (x - J_lambda(x)) / lambda.
  Vec yosida(double lambda, const Vec& x) const;

  // Projection of x onto the closure of the domain of A.
  Vec domain_projection(const Vec& x) const;

  // Resolvent-based graph residual |J_1(x + v) - x|; zero iff v is in A(x).
  double graph_residual(const Vec& x, const Vec& v) const;
  bool graph_contains(const Vec& x, const Vec& v, double tol) const;

  // Minimal-norm element of A(x).  Throws std::domain_error when x lies
  // outside the domain.  For Custom maps this is approximated by the Yosida
  // map at lambda = 1e-8.
  Vec minimal_section(const Vec& x) const;

  static MonotoneMap zero(int dim);
  static MonotoneMap identity_scaled(int dim, double alpha);
  static MonotoneMap orthant_cone(int dim);
  static MonotoneMap box_cone(const Vec& lower, const Vec& upper);
  static MonotoneMap singleton_cone(const Vec& point);
  static MonotoneMap ball_cone(const Vec& center, double radius);
  static MonotoneMap halfspace_cone(const Vec& normal, double offset);
  // Rows of `normals` with matching `offsets` define {z : normals * z <= offsets}.
  // Projection is exact (active-set enumeration); at most 12 half-spaces.
  static MonotoneMap polyhedron_cone(const Eigen::MatrixXd& normals, const Vec& offsets);
  static MonotoneMap l1_prox(int dim, double weight);
  static MonotoneMap custom(int dim,
                            std::function<Vec(double, const Vec&)> resolvent_fn,
                            std::function<Vec(const Vec&)> domain_projection_fn = {});

  struct Impl;  // definition is internal to the library

 private:
  std::shared_ptr<const Impl> impl_;
  explicit MonotoneMap(std::shared_ptr<const Impl> impl);
};

}  // namespace plbvp
