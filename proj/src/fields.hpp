#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"

namespace plbvp {

// Time-dependent vector field t, zeta -> F(t, zeta) represented by a single
// measurable selection.  Set-valued data enters through the chosen selection;
// all solver-side evaluations go through `select`.
class MultiField {
 public:
  int dim() const;
  double horizon() const;
  const std::string& name() const;

  // One element of F(t, zeta).
  Vec select(double t, const Vec& zeta) const;

  // Whether u belongs to F(t, zeta) within tol.  Defaults to comparison with
  // the stored selection; custom fields may supply a richer test.
  bool member(double t, const Vec& zeta, const Vec& u, double tol) const;

  // Declared convexity of the values F(t, zeta); selections of non-convex
  // fields are accepted, the flag is carried for reporting only.
  bool convex_valued() const;

  // g(t) = -pi^2 sin(pi t / T) in every component (drives x(t) = sin(pi t / T)
  // through the second-derivative operator when p = 2).
  static MultiField msin(int dim, double horizon);
  // g(t) = -2 (p-1) |T - 2t|^(p-2) in every component (drives x(t) = t (T - t)
  // through the p-Laplacian operator).
  static MultiField plap3(int dim, double horizon, double p);
  static MultiField constant(int dim, double horizon, const Vec& value);
  static MultiField linear(int dim, double horizon);   // F(t, zeta) = {zeta}
  static MultiField negated(int dim, double horizon);  // F(t, zeta) = {-zeta}
  // value1 for t <= switch_time, value2 afterwards.
  static MultiField step(int dim, double horizon, const Vec& value1, const Vec& value2,
                         double switch_time);
  // Piecewise-linear interpolation of (t, value) rows; clamped outside the
  // tabulated range.  Rows must be strictly increasing in t.
  static MultiField tabulated(int dim, double horizon,
                              std::vector<std::pair<double, Vec>> rows);
  static MultiField custom(int dim, double horizon, std::string name,
                           std::function<Vec(double, const Vec&)> select_fn,
                           std::function<bool(double, const Vec&, const Vec&, double)>
                               member_fn = {},
                           bool convex_valued = true);

  struct Impl;  // definition is internal to the library

 private:
  std::shared_ptr<const Impl> impl_;
  explicit MultiField(std::shared_ptr<const Impl> impl);
};

// Retraction onto the closed ball of radius M: identity inside, radial
// rescaling outside.
Vec radial_retraction(double M, const Vec& zeta);

// One element of the modified oriented field used by the truncation argument:
//   -select(t, p_M(zeta)) + phi(p_M(zeta)).
// Equals -select(t, zeta) + phi(zeta) whenever |zeta| <= M, and its norm never
// exceeds the growth bound at M plus M^(p-1).
Vec truncated_select(const MultiField& F, const Exponent& e, double M, double t,
                     const Vec& zeta);

// Deterministic sample points on the sphere of radius `radius`.  Always
// includes the signed axis points; further points are seeded Gaussian
// directions (dimension 1 yields exactly the two signed points).
std::vector<Vec> sphere_points(int dim, double radius, int count, std::uint64_t seed);

struct HartmanReport {
  double radius = 0.0;
  int time_samples = 0;
  int sphere_samples = 0;
  double min_inner_product = 0.0;  // min of (select(t, zeta), zeta) over samples
  double tolerance = 0.0;
  bool passed = false;  // min_inner_product >= -tolerance
  double witness_time = 0.0;
  Vec witness_zeta;
  Vec witness_value;
};

// Samples the boundary sign condition (u, zeta) >= 0 for |zeta| = M.
HartmanReport check_hartman(const MultiField& F, double M, int time_samples = 64,
                            int sphere_samples = 128, double tol = 1e-9,
                            std::uint64_t seed = 0);

// Sampled bound sup { |u| : u in F(t, zeta), t in [0, T], |zeta| <= k }.
double estimate_growth(const MultiField& F, double k, int time_samples = 64,
                       int ball_samples = 128, std::uint64_t seed = 0);

}  // namespace plbvp
