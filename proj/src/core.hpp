#pragma once

#include <Eigen/Core>
#include <vector>

namespace plbvp {

using Vec = Eigen::VectorXd;

// Power exponent p >= 2 for the homeomorphism phi together with its conjugate
// p' = p/(p-1).  Invalid values throw std::invalid_argument.
struct Exponent {
  double p;
  double conjugate;

  explicit Exponent(double p_in);
};

// phi(z) = |z|^(p-2) z  (Euclidean norm), phi(0) = 0.
Vec phi(const Exponent& e, const Vec& z);

// Inverse homeomorphism: phi_inverse(w) = |w|^(p'-2) w, phi_inverse(0) = 0.
Vec phi_inverse(const Exponent& e, const Vec& w);

// Uniform grid 0 = t_0 < t_1 < ... < t_n = T.
struct Grid {
  double horizon;  // T > 0
  int intervals;   // n >= 2

  Grid(double horizon_in, int intervals_in);

  double step() const { return horizon / intervals; }
  double node(int i) const { return i * horizon / intervals; }
};

// Nodal values x_0..x_n of a vector-valued trajectory on a uniform grid.
struct TrajectoryGrid {
  Grid grid;
  std::vector<Vec> values;  // n+1 entries, each of the same dimension

  TrajectoryGrid(const Grid& g, int dim);
  TrajectoryGrid(const Grid& g, std::vector<Vec> nodal_values);

  int dim() const { return values.empty() ? 0 : static_cast<int>(values.front().size()); }
  int intervals() const { return grid.intervals; }

  // Half-grid slope d_{i+1/2} = (x_{i+1} - x_i)/h for i in [0, n).
  Vec slope(int i) const;

  double max_node_norm() const;
};

// Trapezoid-weighted discrete L^q norm of the nodal values:
//   ( sum_i w_i h |x_i|^q )^(1/q),  w_0 = w_n = 1/2, interior weights 1.
// Requires q >= 1.
double discrete_lp_norm(double q, const TrajectoryGrid& x);

// sum_{i=0}^{n-1} h |d_{i+1/2}|^q: the q-th power of the discrete L^q norm of
// the piecewise-constant derivative.  Requires q >= 1.
double derivative_lp_power(double q, const TrajectoryGrid& x);

}  // namespace plbvp
