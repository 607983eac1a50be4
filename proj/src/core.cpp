#include "core.hpp"

#include <cmath>
#include <stdexcept>

namespace plbvp {

Exponent::Exponent(double p_in) : p(p_in), conjugate(0.0) {
  if (!(p_in >= 2.0) || !std::isfinite(p_in)) {
    throw std::invalid_argument("exponent p must be finite and >= 2");
  }
  conjugate = p_in / (p_in - 1.0);
}

static Vec radial_power(double exponent, const Vec& z) {
  double norm = z.norm();
  if (norm == 0.0) return Vec::Zero(z.size());
  return std::pow(norm, exponent) * z;
}

Vec phi(const Exponent& e, const Vec& z) { return radial_power(e.p - 2.0, z); }

Vec phi_inverse(const Exponent& e, const Vec& w) {
  return radial_power(e.conjugate - 2.0, w);
}

Grid::Grid(double horizon_in, int intervals_in)
    : horizon(horizon_in), intervals(intervals_in) {
  if (!(horizon_in > 0.0) || !std::isfinite(horizon_in)) {
    throw std::invalid_argument("grid horizon must be finite and positive");
  }
  if (intervals_in < 2) {
    throw std::invalid_argument("grid needs at least 2 intervals");
  }
}

TrajectoryGrid::TrajectoryGrid(const Grid& g, int dim) : grid(g) {
  if (dim < 1) throw std::invalid_argument("trajectory dimension must be >= 1");
  values.assign(static_cast<size_t>(g.intervals) + 1, Vec::Zero(dim));
}

TrajectoryGrid::TrajectoryGrid(const Grid& g, std::vector<Vec> nodal_values)
    : grid(g), values(std::move(nodal_values)) {
  if (values.size() != static_cast<size_t>(g.intervals) + 1) {
    throw std::invalid_argument("trajectory needs intervals+1 nodal values");
  }
  const auto dim = values.front().size();
  if (dim < 1) throw std::invalid_argument("trajectory dimension must be >= 1");
  for (const Vec& v : values) {
    if (v.size() != dim) {
      throw std::invalid_argument("trajectory nodal values must share one dimension");
    }
  }
}

Vec TrajectoryGrid::slope(int i) const {
  if (i < 0 || i >= grid.intervals) {
    throw std::out_of_range("slope index outside [0, intervals)");
  }
  return (values[i + 1] - values[i]) / grid.step();
}

double TrajectoryGrid::max_node_norm() const {
  double m = 0.0;
  for (const Vec& v : values) m = std::max(m, v.norm());
  return m;
}

double discrete_lp_norm(double q, const TrajectoryGrid& x) {
  if (!(q >= 1.0)) throw std::invalid_argument("norm exponent must be >= 1");
  const double h = x.grid.step();
  const int n = x.grid.intervals;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    acc += w * h * std::pow(x.values[i].norm(), q);
  }
  return std::pow(acc, 1.0 / q);
}

double derivative_lp_power(double q, const TrajectoryGrid& x) {
  if (!(q >= 1.0)) throw std::invalid_argument("norm exponent must be >= 1");
  const double h = x.grid.step();
  double acc = 0.0;
  for (int i = 0; i < x.grid.intervals; ++i) {
    acc += h * std::pow(x.slope(i).norm(), q);
  }
  return acc;
}

}  // namespace plbvp
