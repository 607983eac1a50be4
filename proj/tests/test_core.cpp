#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>

#include "core.hpp"

using plbvp::derivative_lp_power;
using plbvp::discrete_lp_norm;
using plbvp::Exponent;
using plbvp::Grid;
using plbvp::phi;
using plbvp::phi_inverse;
using plbvp::TrajectoryGrid;
using plbvp::Vec;

namespace {

Vec make2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("exponent stores p and its conjugate") {
  Exponent e2(2.0);
  CHECK(e2.p == 2.0);
  CHECK(e2.conjugate == 2.0);

  Exponent e3(3.0);
  CHECK(e3.conjugate == doctest::Approx(1.5).epsilon(1e-15));

  Exponent e4(4.0);
  CHECK(1.0 / e4.p + 1.0 / e4.conjugate == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("exponent rejects p below 2 and non-finite p") {
  CHECK_THROWS_AS(Exponent(1.5), std::invalid_argument);
  CHECK_THROWS_AS(Exponent(0.0), std::invalid_argument);
  CHECK_THROWS_AS(Exponent(-3.0), std::invalid_argument);
  CHECK_THROWS_AS(Exponent(std::nan("")), std::invalid_argument);
  CHECK_THROWS_AS(Exponent(std::numeric_limits<double>::infinity()),
                  std::invalid_argument);
  CHECK_NOTHROW(Exponent(2.0));
}

TEST_CASE("phi is the identity at p = 2") {
  Exponent e(2.0);
  const Vec z = make2(3.0, -1.0);
  CHECK((phi(e, z) - z).norm() == 0.0);
}

TEST_CASE("phi hand-evaluated value at p = 3") {
  Exponent e(3.0);
  const Vec z = make2(2.0, 0.0);
  const Vec w = phi(e, z);
  CHECK(w(0) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(w(1) == 0.0);
}

TEST_CASE("phi at zero is exactly zero for every p") {
  for (double p : {2.0, 3.0, 5.5}) {
    Exponent e(p);
    const Vec z = Vec::Zero(3);
    CHECK(phi(e, z).norm() == 0.0);
    CHECK(phi_inverse(e, z).norm() == 0.0);
  }
}

TEST_CASE("phi_inverse hand-evaluated value at p = 3") {
  Exponent e(3.0);
  const Vec w = make2(4.0, 0.0);
  const Vec z = phi_inverse(e, w);
  CHECK(z(0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(z(1) == 0.0);
}

TEST_CASE("phi_inverse is the identity at p = 2") {
  Exponent e(2.0);
  const Vec w = make2(1.0, 1.0);
  CHECK((phi_inverse(e, w) - w).norm() == 0.0);
}

TEST_CASE("phi round-trips to relative error 1e-10 across magnitudes and exponents") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss;
  for (double p : {2.0, 2.5, 3.0, 4.0, 6.0}) {
    Exponent e(p);
    for (double mag : {1e-6, 1e-3, 1.0, 1e3, 1e6}) {
      for (int dim : {1, 2, 5}) {
        Vec dir(dim);
        for (int k = 0; k < dim; ++k) dir(k) = gauss(rng);
        if (dir.norm() == 0.0) dir(0) = 1.0;
        const Vec z = mag * dir / dir.norm();
        const Vec back = phi_inverse(e, phi(e, z));
        CHECK((back - z).norm() <= 1e-10 * z.norm());
        const Vec w = phi(e, z);
        const Vec forward = phi(e, phi_inverse(e, w));
        CHECK((forward - w).norm() <= 1e-10 * w.norm());
      }
    }
  }
}

TEST_CASE("phi norm law and monotonicity on random pairs") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss;
  for (double p : {2.0, 3.0, 4.5}) {
    Exponent e(p);
    for (int trial = 0; trial < 200; ++trial) {
      Vec a(3), b(3);
      for (int k = 0; k < 3; ++k) {
        a(k) = gauss(rng);
        b(k) = gauss(rng);
      }
      const double lhs = phi(e, a).norm();
      const double rhs = std::pow(a.norm(), p - 1.0);
      CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, rhs));
      const double pairing = (phi(e, a) - phi(e, b)).dot(a - b);
      CHECK(pairing >= 0.0);
      if ((a - b).norm() > 1e-8) CHECK(pairing > 0.0);
    }
  }
}

TEST_CASE("grid exposes exact endpoints and uniform step") {
  Grid g(2.0, 8);
  CHECK(g.step() == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(g.node(0) == 0.0);
  CHECK(g.node(8) == 2.0);  // i*T/n evaluates exactly at the right end
  CHECK(g.node(4) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("grid rejects degenerate shapes") {
  CHECK_THROWS_AS(Grid(0.0, 8), std::invalid_argument);
  CHECK_THROWS_AS(Grid(-1.0, 8), std::invalid_argument);
  CHECK_THROWS_AS(Grid(1.0, 1), std::invalid_argument);
  CHECK_NOTHROW(Grid(1.0, 2));
}

TEST_CASE("trajectory grid slopes are half-grid difference quotients") {
  Grid g(1.0, 4);
  TrajectoryGrid x(g, 1);
  for (int i = 0; i <= 4; ++i) x.values[i](0) = g.node(i) * g.node(i);
  CHECK(x.dim() == 1);
  CHECK(x.intervals() == 4);
  // (t_{i+1}^2 - t_i^2)/h = t_i + t_{i+1}
  CHECK(x.slope(0)(0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(x.slope(3)(0) == doctest::Approx(1.75).epsilon(1e-14));
}

TEST_CASE("max node norm scans the whole trajectory") {
  Grid g(1.0, 2);
  TrajectoryGrid x(g, 2);
  x.values[1] = make2(0.3, -0.4);
  CHECK(x.max_node_norm() == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("discrete lp norm of a constant trajectory is its norm") {
  Grid g(1.0, 16);
  TrajectoryGrid x(g, 2);
  for (auto& v : x.values) v = make2(3.0, 4.0);
  CHECK(discrete_lp_norm(2.0, x) == doctest::Approx(5.0).epsilon(1e-13));
  CHECK(discrete_lp_norm(3.0, x) == doctest::Approx(5.0).epsilon(1e-13));
}

TEST_CASE("discrete lp norm of the zero trajectory is zero") {
  Grid g(1.0, 8);
  TrajectoryGrid x(g, 3);
  CHECK(discrete_lp_norm(2.0, x) == 0.0);
}

TEST_CASE("discrete l2 norm of x = t approximates 3^(-1/2)") {
  Grid g(1.0, 64);
  TrajectoryGrid x(g, 1);
  for (int i = 0; i <= 64; ++i) x.values[i](0) = g.node(i);
  CHECK(std::abs(discrete_lp_norm(2.0, x) - 1.0 / std::sqrt(3.0)) <= 1e-3);
}

TEST_CASE("discrete lp norm rejects q below 1") {
  Grid g(1.0, 4);
  TrajectoryGrid x(g, 1);
  CHECK_THROWS_AS(discrete_lp_norm(0.5, x), std::invalid_argument);
}

TEST_CASE("derivative lp power sums h times slope powers") {
  Grid g(1.0, 8);
  TrajectoryGrid x(g, 1);
  for (int i = 0; i <= 8; ++i) x.values[i](0) = 2.0 * g.node(i);
  // slope is 2 on every interval: sum h * 2^q = 2^q
  CHECK(derivative_lp_power(2.0, x) == doctest::Approx(4.0).epsilon(1e-13));
  CHECK(derivative_lp_power(3.0, x) == doctest::Approx(8.0).epsilon(1e-13));
}

TEST_CASE("trajectory constructor validates value count") {
  Grid g(1.0, 4);
  std::vector<Vec> vals(4, Vec::Zero(2));  // needs n+1 = 5
  CHECK_THROWS_AS(TrajectoryGrid(g, std::move(vals)), std::invalid_argument);
}
