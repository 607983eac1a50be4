#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "monotone.hpp"

using plbvp::MapKind;
using plbvp::MonotoneMap;
using plbvp::Vec;

namespace {

Vec make2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

std::vector<MonotoneMap> catalog_maps() {
  std::vector<MonotoneMap> maps;
  maps.push_back(MonotoneMap::zero(2));
  maps.push_back(MonotoneMap::identity_scaled(2, 1.0));
  maps.push_back(MonotoneMap::identity_scaled(2, 0.25));
  maps.push_back(MonotoneMap::orthant_cone(2));
  maps.push_back(MonotoneMap::box_cone(make2(0.0, -1.0), make2(1.0, 2.0)));
  maps.push_back(MonotoneMap::singleton_cone(make2(0.5, -0.5)));
  maps.push_back(MonotoneMap::ball_cone(make2(0.0, 0.0), 1.0));
  maps.push_back(MonotoneMap::halfspace_cone(make2(1.0, 1.0), 1.0));
  {
    Eigen::MatrixXd normals(3, 2);
    normals << -1.0, 0.0, 0.0, -1.0, 1.0, 1.0;
    Vec offsets(3);
    offsets << 0.0, 0.0, 1.0;
    maps.push_back(MonotoneMap::polyhedron_cone(normals, offsets));
  }
  maps.push_back(MonotoneMap::l1_prox(2, 0.75));
  return maps;
}

Vec random_vec(std::mt19937_64& rng, int dim, double scale) {
  std::normal_distribution<double> gauss;
  Vec v(dim);
  for (int k = 0; k < dim; ++k) v(k) = scale * gauss(rng);
  return v;
}

}  // namespace

TEST_CASE("orthant cone resolvent is the componentwise clamp") {
  MonotoneMap A = MonotoneMap::orthant_cone(2);
  const Vec x = make2(-1.0, 2.0);
  CHECK((A.resolvent(0.5, x) - make2(0.0, 2.0)).norm() == 0.0);
  CHECK((A.yosida(0.5, x) - make2(-2.0, 0.0)).norm() == 0.0);
  // projections do not depend on lambda
  CHECK((A.resolvent(3.0, x) - A.resolvent(1e-4, x)).norm() == 0.0);
}

TEST_CASE("identity map resolvent divides by 1 + lambda alpha") {
  MonotoneMap A = MonotoneMap::identity_scaled(2, 1.0);
  const Vec x = make2(2.0, 0.0);
  CHECK((A.resolvent(1.0, x) - make2(1.0, 0.0)).norm() == 0.0);
  CHECK((A.yosida(1.0, x) - make2(1.0, 0.0)).norm() == 0.0);
}

TEST_CASE("zero map resolvent is the identity and yosida vanishes") {
  MonotoneMap A = MonotoneMap::zero(3);
  std::mt19937_64 rng(1);
  const Vec x = random_vec(rng, 3, 2.0);
  CHECK((A.resolvent(0.123, x) - x).norm() == 0.0);
  CHECK(A.yosida(7.0, x).norm() == 0.0);
}

TEST_CASE("box cone projects by clamping") {
  MonotoneMap A = MonotoneMap::box_cone(make2(0.0, 0.0), make2(1.0, 1.0));
  CHECK((A.domain_projection(make2(2.0, -3.0)) - make2(1.0, 0.0)).norm() == 0.0);
  const double inf = std::numeric_limits<double>::infinity();
  MonotoneMap H = MonotoneMap::box_cone(make2(0.0, -inf), make2(inf, inf));
  CHECK((H.domain_projection(make2(-2.0, 5.0)) - make2(0.0, 5.0)).norm() == 0.0);
}

TEST_CASE("singleton cone resolves everything to its point") {
  MonotoneMap A = MonotoneMap::singleton_cone(Vec::Zero(2));
  std::mt19937_64 rng(2);
  CHECK(A.resolvent(1.0, random_vec(rng, 2, 10.0)).norm() == 0.0);
  CHECK(A.domain_projection(random_vec(rng, 2, 10.0)).norm() == 0.0);
}

TEST_CASE("ball cone projects radially") {
  MonotoneMap A = MonotoneMap::ball_cone(make2(1.0, 0.0), 2.0);
  const Vec inside = make2(2.0, 0.5);
  CHECK((A.domain_projection(inside) - inside).norm() == 0.0);
  const Vec z = A.domain_projection(make2(5.0, 0.0));
  CHECK((z - make2(3.0, 0.0)).norm() <= 1e-14);
}

TEST_CASE("halfspace cone projects along the normal") {
  MonotoneMap A = MonotoneMap::halfspace_cone(make2(1.0, 1.0), 1.0);
  const Vec feasible = make2(0.2, 0.3);
  CHECK((A.domain_projection(feasible) - feasible).norm() == 0.0);
  const Vec z = A.domain_projection(make2(1.0, 1.0));
  CHECK((z - make2(0.5, 0.5)).norm() <= 1e-14);
}

TEST_CASE("polyhedron cone projection matches analytic triangle projection") {
  Eigen::MatrixXd normals(3, 2);
  normals << -1.0, 0.0, 0.0, -1.0, 1.0, 1.0;
  Vec offsets(3);
  offsets << 0.0, 0.0, 1.0;
  MonotoneMap A = MonotoneMap::polyhedron_cone(normals, offsets);

  // interior point stays put
  CHECK((A.domain_projection(make2(0.25, 0.25)) - make2(0.25, 0.25)).norm() == 0.0);
  // beyond the hypotenuse projects onto it
  CHECK((A.domain_projection(make2(1.0, 1.0)) - make2(0.5, 0.5)).norm() <= 1e-12);
  // far corner regions project onto vertices
  CHECK((A.domain_projection(make2(3.0, -1.0)) - make2(1.0, 0.0)).norm() <= 1e-12);
  CHECK((A.domain_projection(make2(-2.0, -2.0)) - make2(0.0, 0.0)).norm() == 0.0);
}

TEST_CASE("polyhedron projection satisfies the variational characterization") {
  Eigen::MatrixXd normals(3, 2);
  normals << -1.0, 0.0, 0.0, -1.0, 1.0, 1.0;
  Vec offsets(3);
  offsets << 0.0, 0.0, 1.0;
  MonotoneMap A = MonotoneMap::polyhedron_cone(normals, offsets);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Vec> hull_samples;
  hull_samples.push_back(make2(0.0, 0.0));
  hull_samples.push_back(make2(1.0, 0.0));
  hull_samples.push_back(make2(0.0, 1.0));
  for (int i = 0; i < 50; ++i) {
    double u = unif(rng), v = unif(rng);
    if (u + v > 1.0) {
      u = 1.0 - u;
      v = 1.0 - v;
    }
    hull_samples.push_back(make2(u, v));
  }
  for (int trial = 0; trial < 100; ++trial) {
    const Vec x = random_vec(rng, 2, 3.0);
    const Vec z = A.domain_projection(x);
    CHECK((normals * z - offsets).maxCoeff() <= 1e-10);
    for (const Vec& c : hull_samples) {
      CHECK((x - z).dot(c - z) <= 1e-9);            // obtuse-angle optimality
      CHECK((x - z).norm() <= (x - c).norm() + 1e-9);  // distance minimality
    }
  }
}

TEST_CASE("l1 prox resolvent is the componentwise soft threshold") {
  MonotoneMap A = MonotoneMap::l1_prox(2, 0.75);
  const double lam = 2.0;  // threshold lam * weight = 1.5
  const Vec x = make2(4.0, -1.0);
  const Vec z = A.resolvent(lam, x);
  CHECK(z(0) == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(z(1) == 0.0);
  // minimal section away from zero is weight * sign
  CHECK((A.minimal_section(make2(3.0, -2.0)) - make2(0.75, -0.75)).norm() == 0.0);
  CHECK(A.minimal_section(Vec::Zero(2)).norm() == 0.0);
}

TEST_CASE("custom map wraps a user resolvent") {
  MonotoneMap A = MonotoneMap::custom(
      2, [](double lambda, const Vec& x) -> Vec { return x / (1.0 + lambda); });
  const Vec x = make2(2.0, -4.0);
  CHECK((A.resolvent(1.0, x) - make2(1.0, -2.0)).norm() == 0.0);
  CHECK(A.kind() == MapKind::Custom);
  // minimal section falls back to the small-lambda yosida proxy
  CHECK((A.minimal_section(x) - x).norm() <= 1e-6 * x.norm());
}

TEST_CASE("minimal section of cones is zero on their domain") {
  MonotoneMap A = MonotoneMap::orthant_cone(2);
  CHECK(A.minimal_section(make2(1.0, 1.0)).norm() == 0.0);
  CHECK(A.minimal_section(make2(0.0, 1.0)).norm() == 0.0);
  MonotoneMap I = MonotoneMap::identity_scaled(2, 1.0);
  CHECK((I.minimal_section(make2(3.0, 4.0)) - make2(3.0, 4.0)).norm() == 0.0);
}

TEST_CASE("minimal section outside the domain is rejected") {
  MonotoneMap A = MonotoneMap::orthant_cone(2);
  CHECK_THROWS_AS(A.minimal_section(make2(-1.0, 0.0)), std::domain_error);
  MonotoneMap S = MonotoneMap::singleton_cone(Vec::Zero(2));
  CHECK_THROWS_AS(S.minimal_section(make2(0.5, 0.0)), std::domain_error);
}

TEST_CASE("resolvent requires a positive lambda") {
  MonotoneMap A = MonotoneMap::orthant_cone(2);
  CHECK_THROWS_AS(A.resolvent(0.0, Vec::Zero(2)), std::invalid_argument);
  CHECK_THROWS_AS(A.resolvent(-1.0, Vec::Zero(2)), std::invalid_argument);
  CHECK_THROWS_AS(A.yosida(0.0, Vec::Zero(2)), std::invalid_argument);
}

TEST_CASE("dimension mismatches are rejected") {
  MonotoneMap A = MonotoneMap::orthant_cone(2);
  CHECK_THROWS_AS(A.resolvent(1.0, Vec::Zero(3)), std::invalid_argument);
  CHECK_THROWS_AS(MonotoneMap::box_cone(Vec::Zero(2), Vec::Zero(3)),
                  std::invalid_argument);
  CHECK_THROWS_AS(MonotoneMap::identity_scaled(2, -1.0), std::invalid_argument);
}

TEST_CASE("graph membership via the resolvent identity") {
  MonotoneMap A = MonotoneMap::orthant_cone(2);
  // (0, 1) is on the boundary; (-3, 0) is an outward normal there
  CHECK(A.graph_contains(make2(0.0, 1.0), make2(-3.0, 0.0), 1e-12));
  CHECK(A.graph_residual(make2(0.0, 1.0), make2(-3.0, 0.0)) == 0.0);
  // positive normals at a boundary point are not in the cone
  CHECK(!A.graph_contains(make2(0.0, 1.0), make2(3.0, 0.0), 1e-8));
  // interior points only carry the zero value
  CHECK(A.graph_contains(make2(1.0, 1.0), make2(0.0, 0.0), 1e-12));
  CHECK(!A.graph_contains(make2(1.0, 1.0), make2(0.1, 0.0), 1e-8));

  MonotoneMap I = MonotoneMap::identity_scaled(2, 1.0);
  CHECK(I.graph_contains(make2(2.0, -1.0), make2(2.0, -1.0), 1e-12));
  CHECK(!I.graph_contains(make2(2.0, -1.0), make2(2.0, 0.0), 1e-8));
}

TEST_CASE("catalog maps satisfy the resolvent and yosida laws") {
  std::mt19937_64 rng(17);
  const std::vector<double> lambdas = {1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  for (const MonotoneMap& A : catalog_maps()) {
    for (int trial = 0; trial < 60; ++trial) {
      const Vec x = random_vec(rng, A.dim(), 2.0);
      const Vec y = random_vec(rng, A.dim(), 2.0);
      for (double lam : {1.0, 0.05}) {
        const Vec Jx = A.resolvent(lam, x);
        const Vec Jy = A.resolvent(lam, y);
        CHECK((Jx - Jy).norm() <= (x - y).norm() + 1e-12);
        CHECK((A.yosida(lam, x) - A.yosida(lam, y)).norm() <=
              (x - y).norm() / lam + 1e-10);
        // resolvent output pairs with the yosida value as a graph point
        CHECK(A.graph_residual(Jx, A.yosida(lam, x)) <= 1e-8);
      }
      // norm domination and monotone convergence of the yosida family on the
      // domain, plus the resolvent limit toward the domain projection
      const Vec xd = A.domain_projection(x);
      const Vec minimal = A.minimal_section(xd);
      double previous_gap = std::numeric_limits<double>::infinity();
      double previous_dist = std::numeric_limits<double>::infinity();
      for (double lam : lambdas) {
        const Vec ylam = A.yosida(lam, xd);
        CHECK(ylam.norm() <= minimal.norm() + 1e-10);
        const double gap = (ylam - minimal).norm();
        CHECK(gap <= previous_gap + 1e-12);
        previous_gap = gap;
        const double dist = (A.resolvent(lam, x) - A.domain_projection(x)).norm();
        CHECK(dist <= previous_dist + 1e-12);
        previous_dist = dist;
      }
      CHECK(previous_dist <= 1e-5 * (1.0 + x.norm()));
    }
  }
}
