#include "monotone.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace plbvp {

struct MonotoneMap::Impl {
  int dim = 0;
  MapKind kind = MapKind::Zero;
  // project(x) must be the exact Euclidean projection onto cl D(A).
  std::function<Vec(const Vec&)> project;
  // resolve(lambda, x) = J_lambda(x).
  std::function<Vec(double, const Vec&)> resolve;
  // minimal(x) = A0(x) for points inside the domain; empty for Custom.
  std::function<Vec(const Vec&)> minimal;
  // Optional closed-form Yosida map.  The generic (x - J_lambda(x))/lambda
  // amplifies the rounding of the subtraction by 1/lambda, which matters for
  // maps whose Yosida values saturate (e.g. the soft threshold).
  std::function<Vec(double, const Vec&)> yosida_exact;
};

MonotoneMap::MonotoneMap(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

int MonotoneMap::dim() const { return impl_->dim; }
MapKind MonotoneMap::kind() const { return impl_->kind; }

static void check_dim(const MonotoneMap::Impl& impl, const Vec& x) {
  if (x.size() != impl.dim) {
    throw std::invalid_argument("monotone map: argument dimension mismatch");
  }
}

Vec MonotoneMap::resolvent(double lambda, const Vec& x) const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("resolvent parameter must be positive");
  }
  check_dim(*impl_, x);
  return impl_->resolve(lambda, x);
}

Vec MonotoneMap::yosida(double lambda, const Vec& x) const {
  if (impl_->yosida_exact) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
      throw std::invalid_argument("resolvent parameter must be positive");
    }
    check_dim(*impl_, x);
    return impl_->yosida_exact(lambda, x);
  }
  return (x - resolvent(lambda, x)) / lambda;
}

Vec MonotoneMap::domain_projection(const Vec& x) const {
  check_dim(*impl_, x);
  return impl_->project(x);
}

double MonotoneMap::graph_residual(const Vec& x, const Vec& v) const {
  check_dim(*impl_, x);
  check_dim(*impl_, v);
  return (impl_->resolve(1.0, x + v) - x).norm();
}

bool MonotoneMap::graph_contains(const Vec& x, const Vec& v, double tol) const {
  return graph_residual(x, v) <= tol;
}

Vec MonotoneMap::minimal_section(const Vec& x) const {
  check_dim(*impl_, x);
  const double dist = (impl_->project(x) - x).norm();
  if (dist > 1e-12 * (1.0 + x.norm())) {
    throw std::domain_error("minimal_section: point outside the map domain");
  }
  if (impl_->minimal) return impl_->minimal(x);
  return yosida(1e-8, x);
}

// ---- factories --------------------------------------------------------------

static std::shared_ptr<MonotoneMap::Impl> base_impl(int dim, MapKind kind) {
  if (dim < 1) throw std::invalid_argument("monotone map dimension must be >= 1");
  auto impl = std::make_shared<MonotoneMap::Impl>();
  impl->dim = dim;
  impl->kind = kind;
  return impl;
}

// Normal cone of a convex set: the resolvent at every lambda is the projection.
static void install_normal_cone(MonotoneMap::Impl& impl,
                                std::function<Vec(const Vec&)> project) {
  impl.project = project;
  impl.resolve = [project](double, const Vec& x) { return project(x); };
  impl.minimal = [dim = impl.dim](const Vec&) { return Vec::Zero(dim); };
}

MonotoneMap MonotoneMap::zero(int dim) {
  auto impl = base_impl(dim, MapKind::Zero);
  impl->project = [](const Vec& x) { return x; };
  impl->resolve = [](double, const Vec& x) { return x; };
  impl->minimal = [dim](const Vec&) { return Vec::Zero(dim); };
  return MonotoneMap(std::move(impl));
}

MonotoneMap MonotoneMap::identity_scaled(int dim, double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("identity_scaled needs alpha >= 0");
  }
  auto impl = base_impl(dim, MapKind::IdentityScaled);
  impl->project = [](const Vec& x) { return x; };
  impl->resolve = [alpha](double lambda, const Vec& x) -> Vec {
    return x / (1.0 + lambda * alpha);
  };
  impl->minimal = [alpha](const Vec& x) -> Vec { return alpha * x; };
  return MonotoneMap(std::move(impl));
}

MonotoneMap MonotoneMap::orthant_cone(int dim) {
  auto impl = base_impl(dim, MapKind::OrthantCone);
  install_normal_cone(*impl, [](const Vec& x) -> Vec { return x.cwiseMax(0.0); });
  return MonotoneMap(std::move(impl));
}

MonotoneMap MonotoneMap::box_cone(const Vec& lower, const Vec& upper) {
  if (lower.size() != upper.size() || lower.size() < 1) {
    throw std::invalid_argument("box_cone bounds must share one dimension");
  }
  for (int i = 0; i < lower.size(); ++i) {
    if (!(lower[i] <= upper[i])) {
      throw std::invalid_argument("box_cone needs lower <= upper");
    }
  }
  auto impl = base_impl(static_cast<int>(lower.size()), MapKind::BoxCone);
  install_normal_cone(*impl, [lower, upper](const Vec& x) -> Vec {
    return x.cwiseMax(lower).cwiseMin(upper);
  });
  return MonotoneMap(std::move(impl));
}

MonotoneMap MonotoneMap::singleton_cone(const Vec& point) {
  if (point.size() < 1) throw std::invalid_argument("singleton_cone needs a point");
  auto impl = base_impl(static_cast<int>(point.size()), MapKind::SingletonCone);
  install_normal_cone(*impl, [point](const Vec&) { return point; });
  return MonotoneMap(std::move(impl));
}

MonotoneMap MonotoneMap::ball_cone(const Vec& center, double radius) {
  if (center.size() < 1 || !(radius > 0.0)) {
    throw std::invalid_argument("ball_cone needs a center and radius > 0");
  }
  auto impl = base_impl(static_cast<int>(center.size()), MapKind::BallCone);
  install_normal_cone(*impl, [center, radius](const Vec& x) -> Vec {
    const Vec d = x - center;
    const double norm = d.norm();
    // Ulp-level slack keeps the projection idempotent: re-projecting a point
    // produced by the radial rescale must return it unchanged.
    if (norm <= radius * (1.0 + 8.0 * std::numeric_limits<double>::epsilon())) return x;
    return center + (radius / norm) * d;
  });
  return MonotoneMap(std::move(impl));
}

MonotoneMap MonotoneMap::halfspace_cone(const Vec& normal, double offset) {
  const double nsq = normal.squaredNorm();
  if (normal.size() < 1 || nsq == 0.0) {
    throw std::invalid_argument("halfspace_cone needs a nonzero normal");
  }
  auto impl = base_impl(static_cast<int>(normal.size()), MapKind::HalfspaceCone);
  install_normal_cone(*impl, [normal, offset, nsq](const Vec& x) -> Vec {
    const double excess = normal.dot(x) - offset;
    // Ulp-level slack keeps the projection idempotent under roundoff.
    const double slack = 8.0 * std::numeric_limits<double>::epsilon() *
                         (std::abs(offset) + normal.cwiseAbs().dot(x.cwiseAbs()));
    if (excess <= slack) return x;
    return x - (excess / nsq) * normal;
  });
  return MonotoneMap(std::move(impl));
}

MonotoneMap MonotoneMap::polyhedron_cone(const Eigen::MatrixXd& normals, const Vec& offsets) {
  const int m = static_cast<int>(normals.rows());
  if (m < 1 || normals.cols() < 1 || offsets.size() != m) {
    throw std::invalid_argument("polyhedron_cone needs matching normals and offsets");
  }
  if (m > 12) {
    throw std::invalid_argument("polyhedron_cone supports at most 12 half-spaces");
  }
  for (int j = 0; j < m; ++j) {
    if (normals.row(j).squaredNorm() == 0.0) {
      throw std::invalid_argument("polyhedron_cone rows must be nonzero");
    }
  }
  auto impl = base_impl(static_cast<int>(normals.cols()), MapKind::PolyhedronCone);
  // Exact projection by enumerating candidate active sets and checking the
  // KKT conditions of min |z - x|^2 s.t. normals z <= offsets.
  auto project = [normals, offsets, m](const Vec& x) -> Vec {
    const double scale = 1.0 + x.norm();
    const double feas_tol = 1e-11 * scale;
    auto feasible = [&](const Vec& z) {
      for (int j = 0; j < m; ++j) {
        if (normals.row(j).dot(z) - offsets[j] > feas_tol) return false;
      }
      return true;
    };
    if (feasible(x)) return x;
    bool have = false;
    Vec best = x;
    double best_dist = std::numeric_limits<double>::infinity();
    for (unsigned mask = 1; mask < (1u << m); ++mask) {
      const int k = __builtin_popcount(mask);
      Eigen::MatrixXd G(k, normals.cols());
      Vec c(k);
      int r = 0;
      for (int j = 0; j < m; ++j) {
        if (mask & (1u << j)) {
          G.row(r) = normals.row(j);
          c[r] = offsets[j];
          ++r;
        }
      }
      const Eigen::MatrixXd gram = G * G.transpose();
      Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
      if (!lu.isInvertible()) continue;
      const Vec mu = lu.solve(G * x - c);
      if ((mu.array() < -1e-11 * scale).any()) continue;  // not a KKT multiplier
      const Vec z = x - G.transpose() * mu;
      if (!feasible(z)) continue;
      const double dist = (z - x).norm();
      if (dist < best_dist) {
        best_dist = dist;
        best = z;
        have = true;
      }
    }
    if (!have) {
      throw std::runtime_error("polyhedron_cone projection failed; set may be empty");
    }
    return best;
  };
  install_normal_cone(*impl, project);
  return MonotoneMap(std::move(impl));
}

MonotoneMap MonotoneMap::l1_prox(int dim, double weight) {
  if (!(weight > 0.0) || !std::isfinite(weight)) {
    throw std::invalid_argument("l1_prox needs weight > 0");
  }
  auto impl = base_impl(dim, MapKind::L1Prox);
  impl->project = [](const Vec& x) { return x; };
  impl->resolve = [weight](double lambda, const Vec& x) -> Vec {
    const double th = lambda * weight;
    Vec z(x.size());
    for (int i = 0; i < x.size(); ++i) {
      const double a = std::abs(x[i]) - th;
      z[i] = a > 0.0 ? (x[i] > 0.0 ? a : -a) : 0.0;
    }
    return z;
  };
  impl->minimal = [weight](const Vec& x) -> Vec {
    Vec v(x.size());
    for (int i = 0; i < x.size(); ++i) {
      v[i] = x[i] > 0.0 ? weight : (x[i] < 0.0 ? -weight : 0.0);
    }
    return v;
  };
  impl->yosida_exact = [weight](double lambda, const Vec& x) -> Vec {
    Vec v(x.size());
    for (int i = 0; i < x.size(); ++i) {
      v[i] = std::clamp(x[i] / lambda, -weight, weight);
    }
    return v;
  };
  return MonotoneMap(std::move(impl));
}

MonotoneMap MonotoneMap::custom(int dim,
                                std::function<Vec(double, const Vec&)> resolvent_fn,
                                std::function<Vec(const Vec&)> domain_projection_fn) {
  if (!resolvent_fn) throw std::invalid_argument("custom map needs a resolvent");
  auto impl = base_impl(dim, MapKind::Custom);
  impl->resolve = std::move(resolvent_fn);
  if (domain_projection_fn) {
    impl->project = std::move(domain_projection_fn);
  } else {
    impl->project = [](const Vec& x) { return x; };
  }
  return MonotoneMap(std::move(impl));
}

}  // namespace plbvp
