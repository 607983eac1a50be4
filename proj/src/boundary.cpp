#include "boundary.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <utility>

namespace plbvp {

struct BoundaryOperator::Impl {
  int dim = 0;
  BcKind kind = BcKind::Dirichlet;
  std::function<Vec(double, const Vec&)> resolve;
  // Optional exact graph sampler.  The generic probe route (resolve a random
  // point, divide the gap by mu) carries ulp-level graph error, which matters
  // for operators whose graph structure is used for exact cancellations.
  std::function<std::vector<BoundaryGraphSample>(int, double, std::uint64_t)> sampler;
};

BoundaryOperator::BoundaryOperator(std::shared_ptr<const Impl> impl)
    : impl_(std::move(impl)) {}

int BoundaryOperator::dim() const { return impl_->dim; }
BcKind BoundaryOperator::kind() const { return impl_->kind; }

Vec BoundaryOperator::resolvent(double mu, const Vec& w) const {
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw std::invalid_argument("boundary resolvent parameter must be positive");
  }
  if (w.size() != 2 * impl_->dim) {
    throw std::invalid_argument("boundary resolvent: argument must lie in R^(2N)");
  }
  return impl_->resolve(mu, w);
}

static std::shared_ptr<BoundaryOperator::Impl> bc_impl(int dim, BcKind kind) {
  if (dim < 1) throw std::invalid_argument("boundary operator dimension must be >= 1");
  auto impl = std::make_shared<BoundaryOperator::Impl>();
  impl->dim = dim;
  impl->kind = kind;
  return impl;
}

BoundaryOperator BoundaryOperator::dirichlet(int dim) {
  auto impl = bc_impl(dim, BcKind::Dirichlet);
  impl->resolve = [dim](double, const Vec&) -> Vec { return Vec::Zero(2 * dim); };
  return BoundaryOperator(std::move(impl));
}

BoundaryOperator BoundaryOperator::neumann(int dim) {
  auto impl = bc_impl(dim, BcKind::Neumann);
  impl->resolve = [](double, const Vec& w) { return w; };
  return BoundaryOperator(std::move(impl));
}

BoundaryOperator BoundaryOperator::periodic(int dim) {
  auto impl = bc_impl(dim, BcKind::Periodic);
  impl->resolve = [dim](double, const Vec& w) -> Vec {
    Vec z(2 * dim);
    z.head(dim) = 0.5 * (w.head(dim) + w.tail(dim));
    z.tail(dim) = z.head(dim);
    return z;
  };
  // Graph points are ((a, a), (v, -v)); sampling them directly keeps the flux
  // pair an exact negation, so downstream pairings cancel to the last bit.
  impl->sampler = [dim](int count, double amplitude,
                        std::uint64_t seed) -> std::vector<BoundaryGraphSample> {
    std::mt19937_64 rng(seed ^ 0xc2b2ae3d27d4eb4full);
    std::uniform_real_distribution<double> unif(-amplitude, amplitude);
    std::vector<BoundaryGraphSample> out;
    out.reserve(count);
    for (int s = 0; s < count; ++s) {
      BoundaryGraphSample g;
      g.a0 = Vec(dim);
      g.b0 = Vec(dim);
      for (int k = 0; k < dim; ++k) {
        g.a0[k] = unif(rng);
        g.b0[k] = unif(rng);
      }
      g.aT = g.a0;
      g.bT = -g.b0;
      out.push_back(std::move(g));
    }
    return out;
  };
  return BoundaryOperator(std::move(impl));
}

// Solves s + c s^(p-1) = r for s in [0, r] (monotone radial equation).
static double radial_root(double c, double p, double r) {
  if (r == 0.0) return 0.0;
  if (p == 2.0) return r / (1.0 + c);
  double lo = 0.0, hi = r;
  for (int k = 0; k < 40 && hi - lo > 1e-3 * r; ++k) {
    const double mid = 0.5 * (lo + hi);
    const double g = mid + c * std::pow(mid, p - 1.0) - r;
    (g > 0.0 ? hi : lo) = mid;
  }
  double s = 0.5 * (lo + hi);
  for (int k = 0; k < 60; ++k) {
    const double g = s + c * std::pow(s, p - 1.0) - r;
    if (std::abs(g) <= 1e-15 * (1.0 + r)) break;
    const double dg = 1.0 + c * (p - 1.0) * std::pow(s, p - 2.0);
    double next = s - g / dg;
    if (next < lo || next > hi) next = 0.5 * (lo + hi);
    (g > 0.0 ? hi : lo) = s;
    s = next;
  }
  return s;
}

BoundaryOperator BoundaryOperator::sturm_liouville(int dim, const Exponent& e,
                                                   double theta, double eta) {
  if (!(theta > 0.0) || !(eta > 0.0)) {
    throw std::invalid_argument("sturm_liouville needs theta, eta > 0");
  }
  auto impl = bc_impl(dim, BcKind::SturmLiouville);
  const double p = e.p;
  const double c0 = 1.0 / std::pow(theta, p - 1.0);
  const double cT = 1.0 / std::pow(eta, p - 1.0);
  auto resolve_half = [p](double coeff, const Vec& w) -> Vec {
    const double r = w.norm();
    if (r == 0.0) return Vec::Zero(w.size());
    const double s = radial_root(coeff, p, r);
    return (s / r) * w;
  };
  impl->resolve = [dim, c0, cT, resolve_half](double mu, const Vec& w) -> Vec {
    Vec z(2 * dim);
    z.head(dim) = resolve_half(mu * c0, w.head(dim));
    z.tail(dim) = resolve_half(mu * cT, w.tail(dim));
    return z;
  };
  return BoundaryOperator(std::move(impl));
}

BoundaryOperator BoundaryOperator::product(const MonotoneMap& first,
                                           const MonotoneMap& second) {
  if (first.dim() != second.dim()) {
    throw std::invalid_argument("product boundary operator needs equal block dimensions");
  }
  const int dim = first.dim();
  auto impl = bc_impl(dim, BcKind::Product);
  impl->resolve = [dim, first, second](double mu, const Vec& w) -> Vec {
    Vec z(2 * dim);
    z.head(dim) = first.resolvent(mu, w.head(dim));
    z.tail(dim) = second.resolvent(mu, w.tail(dim));
    return z;
  };
  return BoundaryOperator(std::move(impl));
}

BoundaryOperator BoundaryOperator::custom(int dim,
                                          std::function<Vec(double, const Vec&)> resolvent_fn) {
  if (!resolvent_fn) throw std::invalid_argument("custom boundary operator needs a resolvent");
  auto impl = bc_impl(dim, BcKind::Custom);
  impl->resolve = std::move(resolvent_fn);
  return BoundaryOperator(std::move(impl));
}

Vec bc_residual(const BoundaryOperator& xi, double mu, const Vec& a, const Vec& aT,
                const Vec& b, const Vec& bT) {
  const int dim = xi.dim();
  if (a.size() != dim || aT.size() != dim || b.size() != dim || bT.size() != dim) {
    throw std::invalid_argument("bc_residual: argument dimension mismatch");
  }
  Vec w(2 * dim);
  w.head(dim) = a + mu * b;
  w.tail(dim) = aT + mu * bT;
  const Vec z = xi.resolvent(mu, w);
  Vec r(2 * dim);
  r.head(dim) = a - z.head(dim);
  r.tail(dim) = aT - z.tail(dim);
  return r;
}

std::vector<BoundaryGraphSample> sample_boundary_graph(const BoundaryOperator& xi,
                                                       int count, double mu,
                                                       double amplitude,
                                                       std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("sample_boundary_graph needs count >= 1");
  if (!(mu > 0.0)) throw std::invalid_argument("sample_boundary_graph needs mu > 0");
  if (xi.impl_->sampler) return xi.impl_->sampler(count, amplitude, seed);
  const int dim = xi.dim();
  std::mt19937_64 rng(seed ^ 0xc2b2ae3d27d4eb4full);
  std::uniform_real_distribution<double> unif(-amplitude, amplitude);
  std::vector<BoundaryGraphSample> out;
  out.reserve(count);
  for (int s = 0; s < count; ++s) {
    Vec w(2 * dim);
    for (int k = 0; k < 2 * dim; ++k) w[k] = unif(rng);
    const Vec z = xi.resolvent(mu, w);
    const Vec v = (w - z) / mu;
    BoundaryGraphSample g;
    g.a0 = z.head(dim);
    g.aT = z.tail(dim);
    g.b0 = v.head(dim);
    g.bT = v.tail(dim);
    out.push_back(std::move(g));
  }
  return out;
}

HxiReport check_h_xi(const BoundaryOperator& xi, int sample_count, double mu,
                     double amplitude, double tol, std::uint64_t seed) {
  const auto samples = sample_boundary_graph(xi, sample_count, mu, amplitude, seed);
  HxiReport rep;
  rep.tolerance = tol;
  rep.sign_min = std::numeric_limits<double>::infinity();
  for (const auto& g : samples) {
    // Both end pairings must be nonnegative, so track the smaller one.
    const double s = std::min(g.b0.dot(g.a0), g.bT.dot(g.aT));
    if (s < rep.sign_min) {
      rep.sign_min = s;
      rep.sign_witness = g;
    }
    rep.max_diagonal_gap = std::max(rep.max_diagonal_gap, (g.a0 - g.aT).norm());
  }
  // nonexpansiveness of the resolvent on probe pairs
  const int dim = xi.dim();
  std::mt19937_64 rng(seed ^ 0x165667b19e3779f9ull);
  std::uniform_real_distribution<double> unif(-amplitude, amplitude);
  for (int s = 0; s < sample_count; ++s) {
    Vec w1(2 * dim), w2(2 * dim);
    for (int k = 0; k < 2 * dim; ++k) {
      w1[k] = unif(rng);
      w2[k] = unif(rng);
    }
    const double gap = (w1 - w2).norm();
    if (gap < 1e-12) continue;
    const double ratio = (xi.resolvent(mu, w1) - xi.resolvent(mu, w2)).norm() / gap;
    rep.max_expansion_ratio = std::max(rep.max_expansion_ratio, ratio);
  }
  rep.sign_branch = rep.sign_min >= -tol;
  rep.diagonal_branch = rep.max_diagonal_gap <= tol;
  rep.nonexpansive = rep.max_expansion_ratio <= 1.0 + tol;
  rep.passed = rep.nonexpansive && (rep.sign_branch || rep.diagonal_branch);
  return rep;
}

H0Report check_h0(const MonotoneMap& A, const BoundaryOperator& xi,
                  const std::vector<double>& lambdas, int sample_count, double mu,
                  double amplitude, double tol, std::uint64_t seed) {
  if (A.dim() != xi.dim()) {
    throw std::invalid_argument("check_h0: map and boundary operator dimensions differ");
  }
  if (lambdas.empty()) throw std::invalid_argument("check_h0 needs at least one lambda");
  const auto samples = sample_boundary_graph(xi, sample_count, mu, amplitude, seed);
  H0Report rep;
  rep.tolerance = tol;
  rep.min_pairing = std::numeric_limits<double>::infinity();
  for (double lambda : lambdas) {
    if (!(lambda > 0.0)) throw std::invalid_argument("check_h0 lambdas must be positive");
    for (const auto& g : samples) {
      const double s = A.yosida(lambda, g.a0).dot(g.b0) + A.yosida(lambda, g.aT).dot(g.bT);
      if (s < rep.min_pairing) {
        rep.min_pairing = s;
        rep.witness_lambda = lambda;
        rep.witness = g;
      }
    }
  }
  rep.passed = rep.min_pairing >= -tol;
  return rep;
}

}  // namespace plbvp
