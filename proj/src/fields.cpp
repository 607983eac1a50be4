#include "fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace plbvp {

struct MultiField::Impl {
  int dim = 0;
  double horizon = 0.0;
  std::string name;
  std::function<Vec(double, const Vec&)> select;
  // Empty: membership is comparison against the stored selection.
  std::function<bool(double, const Vec&, const Vec&, double)> member;
  bool convex_valued = true;
};

MultiField::MultiField(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

int MultiField::dim() const { return impl_->dim; }
double MultiField::horizon() const { return impl_->horizon; }
const std::string& MultiField::name() const { return impl_->name; }

Vec MultiField::select(double t, const Vec& zeta) const {
  if (zeta.size() != impl_->dim) {
    throw std::invalid_argument("field: argument dimension mismatch");
  }
  if (!(t >= 0.0) || !(t <= impl_->horizon * (1.0 + 1e-12) + 1e-300)) {
    throw std::invalid_argument("field: time outside [0, horizon]");
  }
  return impl_->select(t, zeta);
}

bool MultiField::member(double t, const Vec& zeta, const Vec& u, double tol) const {
  if (u.size() != impl_->dim) {
    throw std::invalid_argument("field: argument dimension mismatch");
  }
  if (impl_->member) return impl_->member(t, zeta, u, tol);
  return (u - select(t, zeta)).norm() <= tol;
}

bool MultiField::convex_valued() const { return impl_->convex_valued; }

static std::shared_ptr<MultiField::Impl> field_impl(int dim, double horizon,
                                                    std::string name) {
  if (dim < 1) throw std::invalid_argument("field dimension must be >= 1");
  if (!(horizon > 0.0)) throw std::invalid_argument("field horizon must be positive");
  auto impl = std::make_shared<MultiField::Impl>();
  impl->dim = dim;
  impl->horizon = horizon;
  impl->name = std::move(name);
  return impl;
}

MultiField MultiField::msin(int dim, double horizon) {
  auto impl = field_impl(dim, horizon, "msin");
  const double pi = std::acos(-1.0);
  impl->select = [dim, horizon, pi](double t, const Vec&) -> Vec {
    return Vec::Constant(dim, -pi * pi * std::sin(pi * t / horizon));
  };
  return MultiField(std::move(impl));
}

MultiField MultiField::plap3(int dim, double horizon, double p) {
  if (!(p >= 2.0)) throw std::invalid_argument("plap3 needs p >= 2");
  auto impl = field_impl(dim, horizon, "plap3");
  impl->select = [dim, horizon, p](double t, const Vec&) -> Vec {
    const double s = std::abs(horizon - 2.0 * t);
    return Vec::Constant(dim, -2.0 * (p - 1.0) * std::pow(s, p - 2.0));
  };
  return MultiField(std::move(impl));
}

MultiField MultiField::constant(int dim, double horizon, const Vec& value) {
  if (value.size() != dim) throw std::invalid_argument("constant field: value dimension");
  auto impl = field_impl(dim, horizon, "constant");
  impl->select = [value](double, const Vec&) { return value; };
  return MultiField(std::move(impl));
}

MultiField MultiField::linear(int dim, double horizon) {
  auto impl = field_impl(dim, horizon, "linear");
  impl->select = [](double, const Vec& zeta) { return zeta; };
  return MultiField(std::move(impl));
}

MultiField MultiField::negated(int dim, double horizon) {
  auto impl = field_impl(dim, horizon, "negated");
  impl->select = [](double, const Vec& zeta) -> Vec { return -zeta; };
  return MultiField(std::move(impl));
}

MultiField MultiField::step(int dim, double horizon, const Vec& value1, const Vec& value2,
                            double switch_time) {
  if (value1.size() != dim || value2.size() != dim) {
    throw std::invalid_argument("step field: value dimension mismatch");
  }
  if (!(switch_time >= 0.0) || !(switch_time <= horizon)) {
    throw std::invalid_argument("step field: switch time outside [0, horizon]");
  }
  auto impl = field_impl(dim, horizon, "step");
  impl->select = [value1, value2, switch_time](double t, const Vec&) {
    return t <= switch_time ? value1 : value2;
  };
  return MultiField(std::move(impl));
}

MultiField MultiField::tabulated(int dim, double horizon,
                                 std::vector<std::pair<double, Vec>> rows) {
  if (rows.empty()) throw std::invalid_argument("tabulated field needs rows");
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].second.size() != dim) {
      throw std::invalid_argument("tabulated field: row dimension mismatch");
    }
    if (i > 0 && !(rows[i].first > rows[i - 1].first)) {
      throw std::invalid_argument("tabulated field rows must be strictly increasing in t");
    }
  }
  auto impl = field_impl(dim, horizon, "tabulated");
  impl->select = [rows = std::move(rows)](double t, const Vec&) -> Vec {
    if (t <= rows.front().first) return rows.front().second;
    if (t >= rows.back().first) return rows.back().second;
    auto hi = std::upper_bound(rows.begin(), rows.end(), t,
                               [](double v, const auto& row) { return v < row.first; });
    auto lo = hi - 1;
    const double w = (t - lo->first) / (hi->first - lo->first);
    return (1.0 - w) * lo->second + w * hi->second;
  };
  return MultiField(std::move(impl));
}

MultiField MultiField::custom(int dim, double horizon, std::string name,
                              std::function<Vec(double, const Vec&)> select_fn,
                              std::function<bool(double, const Vec&, const Vec&, double)>
                                  member_fn,
                              bool convex_valued) {
  if (!select_fn) throw std::invalid_argument("custom field needs a selection");
  auto impl = field_impl(dim, horizon, std::move(name));
  impl->select = std::move(select_fn);
  impl->member = std::move(member_fn);
  impl->convex_valued = convex_valued;
  return MultiField(std::move(impl));
}

Vec radial_retraction(double M, const Vec& zeta) {
  if (!(M > 0.0)) throw std::invalid_argument("radial_retraction needs M > 0");
  const double norm = zeta.norm();
  // Ulp-level slack makes the retraction exactly idempotent: rescaled points
  // land within a couple of ulps of the sphere and must map to themselves.
  if (norm <= M * (1.0 + 8.0 * std::numeric_limits<double>::epsilon())) return zeta;
  return (M / norm) * zeta;
}

Vec truncated_select(const MultiField& F, const Exponent& e, double M, double t,
                     const Vec& zeta) {
  const Vec retracted = radial_retraction(M, zeta);
  return -F.select(t, retracted) + phi(e, retracted);
}

std::vector<Vec> sphere_points(int dim, double radius, int count, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("sphere_points dimension must be >= 1");
  if (!(radius > 0.0)) throw std::invalid_argument("sphere_points radius must be positive");
  std::vector<Vec> pts;
  if (dim == 1) {
    pts.push_back(Vec::Constant(1, radius));
    pts.push_back(Vec::Constant(1, -radius));
    return pts;
  }
  for (int k = 0; k < dim; ++k) {
    Vec e = Vec::Zero(dim);
    e[k] = radius;
    pts.push_back(e);
    pts.push_back(-e);
  }
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::normal_distribution<double> gauss(0.0, 1.0);
  while (static_cast<int>(pts.size()) < count) {
    Vec g(dim);
    for (int k = 0; k < dim; ++k) g[k] = gauss(rng);
    const double norm = g.norm();
    if (norm < 1e-12) continue;
    pts.push_back((radius / norm) * g);
  }
  return pts;
}

HartmanReport check_hartman(const MultiField& F, double M, int time_samples,
                            int sphere_samples, double tol, std::uint64_t seed) {
  if (!(M > 0.0)) throw std::invalid_argument("check_hartman needs M > 0");
  if (time_samples < 1 || sphere_samples < 1) {
    throw std::invalid_argument("check_hartman needs positive sample counts");
  }
  HartmanReport rep;
  rep.radius = M;
  rep.time_samples = time_samples;
  rep.tolerance = tol;
  const auto pts = sphere_points(F.dim(), M, sphere_samples, seed);
  rep.sphere_samples = static_cast<int>(pts.size());
  double min_ip = std::numeric_limits<double>::infinity();
  for (int it = 0; it <= time_samples; ++it) {
    const double t = F.horizon() * it / time_samples;
    for (const Vec& zeta : pts) {
      const Vec u = F.select(t, zeta);
      const double ip = u.dot(zeta);
      if (ip < min_ip) {
        min_ip = ip;
        rep.witness_time = t;
        rep.witness_zeta = zeta;
        rep.witness_value = u;
      }
    }
  }
  rep.min_inner_product = min_ip;
  rep.passed = min_ip >= -tol;
  return rep;
}

double estimate_growth(const MultiField& F, double k, int time_samples, int ball_samples,
                       std::uint64_t seed) {
  if (!(k > 0.0)) throw std::invalid_argument("estimate_growth needs k > 0");
  if (time_samples < 1 || ball_samples < 1) {
    throw std::invalid_argument("estimate_growth needs positive sample counts");
  }
  std::vector<Vec> pts = sphere_points(F.dim(), k, ball_samples, seed);
  pts.push_back(Vec::Zero(F.dim()));
  std::mt19937_64 rng(seed ^ 0xda3e39cb94b95bdbull);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const size_t shell = pts.size();
  for (size_t j = 0; j < shell; ++j) {
    // interior companion point at a seeded fractional radius
    pts.push_back(std::pow(unif(rng), 1.0 / F.dim()) * pts[j]);
  }
  double bound = 0.0;
  for (int it = 0; it <= time_samples; ++it) {
    const double t = F.horizon() * it / time_samples;
    for (const Vec& zeta : pts) {
      bound = std::max(bound, F.select(t, zeta).norm());
    }
  }
  return bound;
}

}  // namespace plbvp
