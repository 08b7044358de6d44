#include "gembed/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "gembed/errors.hpp"
#include "gembed/ext_real.hpp"

namespace gembed {

namespace {
constexpr double kManifoldTol = 1e-9;
constexpr double kBallTol = 1e-9;
// exp-map steps are capped; anything longer is projected back anyway
constexpr double kMaxGeodesicStep = 30.0;

double spatial_norm(const Point& x) { return x.tail(x.size() - 1).norm(); }
}  // namespace

std::string to_string(SpaceKind kind) { return kind == SpaceKind::euclidean ? "euclidean" : "hyperbolic"; }

SpaceKind space_kind_from_string(const std::string& s) {
  if (s == "euclidean") return SpaceKind::euclidean;
  if (s == "hyperbolic") return SpaceKind::hyperbolic;
  throw ValidationError("unknown space kind '" + s + "' (expected euclidean or hyperbolic)");
}

void SpaceSpec::validate() const {
  if (dim < 1) throw ValidationError("space dimension must be >= 1");
  if (kind == SpaceKind::hyperbolic && dim < 2) throw ValidationError("hyperbolic space needs dimension >= 2");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw ValidationError("ball radius must be finite and positive");
}

double GFunc::operator()(double t) const { return q == 1.0 ? t : std::pow(t, q); }

double GFunc::derivative(double t) const {
  if (q == 1.0) return 1.0;
  if (q == 2.0) return 2.0 * t;
  return q * std::pow(t, q - 1.0);
}

void GFunc::validate() const {
  if (!(q >= 1.0) || !std::isfinite(q)) throw ValidationError("g exponent q must be >= 1");
  if (!(tau_x >= 0.0) || !std::isfinite(tau_x)) throw ValidationError("space threshold tau_X must be >= 0");
}

void GFunc::validate(const SpaceSpec& space) const {
  validate();
  if (tau_x > 2.0 * space.radius + 1e-12) throw ValidationError("space threshold tau_X must lie in [0, 2R]");
}

double minkowski_dot(const Point& a, const Point& b) {
  return -a[0] * b[0] + a.tail(a.size() - 1).dot(b.tail(b.size() - 1));
}

double hyperboloid_residual(const Point& x) { return std::fabs(minkowski_dot(x, x) + 1.0) / (x[0] * x[0]); }

Point origin(const SpaceSpec& space) {
  Point x = Point::Zero(static_cast<Eigen::Index>(space.ambient_dim()));
  if (space.kind == SpaceKind::hyperbolic) x[0] = 1.0;
  return x;
}

Point point_at(const SpaceSpec& space, const Eigen::VectorXd& dir, double r) {
  if (static_cast<std::size_t>(dir.size()) != space.dim) throw GeometryError("direction has wrong dimension");
  const double nd = dir.norm();
  if (!(nd > 0.0)) throw GeometryError("direction must be non-zero");
  if (space.kind == SpaceKind::euclidean) return dir * (r / nd);
  Point x(static_cast<Eigen::Index>(space.dim + 1));
  x[0] = std::cosh(r);
  x.tail(static_cast<Eigen::Index>(space.dim)) = dir * (std::sinh(r) / nd);
  return x;
}

void check_point(const SpaceSpec& space, const Point& x) {
  if (static_cast<std::size_t>(x.size()) != space.ambient_dim())
    throw GeometryError("point has " + std::to_string(x.size()) + " coordinates, expected " +
                        std::to_string(space.ambient_dim()));
  if (!x.allFinite()) throw GeometryError("point has non-finite coordinates");
  if (space.kind == SpaceKind::hyperbolic) {
    if (x[0] < 1.0 - kManifoldTol || hyperboloid_residual(x) > kManifoldTol)
      throw GeometryError("point is off the hyperboloid");
  }
}

double distance(const SpaceSpec& space, const Point& a, const Point& b) {
  if (space.kind == SpaceKind::euclidean) return (a - b).norm();
  check_point(space, a);
  check_point(space, b);
  const double inner = -minkowski_dot(a, b);
  if (inner - 1.0 < 1e-3) {
    // acosh(1 + u) = 2 asinh(sqrt(u / 2)) with 2u = <a-b, a-b>_L
    const Point diff = a - b;
    const double sq = std::max(minkowski_dot(diff, diff), 0.0);
    return 2.0 * std::asinh(0.5 * std::sqrt(sq));
  }
  return std::acosh(inner);
}

double distance_to_origin(const SpaceSpec& space, const Point& x) {
  if (space.kind == SpaceKind::euclidean) return x.norm();
  return std::asinh(spatial_norm(x));
}

Eigen::VectorXd distance_gradient(const SpaceSpec& space, const Point& a, const Point& b) {
  if (space.kind == SpaceKind::euclidean) {
    const double d = (a - b).norm();
    if (d < 1e-300) return Eigen::VectorXd::Zero(a.size());
    return (a - b) / d;
  }
  const double d = distance(space, a, b);
  if (d < 1e-12) return Eigen::VectorXd::Zero(a.size());
  // d/da acosh(-<a,b>_L) = (b0, -b1, ..., -bn) / sinh d
  Eigen::VectorXd g = -b;
  g[0] = b[0];
  return g / std::sinh(d);
}

void renormalize(const SpaceSpec& space, Point& x) {
  if (space.kind == SpaceKind::hyperbolic) x[0] = std::sqrt(1.0 + x.tail(x.size() - 1).squaredNorm());
}

Point project_to_ball(const SpaceSpec& space, const Point& x) {
  if (space.kind == SpaceKind::euclidean) {
    const double r = x.norm();
    if (r <= space.radius) return x;
    return x * (space.radius / r);
  }
  const double s = spatial_norm(x);
  if (std::asinh(s) <= space.radius) {
    Point y = x;
    renormalize(space, y);
    return y;
  }
  Point y(x.size());
  y[0] = std::cosh(space.radius);
  y.tail(x.size() - 1) = x.tail(x.size() - 1) * (std::sinh(space.radius) / s);
  return y;
}

namespace {
Eigen::VectorXd hyperbolic_rgrad(const Point& x, const Eigen::VectorXd& egrad) {
  Eigen::VectorXd h = egrad;
  h[0] = -h[0];
  return h + minkowski_dot(x, h) * x;
}
}  // namespace

Point riemannian_step(const SpaceSpec& space, const Point& x, const Eigen::VectorXd& euclidean_grad,
                      double step) {
  if (!euclidean_grad.allFinite() || !std::isfinite(step)) throw OptimizerError("non-finite gradient or step");
  if (euclidean_grad.size() != x.size()) throw OptimizerError("gradient has wrong dimension");
  if (space.kind == SpaceKind::euclidean) return project_to_ball(space, x - step * euclidean_grad);

  const Eigen::VectorXd v = -step * hyperbolic_rgrad(x, euclidean_grad);
  double n = std::sqrt(std::max(minkowski_dot(v, v), 0.0));
  if (n == 0.0) return x;
  const double len = std::min(n, kMaxGeodesicStep);
  Point y = std::cosh(len) * x + (std::sinh(len) / n) * v;
  renormalize(space, y);
  if (!y.allFinite()) throw OptimizerError("exponential map produced non-finite point");
  return project_to_ball(space, y);
}

double riemannian_grad_norm(const SpaceSpec& space, const Point& x, const Eigen::VectorXd& euclidean_grad) {
  if (space.kind == SpaceKind::euclidean) return euclidean_grad.norm();
  const Eigen::VectorXd rg = hyperbolic_rgrad(x, euclidean_grad);
  return std::sqrt(std::max(minkowski_dot(rg, rg), 0.0));
}

Point sample_uniform_ball(const SpaceSpec& space, double r, Rng& rng) {
  const auto n = static_cast<Eigen::Index>(space.dim);
  Eigen::VectorXd dir(n);
  do {
    for (Eigen::Index i = 0; i < n; ++i) dir[i] = rng.normal();
  } while (dir.norm() < 1e-12);
  const double u = rng.uniform();
  double rho = 0.0;
  if (space.kind == SpaceKind::euclidean) {
    rho = r * std::pow(u, 1.0 / static_cast<double>(n));
  } else if (n == 2) {
    // radial CDF proportional to cosh(rho) - 1
    rho = std::acosh(1.0 + u * (std::cosh(r) - 1.0));
  } else {
    // radial density proportional to sinh^{n-1}: draw from the plane law
    // (density sinh) and accept with probability (sinh rho / sinh r)^{n-2}
    const double e = static_cast<double>(n - 2);
    for (double v = u;; v = rng.uniform()) {
      rho = std::acosh(1.0 + v * (std::cosh(r) - 1.0));
      const double ratio = std::exp(rho - r) * (-std::expm1(-2.0 * rho)) / (-std::expm1(-2.0 * r));
      if (rng.uniform() < std::pow(ratio, e)) break;
    }
  }
  return point_at(space, dir, rho);
}

double polygon_side_length(std::size_t n, double radius) {
  if (n < 3) throw ValidationError("polygon needs at least 3 vertices");
  if (!(radius > 0.0)) throw ValidationError("polygon circumradius must be positive");
  const ExtReal y = ExtReal(std::sin(std::numbers::pi / static_cast<double>(n))) * ext_sinh(radius);
  if (y.log_abs() < 20.0) return 2.0 * std::asinh(y.to_double());
  // asinh(y) = log y + log(1 + sqrt(1 + 1/y^2))
  const double inv_sq = std::exp(-2.0 * y.log_abs());
  return 2.0 * (y.log_abs() + std::log1p(std::sqrt(1.0 + inv_sq)));
}

void Embedding::validate() const {
  space.validate();
  for (std::size_t i = 0; i < points.size(); ++i) {
    check_point(space, points[i]);
    if (distance_to_origin(space, points[i]) > space.radius + kBallTol)
      throw GeometryError("entity " + std::to_string(i) + " lies outside the ball");
  }
}

std::vector<double> couple_distances(const Embedding& emb) {
  const std::size_t n = emb.size();
  std::vector<double> out;
  out.reserve(couple_count(n));
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v) out.push_back(distance(emb.space, emb.points[u], emb.points[v]));
  return out;
}

void write_embedding_csv(std::ostream& out, const Embedding& emb) {
  out << "entity";
  for (std::size_t k = 0; k < emb.space.ambient_dim(); ++k) out << ",coord" << k;
  out << "\n";
  char buf[40];
  for (std::size_t i = 0; i < emb.size(); ++i) {
    out << i;
    for (Eigen::Index k = 0; k < emb.points[i].size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", emb.points[i][k]);
      out << "," << buf;
    }
    out << "\n";
  }
}

Embedding read_embedding_csv(std::istream& in, const SpaceSpec& space) {
  Embedding emb{space, {}};
  std::string line;
  while (std::getline(in, line) && !line.empty() && line[0] == '#') {
  }
  if (line.rfind("entity", 0) != 0)
    throw ValidationError("embedding CSV must start with an 'entity,coord0,...' header");
  const auto cols = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
  if (cols != space.ambient_dim()) throw ValidationError("embedding CSV has the wrong number of coordinates");
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    std::size_t id = 0;
    ss >> id;
    if (id != emb.points.size()) throw ValidationError("embedding CSV entities must be listed as 0,1,2,...");
    Point p(static_cast<Eigen::Index>(cols));
    for (std::size_t k = 0; k < cols; ++k)
      if (!(ss >> p[static_cast<Eigen::Index>(k)])) throw ValidationError("malformed embedding CSV row");
    emb.points.push_back(std::move(p));
  }
  emb.validate();
  return emb;
}

MarginReport verify_margin_condition(std::size_t vertex_count, const std::vector<double>& couple_dist,
                                     const GFunc& g, const std::vector<int>& labels) {
  const std::size_t m = couple_count(vertex_count);
  if (couple_dist.size() != m || labels.size() != m)
    throw ValidationError("margin check needs one distance and one label per couple");
  MarginReport rep;
  std::size_t idx = 0;
  for (Vertex u = 0; u < vertex_count; ++u) {
    for (Vertex v = u + 1; v < vertex_count; ++v, ++idx) {
      const double s = g.score(couple_dist[idx]);
      const bool bad = labels[idx] > 0 ? s < 1.0 : s > -1.0;
      if (bad) {
        ++rep.violations;
        rep.violating.emplace_back(u, v);
      }
    }
  }
  return rep;
}

MarginReport verify_margin_condition(const Embedding& emb, const GFunc& g, const std::vector<int>& labels) {
  return verify_margin_condition(emb.size(), couple_distances(emb), g, labels);
}

}  // namespace gembed
