#include "gembed/sarkar.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "gembed/errors.hpp"

namespace gembed {

namespace {

using Mat3 = Eigen::Matrix3d;

Mat3 rotation(double phi) {
  Mat3 m = Mat3::Identity();
  m(1, 1) = std::cos(phi);
  m(1, 2) = -std::sin(phi);
  m(2, 1) = std::sin(phi);
  m(2, 2) = std::cos(phi);
  return m;
}

Mat3 boost(double nu) {
  Mat3 m = Mat3::Identity();
  m(0, 0) = m(1, 1) = std::cosh(nu);
  m(0, 1) = m(1, 0) = std::sinh(nu);
  return m;
}

Mat3 lorentz_inverse(const Mat3& m) {
  const Eigen::Vector3d j(-1.0, 1.0, 1.0);
  return j.asDiagonal() * m.transpose() * j.asDiagonal();
}

// Isometry stored as M * e^s so long paths do not overflow.
struct Scaled {
  Mat3 m = Mat3::Identity();
  double s = 0.0;

  Scaled times(const Mat3& rhs) const {
    Scaled out{m * rhs, s};
    const double mx = out.m.cwiseAbs().maxCoeff();
    out.m /= mx;
    out.s += std::log(mx);
    return out;
  }

  // distance from the origin to this isometry applied to the origin
  double origin_distance() const {
    const double h = std::hypot(m(1, 0), m(2, 0));
    if (h == 0.0) return 0.0;
    const double l = std::log(h) + s;
    if (l < 20.0) return std::asinh(std::exp(l));
    return l + std::log1p(std::sqrt(1.0 + std::exp(-2.0 * l)));
  }
};

struct RootedTree {
  std::vector<Vertex> parent;
  std::vector<Mat3> local;  // child frame in parent frame
  std::vector<Mat3> local_inv;
};

RootedTree root_tree(const Graph& tree, Vertex root, double scale) {
  const std::size_t n = tree.vertex_count();
  constexpr Vertex kNone = std::numeric_limits<Vertex>::max();
  RootedTree rt{std::vector<Vertex>(n, kNone), std::vector<Mat3>(n, Mat3::Identity()),
                std::vector<Mat3>(n, Mat3::Identity())};
  const Mat3 b = boost(scale) * rotation(std::numbers::pi);
  std::vector<Vertex> stack{root};
  std::vector<char> seen(n, 0);
  seen[root] = 1;
  while (!stack.empty()) {
    const Vertex v = stack.back();
    stack.pop_back();
    const auto& nb = tree.neighbors(v);
    const double sectors = static_cast<double>(nb.size());
    // the root has no parent sector, so its children start at angle 0
    std::size_t k = v == root ? 0 : 1;
    for (Vertex c : nb) {
      if (c == rt.parent[v]) continue;
      const double phi = 2.0 * std::numbers::pi * static_cast<double>(k++) / sectors;
      rt.parent[c] = v;
      rt.local[c] = rotation(phi) * b;
      rt.local_inv[c] = lorentz_inverse(rt.local[c]);
      seen[c] = 1;
      stack.push_back(c);
    }
  }
  return rt;
}

// Isometries from `source`'s frame to every vertex's frame.
std::vector<Scaled> frames_from(const Graph& tree, const RootedTree& rt, Vertex source) {
  const std::size_t n = tree.vertex_count();
  std::vector<Scaled> out(n);
  std::vector<char> seen(n, 0);
  std::vector<Vertex> stack{source};
  seen[source] = 1;
  while (!stack.empty()) {
    const Vertex a = stack.back();
    stack.pop_back();
    for (Vertex b : tree.neighbors(a)) {
      if (seen[b]) continue;
      seen[b] = 1;
      out[b] = rt.parent[b] == a ? out[a].times(rt.local[b]) : out[a].times(rt.local_inv[a]);
      stack.push_back(b);
    }
  }
  return out;
}

}  // namespace

Vertex tree_center(const Graph& tree) {
  if (!tree.is_tree()) throw StructureError("tree_center needs a tree");
  const auto dm = all_pairs_distances(tree);
  Vertex best = 0;
  Hops best_ecc = kNoPath;
  for (Vertex v = 0; v < tree.vertex_count(); ++v) {
    Hops ecc = 0;
    for (Vertex w = 0; w < tree.vertex_count(); ++w) ecc = std::max(ecc, dm.at(v, w));
    if (ecc < best_ecc) {
      best_ecc = ecc;
      best = v;
    }
  }
  return best;
}

SarkarEmbedding sarkar_tree_embedding(const Graph& tree, double scale, std::optional<Vertex> root) {
  if (!tree.is_tree()) throw StructureError("Sarkar construction needs a connected acyclic graph");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ValidationError("edge scale must be positive");
  const std::size_t n = tree.vertex_count();
  const Vertex r = root ? *root : tree_center(tree);
  if (r >= n) throw ValidationError("root out of range");

  const RootedTree rt = root_tree(tree, r, scale);
  SarkarEmbedding out;
  out.root = r;
  out.scale = scale;

  const auto from_root = frames_from(tree, rt, r);
  out.embedding.space = SpaceSpec{SpaceKind::hyperbolic, 2, 1.0};
  out.embedding.points.resize(n);
  for (Vertex v = 0; v < n; ++v) {
    const double d = from_root[v].origin_distance();
    out.enclosing_radius = std::max(out.enclosing_radius, d);
    const Eigen::Vector3d col = from_root[v].m.col(0);
    Point p(3);
    if (d == 0.0) {
      p << 1.0, 0.0, 0.0;
    } else {
      p[0] = std::cosh(d);
      p.tail(2) = col.tail(2).normalized() * std::sinh(d);
    }
    out.embedding.points[v] = p;
  }
  out.embedding.space.radius = std::max(out.enclosing_radius, 1e-12);

  out.couple_dist.resize(couple_count(n));
  for (Vertex u = 0; u + 1 < n; ++u) {
    const auto frames = frames_from(tree, rt, u);
    for (Vertex v = u + 1; v < n; ++v) out.couple_dist[couple_index(n, u, v)] = frames[v].origin_distance();
  }
  return out;
}

namespace {
// min over non-edges of g(d) minus g(scale); +inf when there are none
double margin_gap(const Graph& tree, const SarkarEmbedding& se, const GFunc& g) {
  const std::size_t n = tree.vertex_count();
  double min_non = std::numeric_limits<double>::infinity();
  std::size_t idx = 0;
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v, ++idx)
      if (!tree.has_edge(u, v)) min_non = std::min(min_non, g(se.couple_dist[idx]));
  return min_non - g(se.scale);
}
}  // namespace

SarkarCalibration calibrate_sarkar(const Graph& tree, double q, std::optional<Vertex> root) {
  // room for coordinate rounding, which reaches ~5e-4 in distance near R = 15
  constexpr double kSlack = 1e-2;
  constexpr double kMinScale = 1e-3;
  constexpr double kMaxScale = 1e3;
  GFunc g{q, 0.0};
  g.validate();
  auto feasible = [&](double nu) { return margin_gap(tree, sarkar_tree_embedding(tree, nu, root), g) >= 2.0 + kSlack; };

  double hi = 1.0;
  double lo = kMinScale;
  if (feasible(kMinScale)) {
    hi = kMinScale;
  } else {
    while (!feasible(hi)) {
      lo = hi;
      hi *= 2.0;
      if (hi > kMaxScale) throw NumericalError("no Sarkar scale up to 1e3 satisfies the margin condition");
    }
    for (int it = 0; it < 60 && hi - lo > 1e-9 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (feasible(mid) ? hi : lo) = mid;
    }
  }

  SarkarCalibration cal;
  cal.result = sarkar_tree_embedding(tree, hi, root);
  const double gap = margin_gap(tree, cal.result, g);
  const double g_edge = g(hi);
  const double g_tau = std::isfinite(gap) ? g_edge + 0.5 * gap : g_edge + 1.0 + kSlack;
  g.tau_x = std::pow(g_tau, 1.0 / q);
  cal.g = g;
  cal.radius = std::max(cal.result.enclosing_radius, 0.5 * g.tau_x);
  cal.result.embedding.space.radius = cal.radius;
  return cal;
}

}  // namespace gembed
