#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <string>
#include <vector>

#include "gembed/graph.hpp"

namespace gembed {

enum class SpaceKind { euclidean, hyperbolic };

std::string to_string(SpaceKind kind);
SpaceKind space_kind_from_string(const std::string& s);

/// Closed ball of radius R around the origin of E^n or H^n.
/// Hyperbolic points live on the hyperboloid -x0^2 + sum xk^2 = -1, x0 >= 1,
/// so they carry dim + 1 coordinates.
struct SpaceSpec {
  SpaceKind kind = SpaceKind::euclidean;
  std::size_t dim = 2;
  double radius = 1.0;

  std::size_t ambient_dim() const { return kind == SpaceKind::hyperbolic ? dim + 1 : dim; }
  /// Throws ValidationError.
  void validate() const;
};

/// Largest hyperbolic radius at which embedding coordinates are trusted.
inline constexpr double kHyperbolicPrecisionRadius = 15.0;

/// g(t) = t^q together with the space threshold tau_X.
struct GFunc {
  double q = 1.0;
  double tau_x = 0.0;

  double operator()(double t) const;
  double derivative(double t) const;
  /// Hypothesis score for a couple at distance d: g(tau_X) - g(d).
  double score(double d) const { return (*this)(tau_x) - (*this)(d); }
  void validate() const;
  void validate(const SpaceSpec& space) const;
};

using Point = Eigen::VectorXd;

double minkowski_dot(const Point& a, const Point& b);
/// Relative hyperboloid residual |<x,x>_L + 1| / x0^2.
double hyperboloid_residual(const Point& x);

Point origin(const SpaceSpec& space);
/// Point at distance r from the origin along the unit direction `dir` (length dim).
Point point_at(const SpaceSpec& space, const Eigen::VectorXd& dir, double r);
/// Throws GeometryError when x has the wrong size, is non-finite, or is off
/// the hyperboloid beyond tolerance.
void check_point(const SpaceSpec& space, const Point& x);

double distance(const SpaceSpec& space, const Point& a, const Point& b);
double distance_to_origin(const SpaceSpec& space, const Point& x);
/// Ambient (Euclidean-coordinate) gradient of d(a, b) with respect to a.
/// Zero when the points coincide.
Eigen::VectorXd distance_gradient(const SpaceSpec& space, const Point& a, const Point& b);

/// Lift x back onto the hyperboloid via x0 = sqrt(1 + |x_spatial|^2).
void renormalize(const SpaceSpec& space, Point& x);
Point project_to_ball(const SpaceSpec& space, const Point& x);

/// One projected gradient step. Euclidean: x - step * grad. Hyperbolic:
/// Riemannian gradient from the ambient gradient, exponential map, lift,
/// projection. A zero Riemannian gradient returns x unchanged. Throws
/// OptimizerError on non-finite input.
Point riemannian_step(const SpaceSpec& space, const Point& x, const Eigen::VectorXd& euclidean_grad,
                      double step);
/// Riemannian gradient norm of the ambient gradient at x (Euclidean: plain norm).
double riemannian_grad_norm(const SpaceSpec& space, const Point& x, const Eigen::VectorXd& euclidean_grad);

/// Uniform sample from the ball of radius r (hyperbolic: volume measure).
Point sample_uniform_ball(const SpaceSpec& space, double r, Rng& rng);

/// Side of the regular hyperbolic n-gon with circumradius R,
/// 2 asinh(sin(pi/n) sinh R), evaluated in the log domain for large R.
double polygon_side_length(std::size_t n, double radius);

/// Representation map: one point per entity.
struct Embedding {
  SpaceSpec space;
  std::vector<Point> points;

  std::size_t size() const { return points.size(); }
  /// Checks every point is valid and within radius + 1e-9.
  void validate() const;
};

/// Distances of every couple, in couple_index order.
std::vector<double> couple_distances(const Embedding& emb);

/// CSV with header entity,coord0,...
void write_embedding_csv(std::ostream& out, const Embedding& emb);
Embedding read_embedding_csv(std::istream& in, const SpaceSpec& space);

struct MarginReport {
  std::size_t violations = 0;
  std::vector<Couple> violating;
};

/// Margin condition under the +1 = similar convention:
/// y = +1 needs g(tau_X) - g(d) >= 1, y = -1 needs it <= -1.
MarginReport verify_margin_condition(const Embedding& emb, const GFunc& g, const std::vector<int>& labels);
/// Same, from precomputed couple distances (couple_index order).
MarginReport verify_margin_condition(std::size_t vertex_count, const std::vector<double>& couple_dist,
                                     const GFunc& g, const std::vector<int>& labels);

}  // namespace gembed
