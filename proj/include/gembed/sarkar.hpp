#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "gembed/geometry.hpp"
#include "gembed/graph.hpp"

namespace gembed {

/// Tree placed in the hyperbolic plane with uniform edge length.
struct SarkarEmbedding {
  /// Hyperboloid coordinates in H^2. Only trustworthy for enclosing radius
  /// up to kHyperbolicPrecisionRadius; use `couple_dist` beyond that.
  Embedding embedding;
  /// Pairwise distances in couple_index order, computed by composing the
  /// local isometries along tree paths (accurate at any radius).
  std::vector<double> couple_dist;
  Vertex root = 0;
  double scale = 0.0;
  /// Largest distance from the root.
  double enclosing_radius = 0.0;
};

/// Root at the origin, every child at distance `scale` from its parent.
/// The root splits 2*pi uniformly among its children; any other vertex v
/// splits it into deg(v) equal sectors, the parent taking angle 0.
/// Root defaults to a tree center. Throws StructureError on non-trees.
SarkarEmbedding sarkar_tree_embedding(const Graph& tree, double scale, std::optional<Vertex> root = {});

struct SarkarCalibration {
  SarkarEmbedding result;
  /// g with tau_X centered between the edge and non-edge g-values.
  GFunc g;
  /// Ball radius to use: max(enclosing radius, tau_X / 2).
  double radius = 0.0;
};

/// Smallest scale (doubling + bisection) at which every edge satisfies
/// g(d) <= g(tau_X) - 1 and every non-edge g(d) >= g(tau_X) + 1 for some
/// tau_X, i.e. min non-edge g(d) - g(scale) >= 2. Throws NumericalError if
/// no scale up to 1e3 works.
SarkarCalibration calibrate_sarkar(const Graph& tree, double q = 1.0, std::optional<Vertex> root = {});

/// A vertex minimizing eccentricity.
Vertex tree_center(const Graph& tree);

}  // namespace gembed
