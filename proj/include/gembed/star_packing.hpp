#pragma once

#include <cstddef>

#include "gembed/graph.hpp"

namespace gembed {

/// Packing number of the 2-dimensional unit sphere with unit distance.
inline constexpr std::size_t kPlanePackingNumber = 5;

struct StarPacking {
  std::size_t count = 0;
  /// false when `count` is only a lower bound (non-forest above the
  /// branch-and-bound limit).
  bool exact = true;
};

/// Largest vertex count for which non-forests are solved exactly.
inline constexpr std::size_t kStarPackingExactLimit = 40;

/// Maximum number of vertex-disjoint K_{1,k} subgraphs (a center together
/// with k of its neighbors). Forests: tree DP, any size. Other graphs:
/// branch and bound up to kStarPackingExactLimit vertices, greedy beyond.
StarPacking max_disjoint_star_packing(const Graph& g, std::size_t k);

/// Lower bound on the Euclidean-plane v_min: disjoint (p(2)+1)-stars.
std::size_t euclidean_plane_vmin_lower_bound(const Graph& g);

}  // namespace gembed
