#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "gembed/rng.hpp"

namespace gembed {

using Vertex = std::uint32_t;

/// Unordered entity couple {u, v}, stored with u < v.
struct Couple {
  Vertex u = 0;
  Vertex v = 0;

  Couple() = default;
  Couple(Vertex a, Vertex b);

  friend bool operator==(const Couple&, const Couple&) = default;
};

/// |E_2(V)| = n(n-1)/2.
constexpr std::size_t couple_count(std::size_t n) { return n * (n - 1) / 2; }

/// Position of {u, v} in the lexicographic enumeration of E_2(V):
/// (0,1), (0,2), ..., (0,n-1), (1,2), ...
std::size_t couple_index(std::size_t n, Vertex u, Vertex v);
Couple couple_at(std::size_t n, std::size_t index);
/// All couples of an n-vertex set, in couple_index order.
std::vector<Couple> all_couples(std::size_t n);

/// Finite undirected simple graph. Immutable after construction.
class Graph {
 public:
  Graph() = default;
  /// Throws StructureError on self-loops or out-of-range endpoints.
  /// Duplicate edges collapse.
  Graph(std::size_t vertex_count, std::span<const std::pair<Vertex, Vertex>> edges);

  std::size_t vertex_count() const { return adjacency_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Couple>& edges() const { return edges_; }
  const std::vector<Vertex>& neighbors(Vertex v) const { return adjacency_.at(v); }
  std::size_t degree(Vertex v) const { return adjacency_.at(v).size(); }
  bool has_edge(Vertex a, Vertex b) const;

  bool is_forest() const;
  bool is_connected() const;
  bool is_tree() const { return is_connected() && is_forest(); }

 private:
  std::vector<Couple> edges_;
  std::vector<std::vector<Vertex>> adjacency_;
};

/// Hop distance with a distinguished "no path" value.
using Hops = std::uint32_t;
inline constexpr Hops kNoPath = std::numeric_limits<Hops>::max();

/// All-pairs shortest-path hop counts.
class DistanceMatrix {
 public:
  explicit DistanceMatrix(std::size_t n) : n_(n), hops_(n * n, kNoPath) {}

  std::size_t size() const { return n_; }
  Hops at(Vertex a, Vertex b) const { return hops_[a * n_ + b]; }
  bool connected(Vertex a, Vertex b) const { return at(a, b) != kNoPath; }
  void set(Vertex a, Vertex b, Hops h) { hops_[a * n_ + b] = h; }

 private:
  std::size_t n_;
  std::vector<Hops> hops_;
};

/// Complete balanced `arity`-ary tree with `levels` levels (root is level 1),
/// vertices numbered in BFS order with root 0.
Graph complete_ary_tree(std::size_t arity, std::size_t levels);
Graph path_graph(std::size_t n);
/// K_{1,k}: center 0 with leaves 1..k.
Graph star_graph(std::size_t leaves);
/// Uniform random recursive tree: vertex i attaches to a uniform earlier vertex.
Graph random_tree(std::size_t n, Rng& rng);
/// Erdos-Renyi G(n, p).
Graph random_graph(std::size_t n, double p, Rng& rng);

DistanceMatrix all_pairs_distances(const Graph& g);

/// Label threshold on true dissimilarities; +1 means "similar".
struct LabelConvention {
  double tau = 1.5;
};

/// +1 iff d*(u,v) < tau, -1 iff d*(u,v) > tau. Disconnected couples are
/// dissimilar. Throws DegenerateThresholdError when d* == tau.
int true_label(const DistanceMatrix& dm, Couple c, double tau = 1.5);
/// true_label for every couple, in couple_index order.
std::vector<int> true_labels(const DistanceMatrix& dm, double tau = 1.5);

/// Edge-list text: one "u v" per line, 0-based, '#' comments. A leading
/// "# vertices N" comment fixes the vertex count (isolated vertices);
/// otherwise it is 1 + the largest id.
Graph read_edge_list(std::istream& in);
void write_edge_list(std::ostream& out, const Graph& g);

}  // namespace gembed
