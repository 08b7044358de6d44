#include "gembed/graph.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>

#include "gembed/errors.hpp"

namespace gembed {

Couple::Couple(Vertex a, Vertex b) : u(std::min(a, b)), v(std::max(a, b)) {
  if (a == b) throw StructureError("couple needs two distinct vertices, got {" + std::to_string(a) + "," + std::to_string(b) + "}");
}

std::size_t couple_index(std::size_t n, Vertex a, Vertex b) {
  const std::size_t u = std::min(a, b);
  const std::size_t v = std::max(a, b);
  if (u == v || v >= n) throw ValidationError("invalid couple for couple_index");
  // couples before row u: sum_{i<u} (n-1-i)
  return u * (2 * n - u - 1) / 2 + (v - u - 1);
}

Couple couple_at(std::size_t n, std::size_t index) {
  if (index >= couple_count(n)) throw ValidationError("couple index out of range");
  std::size_t u = 0;
  std::size_t row = n - 1;
  while (index >= row) {
    index -= row;
    ++u;
    --row;
  }
  return {static_cast<Vertex>(u), static_cast<Vertex>(u + 1 + index)};
}

std::vector<Couple> all_couples(std::size_t n) {
  std::vector<Couple> out;
  out.reserve(couple_count(n));
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v) out.emplace_back(u, v);
  return out;
}

Graph::Graph(std::size_t vertex_count, std::span<const std::pair<Vertex, Vertex>> edges)
    : adjacency_(vertex_count) {
  if (vertex_count == 0) throw StructureError("graph needs at least one vertex");
  for (auto [a, b] : edges) {
    if (a >= vertex_count || b >= vertex_count)
      throw StructureError("edge endpoint out of range: " + std::to_string(a) + " " + std::to_string(b));
    if (a == b) throw StructureError("self-loop at vertex " + std::to_string(a));
    edges_.emplace_back(a, b);
  }
  std::sort(edges_.begin(), edges_.end(), [](const Couple& x, const Couple& y) {
    return std::pair(x.u, x.v) < std::pair(y.u, y.v);
  });
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  for (const auto& e : edges_) {
    adjacency_[e.u].push_back(e.v);
    adjacency_[e.v].push_back(e.u);
  }
  for (auto& nb : adjacency_) std::sort(nb.begin(), nb.end());
}

bool Graph::has_edge(Vertex a, Vertex b) const {
  if (a >= vertex_count() || b >= vertex_count()) return false;
  const auto& nb = adjacency_[a];
  return std::binary_search(nb.begin(), nb.end(), b);
}

bool Graph::is_connected() const {
  std::vector<char> seen(vertex_count(), 0);
  std::vector<Vertex> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const Vertex v = stack.back();
    stack.pop_back();
    for (Vertex w : adjacency_[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
    }
  }
  return count == vertex_count();
}

bool Graph::is_forest() const {
  // union-find cycle check
  std::vector<Vertex> parent(vertex_count());
  for (Vertex i = 0; i < parent.size(); ++i) parent[i] = i;
  auto find = [&](Vertex x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (const auto& e : edges_) {
    const Vertex a = find(e.u);
    const Vertex b = find(e.v);
    if (a == b) return false;
    parent[a] = b;
  }
  return true;
}

Graph complete_ary_tree(std::size_t arity, std::size_t levels) {
  if (arity == 0 || levels == 0) throw ValidationError("complete_ary_tree needs arity >= 1 and levels >= 1");
  constexpr std::size_t kMax = std::numeric_limits<Vertex>::max();
  std::size_t total = 0;
  std::size_t layer = 1;
  for (std::size_t l = 0; l < levels; ++l) {
    if (total > kMax - layer) throw SizeError("complete_ary_tree vertex count overflows the vertex id range");
    total += layer;
    if (l + 1 < levels) {
      if (layer > kMax / arity) throw SizeError("complete_ary_tree vertex count overflows the vertex id range");
      layer *= arity;
    }
  }
  std::vector<std::pair<Vertex, Vertex>> edges;
  edges.reserve(total - 1);
  for (std::size_t child = 1; child < total; ++child) {
    edges.emplace_back(static_cast<Vertex>((child - 1) / arity), static_cast<Vertex>(child));
  }
  return Graph(total, edges);
}

Graph path_graph(std::size_t n) {
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (Vertex i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return Graph(n, edges);
}

Graph star_graph(std::size_t leaves) {
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (Vertex i = 1; i <= leaves; ++i) edges.emplace_back(0, i);
  return Graph(leaves + 1, edges);
}

Graph random_tree(std::size_t n, Rng& rng) {
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (Vertex i = 1; i < n; ++i) edges.emplace_back(static_cast<Vertex>(rng.index(i)), i);
  return Graph(n, edges);
}

Graph random_graph(std::size_t n, double p, Rng& rng) {
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v)
      if (rng.bernoulli(p)) edges.emplace_back(u, v);
  return Graph(n, edges);
}

DistanceMatrix all_pairs_distances(const Graph& g) {
  const std::size_t n = g.vertex_count();
  DistanceMatrix dm(n);
  std::vector<Vertex> queue(n);
  for (Vertex s = 0; s < n; ++s) {
    std::size_t head = 0, tail = 0;
    queue[tail++] = s;
    dm.set(s, s, 0);
    while (head < tail) {
      const Vertex v = queue[head++];
      const Hops next = dm.at(s, v) + 1;
      for (Vertex w : g.neighbors(v)) {
        if (dm.at(s, w) == kNoPath) {
          dm.set(s, w, next);
          queue[tail++] = w;
        }
      }
    }
  }
  return dm;
}

int true_label(const DistanceMatrix& dm, Couple c, double tau) {
  const Hops h = dm.at(c.u, c.v);
  if (h == kNoPath) return -1;
  const double d = static_cast<double>(h);
  if (d == tau) {
    throw DegenerateThresholdError("couple {" + std::to_string(c.u) + "," + std::to_string(c.v) +
                                   "} has dissimilarity equal to the threshold");
  }
  return d < tau ? 1 : -1;
}

std::vector<int> true_labels(const DistanceMatrix& dm, double tau) {
  std::vector<int> labels;
  labels.reserve(couple_count(dm.size()));
  for (const auto& c : all_couples(dm.size())) labels.push_back(true_label(dm, c, tau));
  return labels;
}

Graph read_edge_list(std::istream& in) {
  std::vector<std::pair<Vertex, Vertex>> edges;
  std::size_t declared = 0;
  std::size_t max_id = 0;
  bool any = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      std::istringstream comment(line.substr(hash + 1));
      std::string key;
      std::size_t value = 0;
      if (comment >> key >> value && key == "vertices") declared = value;
      line.erase(hash);
    }
    std::istringstream ss(line);
    long long a = 0, b = 0;
    if (!(ss >> a)) continue;
    std::string rest;
    if (!(ss >> b) || (ss >> rest) || a < 0 || b < 0)
      throw ValidationError("malformed edge-list line " + std::to_string(line_no) + ": '" + line + "'");
    edges.emplace_back(static_cast<Vertex>(a), static_cast<Vertex>(b));
    max_id = std::max<std::size_t>(max_id, static_cast<std::size_t>(std::max(a, b)));
    any = true;
  }
  std::size_t n = any ? max_id + 1 : 0;
  if (declared > 0) {
    if (declared < n) throw ValidationError("edge list declares fewer vertices than it uses");
    n = declared;
  }
  if (n == 0) throw ValidationError("edge list is empty");
  return Graph(n, edges);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << "# vertices " << g.vertex_count() << "\n";
  for (const auto& e : g.edges()) out << e.u << " " << e.v << "\n";
}

}  // namespace gembed
