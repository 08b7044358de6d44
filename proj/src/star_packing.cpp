#include "gembed/star_packing.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "gembed/errors.hpp"

namespace gembed {

namespace {

constexpr long kNeg = std::numeric_limits<long>::min() / 4;

// Best value when v is a center taking `t` children as leaves.
// gains[i] = F[c_i] - best[c_i] <= 0
long center_value(long base, std::vector<long>& gains, std::size_t t) {
  if (gains.size() < t) return kNeg;
  std::partial_sort(gains.begin(), gains.begin() + static_cast<long>(t), gains.end(), std::greater<>());
  long v = base + 1;
  for (std::size_t i = 0; i < t; ++i) v += gains[i];
  return v;
}

std::size_t forest_packing(const Graph& g, std::size_t k) {
  const std::size_t n = g.vertex_count();
  // free_[v]: v unused; used_[v]: v in some star inside its subtree;
  // up_[v]: v is a center whose star includes its parent as a leaf.
  std::vector<long> free_(n, 0), used_(n, kNeg), up_(n, kNeg);
  std::vector<Vertex> parent(n, std::numeric_limits<Vertex>::max());
  std::vector<char> seen(n, 0);
  std::vector<Vertex> order;
  order.reserve(n);
  std::size_t total = 0;

  for (Vertex root = 0; root < n; ++root) {
    if (seen[root]) continue;
    order.clear();
    std::vector<Vertex> stack{root};
    seen[root] = 1;
    while (!stack.empty()) {
      const Vertex v = stack.back();
      stack.pop_back();
      order.push_back(v);
      for (Vertex w : g.neighbors(v)) {
        if (!seen[w]) {
          seen[w] = 1;
          parent[w] = v;
          stack.push_back(w);
        }
      }
    }
    std::vector<long> gains;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const Vertex v = *it;
      long base = 0;
      gains.clear();
      long via_child = kNeg;
      for (Vertex c : g.neighbors(v)) {
        if (c == parent[v]) continue;
        const long best = std::max(free_[c], used_[c]);
        base += best;
        gains.push_back(free_[c] - best);
        if (up_[c] > kNeg) via_child = std::max(via_child, up_[c] - best);
      }
      free_[v] = base;
      long used = center_value(base, gains, k);
      if (via_child > kNeg) used = std::max(used, base + via_child);
      used_[v] = used;
      up_[v] = center_value(base, gains, k - 1);
    }
    total += static_cast<std::size_t>(std::max(free_[root], used_[root]));
  }
  return total;
}

class BranchAndBound {
 public:
  BranchAndBound(const Graph& g, std::size_t k) : n_(g.vertex_count()), k_(k), adj_(n_, 0) {
    for (Vertex v = 0; v < n_; ++v)
      for (Vertex w : g.neighbors(v)) adj_[v] |= std::uint64_t{1} << w;
  }

  std::size_t solve() {
    const std::uint64_t all = n_ == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n_) - 1);
    search(0, all, 0);
    return best_;
  }

 private:
  void search(std::size_t v, std::uint64_t free, std::size_t count) {
    best_ = std::max(best_, count);
    if (v >= n_) return;
    // every remaining star consumes k+1 free vertices, its center >= v
    const std::uint64_t upper_mask = free & ~((std::uint64_t{1} << v) - 1);
    if (count + static_cast<std::size_t>(std::popcount(free)) / (k_ + 1) <= best_) return;
    if (upper_mask == 0) return;
    const std::uint64_t bit = std::uint64_t{1} << v;
    if (free & bit) {
      const std::uint64_t cand = adj_[v] & free;
      if (static_cast<std::size_t>(std::popcount(cand)) >= k_) {
        std::vector<Vertex> nb;
        for (std::uint64_t m = cand; m; m &= m - 1) nb.push_back(static_cast<Vertex>(std::countr_zero(m)));
        choose(v, nb, 0, 0, free & ~bit, count);
      }
    }
    search(v + 1, free, count);
  }

  void choose(std::size_t v, const std::vector<Vertex>& nb, std::size_t from, std::size_t taken,
              std::uint64_t free, std::size_t count) {
    if (taken == k_) {
      search(v + 1, free, count + 1);
      return;
    }
    for (std::size_t i = from; i + (k_ - taken) <= nb.size(); ++i) {
      choose(v, nb, i + 1, taken + 1, free & ~(std::uint64_t{1} << nb[i]), count);
    }
  }

  std::size_t n_;
  std::size_t k_;
  std::vector<std::uint64_t> adj_;
  std::size_t best_ = 0;
};

std::size_t greedy_packing(const Graph& g, std::size_t k) {
  const std::size_t n = g.vertex_count();
  std::vector<char> used(n, 0);
  auto free_degree = [&](Vertex v) {
    std::size_t d = 0;
    for (Vertex w : g.neighbors(v)) d += used[w] ? 0 : 1;
    return d;
  };
  std::size_t count = 0;
  while (true) {
    Vertex center = 0;
    std::size_t center_deg = std::numeric_limits<std::size_t>::max();
    for (Vertex v = 0; v < n; ++v) {
      if (used[v]) continue;
      const std::size_t d = free_degree(v);
      if (d >= k && d < center_deg) {
        center = v;
        center_deg = d;
      }
    }
    if (center_deg == std::numeric_limits<std::size_t>::max()) break;
    std::vector<Vertex> leaves;
    for (Vertex w : g.neighbors(center))
      if (!used[w]) leaves.push_back(w);
    std::sort(leaves.begin(), leaves.end(), [&](Vertex a, Vertex b) { return free_degree(a) < free_degree(b); });
    used[center] = 1;
    for (std::size_t i = 0; i < k; ++i) used[leaves[i]] = 1;
    ++count;
  }
  return count;
}

}  // namespace

StarPacking max_disjoint_star_packing(const Graph& g, std::size_t k) {
  if (k == 0) throw ValidationError("star size k must be >= 1");
  if (g.is_forest()) return {forest_packing(g, k), true};
  if (g.vertex_count() <= kStarPackingExactLimit) return {BranchAndBound(g, k).solve(), true};
  return {greedy_packing(g, k), false};
}

std::size_t euclidean_plane_vmin_lower_bound(const Graph& g) {
  return max_disjoint_star_packing(g, kPlanePackingNumber + 1).count;
}

}  // namespace gembed
