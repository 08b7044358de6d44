#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gembed/graph.hpp"
#include "gembed/learner.hpp"

namespace oracle {

/// Largest number of vertex-disjoint k-stars, by exhaustive search.
std::size_t star_packing(const gembed::Graph& g, std::size_t k);

/// Side over diameter of the regular n-gon inscribed in the hyperbolic
/// circle of radius R, in 50-digit arithmetic.
double polygon_ratio(std::size_t n, double R);

/// acosh(-<a,b>_L) in 50-digit arithmetic.
double hyperbolic_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Max eigenvalue of sum_c mu(c) E_c^2 with every |V| x |V| matrix E_c
/// written out entry by entry and squared by matrix product.
double edge_var_norm(bool hyperbolic, std::size_t nvertices, const std::vector<double>& weights);

/// sup over all grid embeddings of (1/S) sum_s sigma_s l(y_s, h(x_s)) for
/// 1-D grid coordinates, the clipped hinge evaluated from its definition.
double grid_sup(const gembed::Dataset& data, const std::vector<int>& signs, const std::vector<double>& grid,
                double q, double tau, double clip_M);

/// +1 for adjacent couples, -1 otherwise, in couple_index order.
std::vector<int> adjacency_labels(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges);

}  // namespace oracle
