#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "gembed/graph.hpp"

namespace gembed {

/// Probability measure over the couples of an n-vertex set, indexed by
/// couple_index.
class CoupleMeasure {
 public:
  CoupleMeasure() = default;
  /// Throws ValidationError unless weights are non-negative and sum to 1.
  explicit CoupleMeasure(std::vector<double> weights);

  static CoupleMeasure uniform(std::size_t n_couples);
  /// Uniform on the given couple indices.
  static CoupleMeasure uniform_on(const std::vector<std::size_t>& support, std::size_t n_couples);
  /// Dirichlet(1, ..., 1) draw.
  static CoupleMeasure random(std::size_t n_couples, Rng& rng);

  std::size_t size() const { return weights_.size(); }
  double weight(std::size_t i) const { return weights_[i]; }
  const std::vector<double>& weights() const { return weights_; }
  /// Sum of the k smallest weights, i.e. the least measure of a k-subset.
  double smallest_sum(std::size_t k) const;
  /// Index drawn with probability weight(i), from one uniform variate.
  std::size_t draw(double u) const;

 private:
  std::vector<double> weights_;
  std::vector<double> ascending_prefix_;  // ascending_prefix_[k] = P(k)
  std::vector<double> cdf_;
};

/// P_mu(k). Throws ValidationError for k > |E2|.
double sum_probability(const CoupleMeasure& mu, std::size_t k);

/// Couple marginal plus posterior eta(x) = P(y = +1 | x).
struct DistributionSpec {
  std::size_t vertex_count = 0;
  CoupleMeasure mu;
  std::vector<double> eta;
  std::optional<double> margin_xi;

  /// eta = (1 + xi * y*) / 2 for the given true labels.
  static DistributionSpec with_margin(std::size_t vertex_count, CoupleMeasure mu, const std::vector<int>& true_labels,
                                      double xi);
  void validate() const;
};

}  // namespace gembed
