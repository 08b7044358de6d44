#include "gembed/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gembed/errors.hpp"

namespace gembed {

CoupleMeasure::CoupleMeasure(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw ValidationError("couple measure needs at least one couple");
  // Kahan sum: a plain sum of 2e6 uniform weights drifts past the tolerance
  double total = 0.0, comp = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("couple weights must be finite and non-negative");
    const double y = w - comp;
    const double t = total + y;
    comp = (t - total) - y;
    total = t;
  }
  if (std::fabs(total - 1.0) > 1e-12) throw ValidationError("couple weights must sum to 1");
  std::vector<double> sorted = weights_;
  std::sort(sorted.begin(), sorted.end());
  ascending_prefix_.assign(sorted.size() + 1, 0.0);
  for (std::size_t k = 0; k < sorted.size(); ++k) ascending_prefix_[k + 1] = ascending_prefix_[k] + sorted[k];
  // the full set has measure exactly 1
  ascending_prefix_.back() = 1.0;
  cdf_.resize(weights_.size());
  std::partial_sum(weights_.begin(), weights_.end(), cdf_.begin());
}

CoupleMeasure CoupleMeasure::uniform(std::size_t n_couples) {
  if (n_couples == 0) throw ValidationError("couple measure needs at least one couple");
  return CoupleMeasure(std::vector<double>(n_couples, 1.0 / static_cast<double>(n_couples)));
}

CoupleMeasure CoupleMeasure::uniform_on(const std::vector<std::size_t>& support, std::size_t n_couples) {
  if (support.empty()) throw ValidationError("support must be non-empty");
  std::vector<double> w(n_couples, 0.0);
  for (std::size_t i : support) {
    if (i >= n_couples) throw ValidationError("support index out of range");
    w[i] = 1.0;
  }
  const double mass = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= mass;
  return CoupleMeasure(std::move(w));
}

CoupleMeasure CoupleMeasure::random(std::size_t n_couples, Rng& rng) {
  std::vector<double> w(n_couples);
  double total = 0.0;
  for (double& x : w) {
    double u = rng.uniform();
    while (u <= 0.0) u = rng.uniform();
    x = -std::log(u);
    total += x;
  }
  for (double& x : w) x /= total;
  return CoupleMeasure(std::move(w));
}

double CoupleMeasure::smallest_sum(std::size_t k) const {
  if (k > weights_.size()) throw ValidationError("k exceeds the number of couples");
  return ascending_prefix_[k];
}

std::size_t CoupleMeasure::draw(double u) const {
  const double target = u * cdf_.back();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), target);
  std::size_t i = static_cast<std::size_t>(it - cdf_.begin());
  if (i >= cdf_.size()) i = cdf_.size() - 1;
  // never return a zero-weight couple
  while (weights_[i] == 0.0 && i > 0) --i;
  return i;
}

double sum_probability(const CoupleMeasure& mu, std::size_t k) { return mu.smallest_sum(k); }

DistributionSpec DistributionSpec::with_margin(std::size_t vertex_count, CoupleMeasure mu,
                                               const std::vector<int>& true_labels, double xi) {
  if (!(xi >= 0.0 && xi <= 1.0)) throw ValidationError("margin xi must lie in [0, 1]");
  DistributionSpec d;
  d.vertex_count = vertex_count;
  d.mu = std::move(mu);
  d.eta.resize(true_labels.size());
  for (std::size_t i = 0; i < true_labels.size(); ++i) d.eta[i] = 0.5 * (1.0 + xi * true_labels[i]);
  d.margin_xi = xi;
  d.validate();
  return d;
}

void DistributionSpec::validate() const {
  const std::size_t m = couple_count(vertex_count);
  if (vertex_count < 2) throw ValidationError("distribution needs at least two entities");
  if (mu.size() != m) throw ValidationError("couple measure size does not match the entity count");
  if (eta.size() != m) throw ValidationError("posterior size does not match the entity count");
  for (double e : eta)
    if (!(e >= 0.0 && e <= 1.0)) throw ValidationError("posterior values must lie in [0, 1]");
  if (margin_xi) {
    for (double e : eta)
      if (std::fabs(std::fabs(2.0 * e - 1.0) - *margin_xi) > 1e-12)
        throw ValidationError("posterior is inconsistent with the margin xi");
  }
}

}  // namespace gembed
