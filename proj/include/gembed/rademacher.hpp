#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "gembed/bounds.hpp"
#include "gembed/learner.hpp"

namespace gembed {

enum class SupMethod { gradient_ascent, exhaustive };

struct RcEstimate {
  double mean = 0.0;
  double std_err = 0.0;
  std::size_t trials = 0;
  std::size_t dropped = 0;
  SupMethod sup_method = SupMethod::gradient_ascent;
  /// Inner sups are under-approximated by ascent, so the mean is a lower
  /// estimate of the true complexity. False only for exact enumeration.
  bool lower_estimate = true;
  std::vector<double> sup_values;
  /// Trial index of each entry of sup_values (dropped trials are skipped).
  std::vector<std::size_t> trial_ids;
};

struct RcOptions {
  std::size_t trials = 200;
  OptimizerOptions optimizer{};
  std::uint64_t seed = 1;
  /// Localization radius r: restarts whose exact excess risk exceeds r are
  /// discarded. Infinity disables localization.
  double local_radius = std::numeric_limits<double>::infinity();
  std::size_t threads = 1;
};

/// Monte-Carlo Rademacher complexity of the clipped hinge loss class.
/// Trial t draws data and signs from stream_seed(seed, t).
RcEstimate rc_monte_carlo(const DistributionSpec& dist, const SpaceSpec& space, const GFunc& g, const LossSpec& loss,
                          std::size_t S, const RcOptions& opts);

/// Sup over one trial: (1/S) sum sigma_s l(y_s, h(x_s)) maximized by
/// multi-restart ascent.
double rc_trial_sup(const Dataset& data, const std::vector<int>& signs, const SpaceSpec& space, const GFunc& g,
                    const LossSpec& loss, const OptimizerOptions& opt);

/// Class of 1-D Euclidean embeddings with every coordinate on `grid`.
struct GridClass {
  std::vector<double> grid;

  double radius() const;
  /// grid.size()^n; throws SizeError above 1e5.
  std::size_t embedding_count(std::size_t n) const;
};

/// Exact sup over the grid class by enumeration.
double grid_sup_exhaustive(const Dataset& data, const std::vector<int>& signs, const GridClass& cls, const GFunc& g,
                           const LossSpec& loss);
/// Ascent estimate over the grid class: continuous ascent in [-R, R], snap
/// to the grid, then coordinate-wise improvement on the grid.
double grid_sup_ascent(const Dataset& data, const std::vector<int>& signs, const GridClass& cls, const GFunc& g,
                       const LossSpec& loss, const OptimizerOptions& opt);

/// Ground-truth complexity of a grid class on tiny instances (|V| <= 3,
/// S <= 4): exact over signs; exact over data when |E2|^S <= 1e4,
/// otherwise `mc_draws` sampled datasets.
RcEstimate rc_brute_force(const DistributionSpec& dist, const GridClass& cls, const GFunc& g, const LossSpec& loss,
                          std::size_t S, std::uint64_t seed = 1, std::size_t mc_draws = 2000);

struct LocalRcRow {
  double r = 0.0;
  std::size_t argmin_m = 0;
  double bound = 0.0;
};

/// min over m of zeta_m(r)/sqrt(S) for each r. r = +inf keeps only m = 0,
/// which gives the global value 2 L Lambda sqrt(2/S).
std::vector<LocalRcRow> local_rc_bound_table(const BoundInputs& in, const CoupleMeasure& mu,
                                             const std::vector<double>& r_grid, double S);

}  // namespace gembed
