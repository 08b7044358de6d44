#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "gembed/distribution.hpp"
#include "gembed/geometry.hpp"

namespace gembed {

/// Hinge loss rho(t) = max(1 - t, 0) with clipping bound M.
struct LossSpec {
  double clip_M = 1.0;
};

/// Median of {-M, t, M}.
double clip(double t, double M);
double hinge(int y, double t);
/// max(1 - y * clip(t, M), 0).
double clipped_hinge(int y, double t, double M);

struct Sample {
  Couple couple;
  int label = 1;
};

struct Dataset {
  std::size_t vertex_count = 0;
  std::vector<Sample> items;
  std::uint64_t seed = 0;

  std::size_t size() const { return items.size(); }
};

/// S i.i.d. draws: couple ~ mu, then +1 with probability eta(couple).
Dataset sample_dataset(const DistributionSpec& dist, std::size_t S, std::uint64_t seed);

/// CSV "u,v,label" with header.
void write_dataset_csv(std::ostream& out, const Dataset& data);
Dataset read_dataset_csv(std::istream& in, std::size_t vertex_count);

struct Risks {
  double expected = 0.0;
  double clipped_expected = 0.0;
  double bayes = 0.0;
  double excess = 0.0;
};

/// Exact risks by summing over all couples.
Risks risks_exact(const Embedding& emb, const GFunc& g, const DistributionSpec& dist, const LossSpec& loss = {});
/// Same, from precomputed couple distances.
Risks risks_exact(const std::vector<double>& couple_dist, const GFunc& g, const DistributionSpec& dist,
                  const LossSpec& loss = {});

/// (1/S) sum of losses. Throws ValidationError on an empty dataset.
double empirical_risk(const Embedding& emb, const GFunc& g, const Dataset& data, const LossSpec& loss, bool clipped);

/// Weighted clipped-hinge objective  sum_c  w_pos * l(+1, h_c) + w_neg * l(-1, h_c)
/// over the couples that carry weight. Negative weights turn minimization
/// into maximization of that term.
struct CoupleTerm {
  Couple couple;
  double w_pos = 0.0;
  double w_neg = 0.0;
};

struct LossObjective {
  std::size_t vertex_count = 0;
  std::vector<CoupleTerm> terms;
  double clip_M = 1.0;

  /// Training objective: weights are label counts / S.
  static LossObjective empirical(const Dataset& data, double clip_M);
  /// Rademacher objective: minimizing it maximizes (1/S) sum sigma_s l(y_s, h(x_s)).
  static LossObjective rademacher(const Dataset& data, const std::vector<int>& signs, double clip_M);

  double value(const Embedding& emb, const GFunc& g) const;
  /// Exact subgradient (0 at kinks and outside the clip) in ambient
  /// coordinates, one row per entity.
  std::vector<Eigen::VectorXd> gradient(const Embedding& emb, const GFunc& g) const;
  /// Gradient of the plateau-free surrogate: the clip is dropped on the side
  /// where it would stall progress (see optimizer notes in learner.cpp).
  std::vector<Eigen::VectorXd> surrogate_gradient(const Embedding& emb, const GFunc& g) const;
};

struct OptimizerOptions {
  std::size_t restarts = 8;
  std::size_t steps = 300;
  /// Initial step eta_0; 0 means 0.1 * R.
  double step_size = 0.0;
  std::size_t polish_steps = 200;
  std::uint64_t seed = 1;
  /// Initialization radius as a fraction of R.
  double init_fraction = 0.5;
  /// cerm_train only, hyperbolic spaces only: one extra start from the
  /// Sarkar layout of a spanning tree of the couples labeled mostly +1.
  bool tree_start = true;
};

struct MinimizeResult {
  Embedding best;
  double best_value = 0.0;
  std::size_t best_restart = 0;
  std::vector<Embedding> restart_embeddings;
  std::vector<double> restart_values;
};

/// Multi-restart projected Riemannian descent on a LossObjective: surrogate
/// phase, then exact-subgradient phase; each restart keeps its best iterate.
/// Restart i uses stream_seed(opts.seed, i). Ties go to the lower index.
/// `extra_starts` run after the random restarts, with the same schedule.
MinimizeResult minimize_objective(const SpaceSpec& space, const GFunc& g, const LossObjective& obj,
                                  const OptimizerOptions& opts, const std::vector<Embedding>& extra_starts = {});

/// Start for tree-like data: spanning tree of the couples whose +1 count
/// exceeds their -1 count (components joined at vertex 0), laid out by the
/// Sarkar construction in the first two hyperbolic coordinates. Edge length
/// is the largest that keeps edge scores >= 1 and the layout inside R.
/// Returns an empty optional outside hyperbolic spaces.
std::optional<Embedding> majority_tree_start(const SpaceSpec& space, const GFunc& g, const Dataset& data);

/// Continue descent from `start` with exact subgradients and small steps.
Embedding polish(const Embedding& start, const GFunc& g, const LossObjective& obj, std::size_t steps, double step0);

struct TrainResult {
  Embedding embedding;
  /// Clipped empirical risk of `embedding`.
  double empirical_risk = 0.0;
  /// empirical_risk minus the best value seen over all restarts and a polish.
  double eps_hat = 0.0;
  std::vector<double> restart_values;
};

/// Clipped ERM on `data`.
TrainResult cerm_train(const SpaceSpec& space, const GFunc& g, const Dataset& data, const OptimizerOptions& opts,
                       const LossSpec& loss = {});

}  // namespace gembed
