#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "gembed/bounds.hpp"
#include "gembed/graph.hpp"
#include "gembed/learner.hpp"

namespace gembed {

/// Excess-risk sweep: train CERM on fresh datasets and compare the measured
/// excess risk with bound_local.
struct ExperimentConfig {
  Graph graph;
  double xi = 1.0;
  std::vector<std::size_t> sample_sizes{100, 1000, 10000};
  std::size_t trials = 100;
  double delta = 0.05;
  OptimizerOptions optimizer{};
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  /// Unset: hyperbolic plane with radius and g taken from calibrate_sarkar.
  std::optional<SpaceSpec> space;
  std::optional<GFunc> g;
  /// Exponent of g when calibrating.
  double q = 1.0;
  LambdaMode lambda_mode = LambdaMode::worst_metric;

  /// Desk-scale limits |V| <= 20, S <= 1e4, trials <= 200; throws ValidationError.
  void validate() const;
};

struct ExperimentTrial {
  std::size_t S = 0;
  std::size_t trial = 0;
  double empirical_risk = 0.0;
  double excess = 0.0;
  double eps_hat = 0.0;
};

struct ExperimentRow {
  std::size_t S = 0;
  double excess_mean = 0.0;
  /// Empirical (1 - delta)-quantile of the excess risk.
  double excess_quantile = 0.0;
  double max_eps_hat = 0.0;
  double bound = 0.0;
  bool holds = false;
};

struct ExperimentReport {
  SpaceSpec space;
  GFunc g;
  /// Inputs of bound_local; erm_eps is overwritten per row.
  BoundInputs inputs;
  std::vector<ExperimentTrial> trials;
  std::vector<ExperimentRow> rows;
};

/// Index of the empirical (1 - delta)-quantile in a sorted sample of size T:
/// ceil((1 - delta) T) - 1.
std::size_t quantile_index(std::size_t T, double delta);

ExperimentReport experiment_excess_risk(const ExperimentConfig& cfg);

}  // namespace gembed
