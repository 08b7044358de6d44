#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "gembed/errors.hpp"
#include "gembed/graph.hpp"
#include "gembed/rademacher.hpp"

using namespace gembed;

namespace {

DistributionSpec tree_dist(std::size_t n, double xi) {
  const Graph t = path_graph(n);
  return DistributionSpec::with_margin(n, CoupleMeasure::uniform(couple_count(n)), true_labels(all_pairs_distances(t)),
                                       xi);
}

OptimizerOptions quick() {
  OptimizerOptions o;
  o.restarts = 4;
  o.steps = 80;
  return o;
}

}  // namespace

TEST(RcBruteForce, SingleSampleMatchesEnumeration) {
  // S = 1: E_sigma sup sigma l = (sup l - inf l) / 2, averaged over (x, y)
  const GridClass cls{{-1.0, 0.0, 1.0}};
  const GFunc g{1.0, 1.0};
  for (double xi : {0.2, 1.0}) {
    const auto dist = tree_dist(2, xi);
    const auto rc = rc_brute_force(dist, cls, g, LossSpec{}, 1);
    EXPECT_FALSE(rc.lower_estimate);
    EXPECT_EQ(rc.sup_method, SupMethod::exhaustive);
    // one couple; grid distances 0, 1, 2 give scores 1, 0, -1
    double expect = 0.0;
    for (int y : {1, -1}) {
      double hi = -1e9, lo = 1e9;
      for (double d : {0.0, 1.0, 2.0}) {
        const double l = std::max(1.0 - y * std::clamp(1.0 - d, -1.0, 1.0), 0.0);
        hi = std::max(hi, l);
        lo = std::min(lo, l);
      }
      const double py = y == 1 ? dist.eta[0] : 1.0 - dist.eta[0];
      expect += py * 0.5 * (hi - lo);
    }
    EXPECT_NEAR(rc.mean, expect, 1e-12);
  }
}

TEST(RcBruteForce, ZeroWidthGridIsSingleton) {
  const auto dist = tree_dist(3, 0.5);
  const auto rc = rc_brute_force(dist, GridClass{{0.0}}, GFunc{1.0, 0.0}, LossSpec{}, 3);
  EXPECT_NEAR(rc.mean, 0.0, 1e-15);
  EXPECT_THROW(rc_brute_force(tree_dist(4, 0.5), GridClass{{0.0}}, GFunc{1.0, 0.0}, LossSpec{}, 2), SizeError);
  EXPECT_THROW(rc_brute_force(dist, GridClass{{0.0}}, GFunc{1.0, 0.0}, LossSpec{}, 5), SizeError);
}

TEST(RcBruteForce, AscentMatchesExhaustiveOnGrid) {
  const GridClass cls{{-1.0, -0.5, 0.0, 0.5, 1.0}};
  const GFunc g{1.0, 0.75};
  const auto dist = tree_dist(3, 0.4);
  Rng rng(17);
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t S = 1 + rng.index(4);
    const auto data = sample_dataset(dist, S, rng.next());
    std::vector<int> signs(S);
    for (int& s : signs) s = rng.sign();
    const double exact = grid_sup_exhaustive(data, signs, cls, g, LossSpec{});
    const double asc = grid_sup_ascent(data, signs, cls, g, LossSpec{}, quick());
    EXPECT_LE(asc, exact + 1e-12);
    EXPECT_GE(asc, exact - 0.02 * std::fabs(exact) - 1e-12) << "rep " << rep;
  }
}

TEST(RcBruteForce, TwoVertexGridExpectationMatchesAscentExpectation) {
  const GridClass cls{{-1.0, 0.0, 1.0}};
  const GFunc g{1.0, 1.0};
  const auto dist = tree_dist(2, 0.5);
  for (std::size_t S : {1u, 2u, 3u}) {
    const auto rc = rc_brute_force(dist, cls, g, LossSpec{}, S);
    // the same expectation with ascent as the inner sup
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t code = 0; code < (1u << S); ++code) {
      std::vector<int> signs(S);
      for (std::size_t s = 0; s < S; ++s) signs[s] = (code >> s) & 1 ? 1 : -1;
      for (std::size_t lab = 0; lab < (1u << S); ++lab) {
        Dataset data;
        data.vertex_count = 2;
        double p = 1.0;
        for (std::size_t s = 0; s < S; ++s) {
          const int y = (lab >> s) & 1 ? 1 : -1;
          data.items.push_back({Couple(0, 1), y});
          p *= y == 1 ? dist.eta[0] : 1.0 - dist.eta[0];
        }
        total += p * grid_sup_ascent(data, signs, cls, g, LossSpec{}, quick());
      }
      ++count;
    }
    EXPECT_NEAR(total / static_cast<double>(count), rc.mean, 1e-2) << "S=" << S;
  }
}

TEST(RcMonteCarlo, SingletonClassNearZero) {
  const auto dist = tree_dist(4, 0.5);
  RcOptions o;
  o.trials = 60;
  o.optimizer = quick();
  const double S = 16.0;
  const auto est = rc_monte_carlo(dist, SpaceSpec{SpaceKind::euclidean, 2, 1e-7}, GFunc{1.0, 0.0}, LossSpec{}, 16, o);
  EXPECT_LE(est.mean, 2.0 * std::sqrt(1.0 / S) * 1.1);
  EXPECT_LE(std::fabs(est.mean), 3.0 * est.std_err + 1e-9);
  EXPECT_EQ(est.trial_ids.size(), 60u);
  EXPECT_TRUE(est.lower_estimate);
}

TEST(RcMonteCarlo, BelowGlobalBound) {
  for (auto kind : {SpaceKind::euclidean, SpaceKind::hyperbolic})
    for (std::size_t n : {4u, 8u})
      for (std::size_t S : {8u, 32u}) {
        const SpaceSpec s{kind, 2, 1.0};
        const GFunc g{1.0, 1.0};
        RcOptions o;
        o.trials = 30;
        o.optimizer = quick();
        const auto est = rc_monte_carlo(tree_dist(n, 0.5), s, g, LossSpec{}, S, o);
        const double lam = std::sqrt(lambda_sq(LambdaMode::worst_metric, s, g, n));
        const double bound = 2.0 * lam * std::sqrt(2.0 / static_cast<double>(S));
        EXPECT_LE(est.mean - 3.0 * est.std_err, bound);
        EXPECT_GE(est.std_err, 0.0);
      }
}

TEST(RcMonteCarlo, LargerBallDoesNotShrinkEstimate) {
  RcOptions o;
  o.trials = 40;
  o.optimizer = quick();
  const auto dist = tree_dist(5, 0.5);
  const auto small = rc_monte_carlo(dist, SpaceSpec{SpaceKind::euclidean, 2, 0.5}, GFunc{1.0, 0.5}, LossSpec{}, 16, o);
  const auto big = rc_monte_carlo(dist, SpaceSpec{SpaceKind::euclidean, 2, 1.0}, GFunc{1.0, 0.5}, LossSpec{}, 16, o);
  EXPECT_GE(big.mean + 3.0 * big.std_err, small.mean);
}

TEST(RcMonteCarlo, DeterministicAcrossThreadCounts) {
  RcOptions o;
  o.trials = 30;
  o.optimizer = quick();
  const auto dist = tree_dist(4, 0.5);
  const SpaceSpec s{SpaceKind::hyperbolic, 2, 1.5};
  const auto a = rc_monte_carlo(dist, s, GFunc{1.0, 1.0}, LossSpec{}, 8, o);
  o.threads = 3;
  const auto b = rc_monte_carlo(dist, s, GFunc{1.0, 1.0}, LossSpec{}, 8, o);
  EXPECT_EQ(a.sup_values, b.sup_values);
}

TEST(RcMonteCarlo, LocalizationOnlyRemovesRestarts) {
  RcOptions o;
  o.trials = 30;
  o.optimizer = quick();
  const auto dist = tree_dist(4, 1.0);
  const SpaceSpec s{SpaceKind::euclidean, 2, 1.0};
  const auto all = rc_monte_carlo(dist, s, GFunc{1.0, 1.0}, LossSpec{}, 8, o);
  o.local_radius = 10.0;  // excess never exceeds 2
  const auto wide = rc_monte_carlo(dist, s, GFunc{1.0, 1.0}, LossSpec{}, 8, o);
  EXPECT_EQ(all.sup_values, wide.sup_values);
  o.local_radius = 0.6;
  try {
    const auto narrow = rc_monte_carlo(dist, s, GFunc{1.0, 1.0}, LossSpec{}, 8, o);
    for (std::size_t i = 0; i < narrow.trial_ids.size(); ++i)
      EXPECT_LE(narrow.sup_values[i], all.sup_values[narrow.trial_ids[i]] + 1e-15);
  } catch (const OptimizerError&) {
    // more than 10% of trials kept no restart inside the radius
  }
  o.trials = 29;
  EXPECT_THROW(rc_monte_carlo(dist, s, GFunc{1.0, 1.0}, LossSpec{}, 8, o), ValidationError);
}

TEST(LocalRcTable, Examples) {
  BoundInputs in = hinge_params(INFINITY, 3.0);
  in.lambda_sq = 80.0;
  const double S = 64.0;
  const auto uni = CoupleMeasure::uniform(10);
  const std::vector<double> grid{0.0, 1e-3, 0.01, 0.1, 1.0, 10.0, INFINITY};
  const auto tab = local_rc_bound_table(in, uni, grid, S);
  ASSERT_EQ(tab.size(), grid.size());
  EXPECT_NEAR(tab.back().bound, 2.0 * std::sqrt(80.0) * std::sqrt(2.0 / S), 1e-12);
  for (std::size_t i = 0; i < tab.size(); ++i) {
    EXPECT_TRUE(tab[i].argmin_m == 0 || tab[i].argmin_m == 10) << i;
    if (i > 0) EXPECT_GE(tab[i].bound, tab[i - 1].bound);
  }
  EXPECT_EQ(tab.front().argmin_m, 10u);
  EXPECT_THROW(local_rc_bound_table(in, uni, {}, S), ValidationError);
}
