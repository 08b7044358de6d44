#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <numeric>

#include "gembed/bounds.hpp"
#include "gembed/errors.hpp"
#include "gembed/graph.hpp"
#include "gembed/rng.hpp"

using namespace gembed;
using Big = boost::multiprecision::cpp_bin_float_50;

namespace {

BoundInputs unit_inputs(double beta) {
  BoundInputs in;
  in.lip_L = 1.0;
  in.var_const = 1.0;
  in.var_exp = beta;
  in.lambda_sq = 1.0;
  return in;
}

CoupleMeasure random_measure(std::size_t n_couples, Rng& rng) {
  std::vector<double> w(n_couples);
  for (auto& x : w) x = rng.uniform() < 0.3 ? 0.0 : rng.uniform();
  w[rng.index(n_couples)] += 1.0;
  const double s = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& x : w) x /= s;
  return CoupleMeasure(w);
}

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

}  // namespace

TEST(LambdaSq, ClosedForms) {
  const SpaceSpec e{SpaceKind::euclidean, 2, 1.0};
  EXPECT_DOUBLE_EQ(lambda_sq(LambdaMode::worst_metric, e, GFunc{1.0, 0.0}, 3), 12.0);
  EXPECT_DOUBLE_EQ(lambda_sq(LambdaMode::worst_metric, e, GFunc{1.0, 2.0}, 3), 12.0);
  EXPECT_DOUBLE_EQ(lambda_sq(LambdaMode::worst_metric, e, GFunc{1.0, 1.0}, 3), 3.0);
  EXPECT_DOUBLE_EQ(lambda_sq(LambdaMode::euclidean_lemma, e, GFunc{1.0, 1.0}, 8), 4.0);
  const SpaceSpec h{SpaceKind::hyperbolic, 2, 1.0};
  EXPECT_THROW(lambda_sq(LambdaMode::euclidean_lemma, h, GFunc{1.0, 1.0}, 8), ModeMismatchError);
  EXPECT_THROW(lambda_sq(LambdaMode::worst_metric, e, GFunc{1.0, 3.0}, 3), ValidationError);
  EXPECT_EQ(lambda_mode_from_string("numeric_estimate"), LambdaMode::numeric_estimate);
  EXPECT_THROW(lambda_mode_from_string("max"), ValidationError);
}

TEST(LambdaSq, NumericEstimateBelowWorstMetric) {
  for (auto kind : {SpaceKind::euclidean, SpaceKind::hyperbolic})
    for (double tau : {0.0, 1.0, 3.0}) {
      const SpaceSpec s{kind, 2, 2.0};
      const GFunc g{1.0, tau};
      const double est = lambda_sq(LambdaMode::numeric_estimate, s, g, 6);
      EXPECT_GT(est, 0.0);
      EXPECT_LE(est, lambda_sq(LambdaMode::worst_metric, s, g, 6) * (1.0 + 1e-12));
    }
}

TEST(LambdaSq, HyperbolicRatioGrowsWithRadius) {
  double prev = 0.0;
  for (double R : {2.0, 5.0, 10.0}) {
    const SpaceSpec s{SpaceKind::hyperbolic, 2, R};
    const double ratio =
        lambda_sq(LambdaMode::numeric_estimate, s, GFunc{1.0, 0.0}, 12) / (66.0 * 4.0 * R * R);
    EXPECT_GT(ratio, prev) << "R=" << R;
    EXPECT_LE(ratio, 1.0);
    prev = ratio;
  }
}

TEST(Zeta, Examples) {
  BoundInputs in = unit_inputs(1.0);
  in.lip_L = 1.5;
  in.lambda_sq = 7.0;
  in.var_const = 3.0;
  const auto mu = CoupleMeasure::uniform(10);
  for (double r : {0.0, 0.3, 4.0}) {
    EXPECT_NEAR(zeta_m(r, 0, in, mu), 2.0 * std::sqrt(2.0) * 1.5 * std::sqrt(7.0), 1e-12);
    EXPECT_NEAR(zeta_m(r, 10, in, mu), 1.5 * std::sqrt(2.0 * 3.0 * r * 10.0), 1e-12);
  }
  in.lip_L = 0.0;
  EXPECT_EQ(zeta_m(2.0, 4, in, mu), 0.0);
  EXPECT_EQ(solve_rate_m(100.0, 4, in, mu), 0.0);
}

TEST(SolveRate, FixedPointResidualAndClosedForms) {
  Rng rng(3);
  const auto mu = random_measure(28, rng);
  for (double beta : {0.0, 0.25, 0.5, 1.0})
    for (double S : {1.0, 50.0, 1e4, 1e9})
      for (std::size_t m : {0u, 1u, 7u, 27u, 28u}) {
        BoundInputs in = unit_inputs(beta);
        in.lambda_sq = 40.0;
        in.var_const = 6.0;
        const double r = solve_rate_m(S, m, in, mu);
        EXPECT_LE(std::fabs(r - 30.0 * zeta_m(r, m, in, mu) / std::sqrt(S)), 1e-10 * r)
            << beta << " " << S << " " << m;
      }
  BoundInputs in = unit_inputs(1.0);
  in.lip_L = 0.7;
  in.lambda_sq = 20.0;
  in.var_const = 18.0;
  const auto uni = CoupleMeasure::uniform(15);
  for (double S : {10.0, 1e3, 1e6}) {
    EXPECT_NEAR(solve_rate_m(S, 0, in, uni), 60.0 * std::sqrt(2.0) * 0.7 * std::sqrt(20.0) / std::sqrt(S),
                1e-10 * solve_rate_m(S, 0, in, uni));
    const double full = 1800.0 * 0.49 * 18.0 * 15.0 / S;
    EXPECT_LE(rel(solve_rate_m(S, 15, in, uni), full), 1e-8);
    EXPECT_LE(rel(rate_full_closed(S, in, 15), 3.0 * full), 1e-12);
  }
  double prev = std::numeric_limits<double>::infinity();
  for (double S = 1.0; S < 1e8; S *= 3.7) {
    const double r = solve_rate_m(S, 6, in, uni);
    EXPECT_LT(r, prev);
    prev = r;
  }
}

TEST(RateFullClosed, Examples) {
  EXPECT_DOUBLE_EQ(rate_full_closed(1.0, unit_inputs(1.0), 1), 5400.0);
  BoundInputs in = unit_inputs(0.0);
  in.var_const = 2.0;
  EXPECT_NEAR(rate_full_closed(9.0, in, 5), 3.0 * std::sqrt(1800.0 * 5.0 * 2.0 / 9.0), 1e-9);
}

TEST(BoundGlobal, Examples) {
  BoundInputs in = unit_inputs(1.0);
  EXPECT_DOUBLE_EQ(bound_global(2.0, in).r0, 4.0);
  in.delta = 1.0 - 1e-15;
  EXPECT_LT(bound_global(2.0, in).minor, 1e-6);
  in.delta = 0.05;
  EXPECT_NEAR(bound_global(400.0, in).total, 0.5 * bound_global(100.0, in).total, 1e-12);
  in.erm_eps = 0.25;
  EXPECT_NEAR(bound_global(100.0, in).total - bound_global(100.0, unit_inputs(1.0)).total, 0.25, 1e-12);
}

TEST(BoundLocal, MinimumOverM) {
  BoundInputs in = hinge_params(INFINITY, 6.0);
  in.lambda_sq = 300.0;
  Rng rng(21);
  for (int rep = 0; rep < 5; ++rep) {
    const auto mu = random_measure(21, rng);
    for (double S : {1e2, 1e4, 1e6}) {
      const auto rep_ = bound_local(S, in, mu);
      EXPECT_LE(rep_.min_r_m, std::min(rep_.r0_solved, rep_.r_full_solved));
      EXPECT_EQ(rep_.m_values.size(), 22u);
    }
  }
  const auto uni = CoupleMeasure::uniform(21);
  for (double S : {1e1, 1e3, 1e5, 1e7}) {
    const auto r = bound_local(S, in, uni);
    EXPECT_DOUBLE_EQ(r.min_r_m, std::min(r.r0_solved, r.r_full_solved));
    EXPECT_TRUE(r.argmin_m == 0 || r.argmin_m == 21);
  }
}

TEST(BoundLocal, PointMassOnSubsetUsesSubsetSize) {
  // uniform on 5 of 21 couples
  std::vector<double> w(21, 0.0);
  for (std::size_t i : {2u, 5u, 9u, 14u, 20u}) w[i] = 0.2;
  const CoupleMeasure mu(w);
  BoundInputs in = hinge_params(INFINITY, 2.0);
  in.lambda_sq = 500.0;
  const double S = 1e7;
  const auto r = bound_local(S, in, mu);
  EXPECT_EQ(r.argmin_m, 5u);
  EXPECT_LE(rel(r.min_r_m, 1800.0 * in.var_const * 5.0 / S), 1e-8);
}

TEST(BoundLocal, TotalDecreasesToThreeEps) {
  BoundInputs in = hinge_params(1.0, 2.0);
  in.lambda_sq = 100.0;
  in.erm_eps = 0.01;
  const auto mu = CoupleMeasure::uniform(10);
  double prev = std::numeric_limits<double>::infinity();
  for (double S = 1e2; S <= 1e12; S *= 10.0) {
    const double t = bound_local(S, in, mu).total_local;
    EXPECT_LE(t, prev);
    EXPECT_GE(t, 0.03);
    prev = t;
  }
  EXPECT_LT(prev - 0.03, 1e-3);
}

TEST(BoundLocal, LogGridAboveTwentyThousand) {
  EXPECT_EQ(rate_m_grid(5).size(), 6u);
  const auto g = rate_m_grid(40000);
  EXPECT_EQ(g.front(), 0u);
  EXPECT_EQ(g.back(), 40000u);
  EXPECT_LT(g.size(), 20u);
}

TEST(CrossoverS, Examples) {
  BoundInputs in = unit_inputs(1.0);
  EXPECT_NEAR(crossover_S(in, 4).to_double(), 7200.0, 1e-9);
  EXPECT_TRUE(crossover_S(unit_inputs(0.0), 4).is_infinite());

  in.lambda_sq = 50.0;
  in.var_const = 3.0;
  const auto mu = CoupleMeasure::uniform(10);
  const double s_star = crossover_S(in, 10).to_double();
  const auto below = bound_local(s_star / 2.0, in, mu);
  const auto above = bound_local(s_star * 2.0, in, mu);
  EXPECT_LT(below.r0_solved, below.r_full_solved);
  EXPECT_GT(above.r0_solved, above.r_full_solved);
  EXPECT_LE(rel(solve_rate_m(s_star, 0, in, mu), solve_rate_m(s_star, 10, in, mu)), 1e-8);
}

TEST(HingeParams, Examples) {
  const auto a = hinge_params(INFINITY, 6.0);
  EXPECT_EQ(a.var_exp, 1.0);
  EXPECT_DOUBLE_EQ(a.var_const, 36.0);
  EXPECT_EQ(a.lip_L, 1.0);
  EXPECT_EQ(a.sup_B, 2.0);
  EXPECT_EQ(a.clip_M, 1.0);
  const auto b = hinge_params(0.0, 5.0);
  EXPECT_EQ(b.var_exp, 0.0);
  EXPECT_DOUBLE_EQ(b.var_const, 6.0);
  const auto c = hinge_params(1.0, 1.0);
  EXPECT_DOUBLE_EQ(c.var_exp, 0.5);
  EXPECT_DOUBLE_EQ(c.var_const, 6.0);
  EXPECT_THROW(hinge_params(1.0, 0.0), ValidationError);
}

TEST(NoiseExponent, Examples) {
  const Graph t = complete_ary_tree(2, 3);
  const auto labels = true_labels(all_pairs_distances(t));
  for (double xi : {0.25, 0.5, 1.0}) {
    const auto d = DistributionSpec::with_margin(7, CoupleMeasure::uniform(21), labels, xi);
    EXPECT_TRUE(noise_exponent_check(d, INFINITY, 3.0 / xi));
    EXPECT_FALSE(noise_exponent_check(d, INFINITY, 0.9 * 3.0 / xi));
    EXPECT_TRUE(noise_exponent_check(d, 0.0, 1.0));
  }
  const auto pure = DistributionSpec::with_margin(7, CoupleMeasure::uniform(21), labels, 0.0);
  EXPECT_FALSE(noise_exponent_check(pure, INFINITY, 100.0));
  // finite alpha: margin 0.5 everywhere, mass 1 below any t > 0.5
  const auto half = DistributionSpec::with_margin(7, CoupleMeasure::uniform(21), labels, 0.5);
  EXPECT_TRUE(noise_exponent_check(half, 1.0, 2.0));
  EXPECT_FALSE(noise_exponent_check(half, 1.0, 1.9));
}

TEST(EdgeMatrix, EnvelopesOverRandomMeasures) {
  Rng rng(101);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 5 + rng.index(26);
    const std::size_t e2 = couple_count(n);
    const auto mu = random_measure(e2, rng);
    const double ev = edge_matrix_var_norm(SpaceKind::euclidean, n, mu);
    const double hv = edge_matrix_var_norm(SpaceKind::hyperbolic, n, mu);
    EXPECT_GE(ev, 4.0 / e2 - 1e-12);
    EXPECT_LE(ev, 4.0 + 1e-12);
    EXPECT_GE(hv, 0.5 / e2 - 1e-12);
    EXPECT_LE(hv, 0.25 + 1e-12);
  }
  std::vector<double> point(10, 0.0);
  point[4] = 1.0;
  EXPECT_NEAR(edge_matrix_var_norm(SpaceKind::euclidean, 5, CoupleMeasure(point)), 4.0, 1e-12);
  EXPECT_NEAR(edge_matrix_var_norm(SpaceKind::hyperbolic, 5, CoupleMeasure(point)), 0.25, 1e-15);
  // uniform: twice the complete-graph Laplacian over |E2|, and the degree diagonal
  EXPECT_NEAR(edge_matrix_var_norm(SpaceKind::euclidean, 6, CoupleMeasure::uniform(15)), 4.0 / 5.0, 1e-12);
  EXPECT_NEAR(edge_matrix_var_norm(SpaceKind::hyperbolic, 6, CoupleMeasure::uniform(15)), 1.0 / 12.0, 1e-15);
  EXPECT_THROW(edge_matrix_var_norm(SpaceKind::euclidean, 6, CoupleMeasure::uniform(14)), ValidationError);
}

TEST(OldBound, ValueAndThresholdInverse) {
  const auto mu = CoupleMeasure::uniform(45);
  const auto e = old_bound_rc(SpaceKind::euclidean, 2.0, 10, mu, 100.0);
  const double ln10 = std::log(10.0);
  const double expect = 16.0 / 100.0 * 10.0 * (std::sqrt(2.0 * 100.0 * (4.0 / 9.0) * ln10) + 2.0 / 3.0 * ln10);
  EXPECT_NEAR(e.rc.to_double(), expect, 1e-10 * expect);
  EXPECT_EQ(e.sigma_e, 2.0);

  const auto h = old_bound_rc(SpaceKind::hyperbolic, 3.0, 10, mu, 100.0, 2.0);
  EXPECT_NEAR(h.omega.to_double(), std::cosh(3.0) * std::cosh(3.0) + std::sinh(3.0) * std::sinh(3.0), 1e-9);

  for (auto kind : {SpaceKind::euclidean, SpaceKind::hyperbolic}) {
    const ExtReal s = old_bound_threshold(kind, 3.0, 10, mu, 0.5, 4.0);
    const double gap = 0.5 * 4.0 / 45.0;
    EXPECT_LE(rel(old_bound_rc(kind, 3.0, 10, mu, s.to_double()).rc.to_double(), gap), 1e-9);
  }
  EXPECT_TRUE(old_bound_threshold(SpaceKind::hyperbolic, 3.0, 10, mu, 0.5, 0.0).is_zero());
  EXPECT_THROW(old_bound_rc(SpaceKind::euclidean, 1.0, 2001, CoupleMeasure::uniform(couple_count(2001)), 10.0),
               SizeError);
}

TEST(OldBound, LargeRadiusStaysFinite) {
  const auto ob = old_bound_rc(SpaceKind::hyperbolic, 400.0, 8, CoupleMeasure::uniform(28), 1e6);
  EXPECT_TRUE(ob.rc.overflows_double());
  EXPECT_NEAR(ob.omega.log_abs(), 800.0 - std::log(2.0), 1e-9);
}

TEST(CrossoverThresholds, MatchHighPrecisionOracle) {
  const double R = 39.51;
  const std::size_t e2 = 12090;
  const double delta = std::ldexp(1.0, -10);
  for (double q : {1.0, 2.0, 5.0})
    for (auto factor : {LipschitzFactor::printed, LipschitzFactor::example})
      for (double v : {1.0, 31.0, 156.0}) {
        const auto t = crossover_thresholds(R, q, e2, 0.5, v, delta, factor);
        Big lg = boost::multiprecision::pow(Big(2) * Big(R), Big(q) - 1);
        if (factor == LipschitzFactor::printed) lg *= Big(q);
        const Big xi2 = Big(0.25);
        const Big n0 = Big(97200) * lg * lg * Big(e2) * Big(e2) / (xi2 * Big(v));
        const Big nf = Big(32) * Big(R) * Big(R) * lg * lg * Big(e2) * Big(e2) / (xi2 * Big(v) * Big(v));
        const Big nm = Big(3888) * boost::multiprecision::log(Big(3) / Big(delta)) / (xi2 * Big(v));
        const Big lower = n0 < nf ? n0 : nf;
        const Big th = lower > nm ? lower : nm;
        auto check = [](const ExtReal& got, const Big& want) {
          const double lw = static_cast<double>(boost::multiprecision::log(want));
          EXPECT_LE(std::fabs(std::expm1(got.log_abs() - lw)), 1e-6);
        };
        check(t.n0, n0);
        check(t.n_full, nf);
        check(t.n_minor, nm);
        check(t.threshold, th);
      }
}

TEST(CrossoverThresholds, WorkedExampleAndScaling) {
  const double delta = std::ldexp(1.0, -10);
  const auto t = crossover_thresholds(39.51, 1.0, 12090, 0.5, 156.0, delta);
  EXPECT_LE(rel(t.threshold.to_double(), 1.19e9), 0.02);

  const auto base = crossover_thresholds(7.0, 2.0, 300, 0.25, 10.0, 0.01);
  const auto xi2 = crossover_thresholds(7.0, 2.0, 300, 0.5, 10.0, 0.01);
  EXPECT_NEAR(xi2.n0.to_double() * 4.0, base.n0.to_double(), 1e-6 * base.n0.to_double());
  EXPECT_NEAR(xi2.n_full.to_double() * 4.0, base.n_full.to_double(), 1e-6 * base.n_full.to_double());
  EXPECT_NEAR(xi2.n_minor.to_double() * 4.0, base.n_minor.to_double(), 1e-6 * base.n_minor.to_double());
  const auto v2 = crossover_thresholds(7.0, 2.0, 300, 0.25, 20.0, 0.01);
  EXPECT_NEAR(v2.n_full.to_double() * 4.0, base.n_full.to_double(), 1e-6 * base.n_full.to_double());
  EXPECT_NEAR(v2.n0.to_double() * 2.0, base.n0.to_double(), 1e-6 * base.n0.to_double());
  EXPECT_NEAR(v2.n_minor.to_double() * 2.0, base.n_minor.to_double(), 1e-6 * base.n_minor.to_double());

  const auto never = crossover_thresholds(7.0, 2.0, 300, 0.25, 0.0, 0.01);
  EXPECT_TRUE(never.never_worse);
  EXPECT_TRUE(never.threshold.is_zero());
  EXPECT_THROW(crossover_thresholds(7.0, 0.5, 300, 0.25, 1.0, 0.01), ValidationError);
}
