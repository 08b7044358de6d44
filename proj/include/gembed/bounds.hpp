#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "gembed/distribution.hpp"
#include "gembed/ext_real.hpp"
#include "gembed/geometry.hpp"
#include "gembed/learner.hpp"

namespace gembed {

/// Constants of the excess-risk theorem. var_const is the variance constant
/// V_b (not the vertex set).
struct BoundInputs {
  double lip_L = 1.0;
  double sup_B = 2.0;
  double sup_B0 = 2.01;
  double var_const = 6.0;
  double var_exp = 0.0;  // beta
  double clip_M = 1.0;
  double delta = 0.05;
  double erm_eps = 0.0;
  double lambda_sq = 1.0;

  /// Throws ValidationError.
  void validate() const;
};

enum class LambdaMode { worst_metric, euclidean_lemma, numeric_estimate };

LambdaMode lambda_mode_from_string(const std::string& s);

struct LambdaEstimateOptions {
  std::size_t restarts = 8;
  std::size_t steps = 400;
  std::uint64_t seed = 7;
};

/// Lambda^2 = max over embeddings of sum over couples of h^2.
///  worst_metric: |E2| * max(((2R)^q - tau^q)^2, tau^(2q)), valid for every
///    metric ball of radius R;
///  euclidean_lemma: (|V| / 8) (2R)^(2q), Euclidean only (ModeMismatchError);
///  numeric_estimate: best value found by multi-restart ascent plus explicit
///    witnesses (a certified lower bound).
double lambda_sq(LambdaMode mode, const SpaceSpec& space, const GFunc& g, std::size_t nvertices,
                 const LambdaEstimateOptions& opts = {});

/// 2L sqrt(2 Lambda^2 ((V r^beta / (4 Lambda^2)) m + P_mu(|E2| - m))).
double zeta_m(double r, std::size_t m, const BoundInputs& in, const CoupleMeasure& mu);

/// Positive fixed point of r = 30 zeta_m(r) / sqrt(S).
double solve_rate_m(double S, std::size_t m, const BoundInputs& in, const CoupleMeasure& mu);

/// Printed closed form 3 (1800 |E2| L^2 V / S)^(1 / (2 - beta)).
double rate_full_closed(double S, const BoundInputs& in, std::size_t n_couples);

struct GlobalBound {
  double r0 = 0.0;
  double minor = 0.0;
  double total = 0.0;
};

/// r0 = 4 L Lambda sqrt(2/S), minor = B0 sqrt(ln(1/delta)/S), total adds eps.
GlobalBound bound_global(double S, const BoundInputs& in);

struct RateReport {
  std::vector<std::size_t> m_values;
  std::vector<double> r_m;
  std::size_t argmin_m = 0;
  double min_r_m = 0.0;
  double r0_solved = 0.0;
  double r_full_solved = 0.0;
  double r_full_closed = 0.0;
  double r_global = 0.0;
  double minor_a = 0.0;
  double minor_b = 0.0;
  double total_local = 0.0;
  double total_global = 0.0;
  ExtReal crossover_S;
};

/// m values evaluated by bound_local: all of 0..|E2| up to 2e4 couples,
/// otherwise {0} u {floor(|E2| 2^-j)} u {|E2|}.
std::vector<std::size_t> rate_m_grid(std::size_t n_couples);

RateReport bound_local(double S, const BoundInputs& in, const CoupleMeasure& mu);

/// 7200 L^2 Lambda^2 (V |E2| / (4 Lambda^2))^(2/beta); infinite for beta = 0.
ExtReal crossover_S(const BoundInputs& in, std::size_t n_couples);

/// Hinge constants for noise exponent alpha (may be +inf) with constant c.
BoundInputs hinge_params(double alpha, double c);

/// Noise-exponent condition checked exactly over the finite couple set.
bool noise_exponent_check(const DistributionSpec& dist, double alpha, double c);

/// Norm of sum_c mu(c) E_c^2 for the |V| x |V| couple matrices E_c.
double edge_matrix_var_norm(SpaceKind kind, std::size_t nvertices, const CoupleMeasure& mu);

struct OldBound {
  ExtReal rc;
  double e_var_norm = 0.0;
  ExtReal omega;
  double sigma_e = 0.0;
};

/// Prior-work Rademacher bound
/// (omega(R)/S) L_g2 |V| (sqrt(2 S |E|_var ln|V|) + (sigma_E/3) ln|V|).
OldBound old_bound_rc(SpaceKind kind, double R, std::size_t nvertices, const CoupleMeasure& mu, double S,
                      double lip_g2 = 1.0);

/// Sample size at which old_bound_rc falls to the approximation gap
/// xi * v_min / |E2|.
ExtReal old_bound_threshold(SpaceKind kind, double R, std::size_t nvertices, const CoupleMeasure& mu, double xi,
                            double v_min, double lip_g2 = 1.0);

/// How the Lipschitz factor of g(t) = t^q on [0, 2R] enters the
/// crossover sample sizes.
enum class LipschitzFactor {
  printed,  // q (2R)^(q-1)
  example,  // (2R)^(q-1)
};

struct CrossoverThresholds {
  ExtReal n0;
  ExtReal n_full;
  ExtReal n_minor;
  ExtReal threshold;
  /// v_min = 0: the hyperbolic ball is never worse; all values are 0.
  bool never_worse = false;
};

/// N0 = 97200 [Lg]^2 |E2|^2 / (xi^2 v), N_full = 32 R^2 [Lg]^2 |E2|^2 / (xi^2 v^2),
/// N_minor = 3888 ln(3/delta) / (xi^2 v), threshold = min(N0, N_full) v N_minor.
CrossoverThresholds crossover_thresholds(double R, double q, std::size_t n_couples, double xi, double v_min,
                                         double delta, LipschitzFactor factor = LipschitzFactor::printed);

}  // namespace gembed
