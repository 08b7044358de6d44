#include "gembed/bounds.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "gembed/errors.hpp"

namespace gembed {

void BoundInputs::validate() const {
  auto nonneg = [](double x, const char* name) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw ValidationError(std::string(name) + " must be finite and >= 0");
  };
  nonneg(lip_L, "lip_L");
  nonneg(var_const, "var_const");
  nonneg(erm_eps, "erm_eps");
  nonneg(lambda_sq, "lambda_sq");
  if (!(sup_B > 0.0)) throw ValidationError("sup_B must be > 0");
  if (!(sup_B0 > sup_B)) throw ValidationError("sup_B0 must exceed sup_B");
  if (!(var_exp >= 0.0 && var_exp <= 1.0)) throw ValidationError("var_exp (beta) must lie in [0, 1]");
  if (!(clip_M > 0.0)) throw ValidationError("clip_M must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("delta must lie in (0, 1)");
}

LambdaMode lambda_mode_from_string(const std::string& s) {
  if (s == "worst_metric") return LambdaMode::worst_metric;
  if (s == "euclidean_lemma") return LambdaMode::euclidean_lemma;
  if (s == "numeric_estimate") return LambdaMode::numeric_estimate;
  throw ValidationError("unknown lambda mode '" + s + "'");
}

namespace {

double sum_h_sq(const Embedding& emb, const GFunc& g) {
  double total = 0.0;
  for (std::size_t u = 0; u < emb.size(); ++u)
    for (std::size_t v = u + 1; v < emb.size(); ++v) {
      const double h = g.score(distance(emb.space, emb.points[u], emb.points[v]));
      total += h * h;
    }
  return total;
}

double ascend_sum_h_sq(Embedding emb, const GFunc& g, std::size_t steps) {
  const double eta0 = 0.1 * emb.space.radius;
  double best = sum_h_sq(emb, g);
  const auto dim = static_cast<Eigen::Index>(emb.space.ambient_dim());
  for (std::size_t t = 0; t < steps; ++t) {
    // descent direction for -sum h^2
    std::vector<Eigen::VectorXd> grad(emb.size(), Eigen::VectorXd::Zero(dim));
    for (std::size_t u = 0; u < emb.size(); ++u)
      for (std::size_t v = u + 1; v < emb.size(); ++v) {
        const auto& a = emb.points[u];
        const auto& b = emb.points[v];
        const double d = distance(emb.space, a, b);
        const double dd = 2.0 * g.score(d) * g.derivative(d);
        if (dd == 0.0) continue;
        grad[u] += dd * distance_gradient(emb.space, a, b);
        grad[v] += dd * distance_gradient(emb.space, b, a);
      }
    double gmax = 0.0;
    for (std::size_t v = 0; v < emb.size(); ++v)
      gmax = std::max(gmax, riemannian_grad_norm(emb.space, emb.points[v], grad[v]));
    if (!(gmax > 0.0)) break;
    const double step = eta0 / std::sqrt(1.0 + static_cast<double>(t));
    for (std::size_t v = 0; v < emb.size(); ++v)
      emb.points[v] = riemannian_step(emb.space, emb.points[v], grad[v] / gmax, step);
    best = std::max(best, sum_h_sq(emb, g));
  }
  return best;
}

double numeric_lambda_sq(const SpaceSpec& space, const GFunc& g, std::size_t n, const LambdaEstimateOptions& opts) {
  if (space.kind == SpaceKind::hyperbolic && space.radius > kHyperbolicPrecisionRadius)
    throw ValidationError("numeric Lambda estimate needs hyperbolic R <= 15");
  const double R = space.radius;
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.dim));
  e1[0] = 1.0;
  double best = 0.0;

  // all entities at the origin
  Embedding emb{space, std::vector<Point>(n, origin(space))};
  best = std::max(best, sum_h_sq(emb, g));
  // two antipodal clusters
  for (std::size_t v = 0; v < n; ++v) emb.points[v] = point_at(space, v % 2 == 0 ? e1 : Eigen::VectorXd(-e1), R);
  best = std::max(best, sum_h_sq(emb, g));
  // regular polygon on the boundary circle
  if (space.dim >= 2) {
    for (std::size_t v = 0; v < n; ++v) {
      Eigen::VectorXd dir = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.dim));
      const double phi = 2.0 * std::numbers::pi * static_cast<double>(v) / static_cast<double>(n);
      dir[0] = std::cos(phi);
      dir[1] = std::sin(phi);
      emb.points[v] = point_at(space, dir, R);
    }
    const double polygon = sum_h_sq(emb, g);
    best = std::max(best, polygon);
    best = std::max(best, ascend_sum_h_sq(emb, g, opts.steps / 4));
  }
  for (std::size_t r = 0; r < opts.restarts; ++r) {
    Rng rng(stream_seed(opts.seed, r));
    for (std::size_t v = 0; v < n; ++v) emb.points[v] = sample_uniform_ball(space, R, rng);
    best = std::max(best, ascend_sum_h_sq(emb, g, opts.steps));
  }
  return best;
}

}  // namespace

double lambda_sq(LambdaMode mode, const SpaceSpec& space, const GFunc& g, std::size_t nvertices,
                 const LambdaEstimateOptions& opts) {
  space.validate();
  g.validate(space);
  if (nvertices < 2) throw ValidationError("Lambda needs at least two entities");
  const double n_couples = static_cast<double>(couple_count(nvertices));
  const double diam_q = std::pow(2.0 * space.radius, g.q);
  switch (mode) {
    case LambdaMode::worst_metric: {
      const double tq = g(g.tau_x);
      return n_couples * std::max((diam_q - tq) * (diam_q - tq), tq * tq);
    }
    case LambdaMode::euclidean_lemma:
      if (space.kind != SpaceKind::euclidean) throw ModeMismatchError("euclidean_lemma applies to Euclidean balls only");
      return static_cast<double>(nvertices) / 8.0 * diam_q * diam_q;
    case LambdaMode::numeric_estimate:
      return numeric_lambda_sq(space, g, nvertices, opts);
  }
  throw ValidationError("unknown lambda mode");
}

double zeta_m(double r, std::size_t m, const BoundInputs& in, const CoupleMeasure& mu) {
  const std::size_t n = mu.size();
  if (m > n) throw ValidationError("m exceeds |E2|");
  if (!(r >= 0.0)) throw ValidationError("r must be >= 0");
  if (in.lip_L * in.lambda_sq * in.var_const == 0.0) return 0.0;
  const double local = in.var_const * std::pow(r, in.var_exp) / (4.0 * in.lambda_sq) * static_cast<double>(m);
  return 2.0 * in.lip_L * std::sqrt(2.0 * in.lambda_sq * (local + mu.smallest_sum(n - m)));
}

double solve_rate_m(double S, std::size_t m, const BoundInputs& in, const CoupleMeasure& mu) {
  if (!(S >= 1.0)) throw ValidationError("sample size S must be >= 1");
  if (in.lip_L * in.lambda_sq * in.var_const == 0.0) return 0.0;
  const double c = 30.0 / std::sqrt(S);
  auto gap = [&](double r) { return r - c * zeta_m(r, m, in, mu); };

  double lo = 1.0, hi = 1.0;
  if (gap(1.0) < 0.0) {
    while (gap(hi) < 0.0) {
      lo = hi;
      hi *= 2.0;
      if (!std::isfinite(hi)) throw NumericalError("rate bracket diverged");
    }
  } else {
    while (gap(lo) >= 0.0) {
      hi = lo;
      lo *= 0.5;
      if (lo == 0.0) return 0.0;
    }
  }
  for (int it = 0; it < 200 && hi > lo * (1.0 + 1e-15); ++it) {
    const double mid = std::sqrt(lo * hi);
    (gap(mid) < 0.0 ? lo : hi) = mid;
  }
  return std::sqrt(lo * hi);
}

double rate_full_closed(double S, const BoundInputs& in, std::size_t n_couples) {
  if (!(S >= 1.0)) throw ValidationError("sample size S must be >= 1");
  const double base = 1800.0 * static_cast<double>(n_couples) * in.lip_L * in.lip_L * in.var_const / S;
  return 3.0 * std::pow(base, 1.0 / (2.0 - in.var_exp));
}

GlobalBound bound_global(double S, const BoundInputs& in) {
  in.validate();
  if (!(S >= 1.0)) throw ValidationError("sample size S must be >= 1");
  GlobalBound b;
  b.r0 = 4.0 * in.lip_L * std::sqrt(in.lambda_sq) * std::sqrt(2.0 / S);
  b.minor = in.sup_B0 * std::sqrt(std::log(1.0 / in.delta) / S);
  b.total = b.r0 + b.minor + in.erm_eps;
  return b;
}

std::vector<std::size_t> rate_m_grid(std::size_t n_couples) {
  std::vector<std::size_t> ms;
  if (n_couples <= 20000) {
    for (std::size_t m = 0; m <= n_couples; ++m) ms.push_back(m);
    return ms;
  }
  ms.push_back(0);
  for (std::size_t m = n_couples; m > 0; m /= 2) ms.push_back(m);
  std::sort(ms.begin(), ms.end());
  ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
  return ms;
}

RateReport bound_local(double S, const BoundInputs& in, const CoupleMeasure& mu) {
  in.validate();
  const std::size_t n = mu.size();
  RateReport rep;
  rep.m_values = rate_m_grid(n);
  rep.min_r_m = std::numeric_limits<double>::infinity();
  for (std::size_t m : rep.m_values) {
    const double r = solve_rate_m(S, m, in, mu);
    rep.r_m.push_back(r);
    if (r < rep.min_r_m) {
      rep.min_r_m = r;
      rep.argmin_m = m;
    }
  }
  rep.r0_solved = rep.r_m.front();
  rep.r_full_solved = rep.r_m.back();
  rep.r_full_closed = rate_full_closed(S, in, n);

  const double beta = in.var_exp;
  const double log3d = std::log(3.0 / in.delta);
  const double big = std::max(std::pow(in.sup_B, 2.0 - beta), in.lip_L * in.lip_L * in.var_const);
  rep.minor_a = 3.0 * std::pow(72.0 * big * log3d / S, 1.0 / (2.0 - beta));
  rep.minor_b = 15.0 * in.sup_B0 * log3d / S;
  rep.total_local = std::max({rep.min_r_m, rep.minor_a, rep.minor_b}) + 3.0 * in.erm_eps;

  const GlobalBound gb = bound_global(S, in);
  rep.r_global = gb.r0;
  rep.total_global = gb.total;
  rep.crossover_S = crossover_S(in, n);
  return rep;
}

ExtReal crossover_S(const BoundInputs& in, std::size_t n_couples) {
  if (in.var_exp == 0.0) return ExtReal::infinity();
  const ExtReal lam(in.lambda_sq);
  const ExtReal inner = ExtReal(in.var_const) * ExtReal(static_cast<double>(n_couples)) / (ExtReal(4.0) * lam);
  return ExtReal(7200.0) * ExtReal(in.lip_L * in.lip_L) * lam * pow(inner, 2.0 / in.var_exp);
}

BoundInputs hinge_params(double alpha, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw ValidationError("noise constant c must be > 0");
  if (!(alpha >= 0.0)) throw ValidationError("noise exponent alpha must be >= 0");
  BoundInputs in;
  in.lip_L = 1.0;
  in.clip_M = 1.0;
  in.sup_B = 2.0;
  if (std::isinf(alpha)) {
    in.var_exp = 1.0;
    in.var_const = 6.0 * c;
  } else {
    in.var_exp = alpha / (alpha + 1.0);
    in.var_const = 6.0 * std::pow(c, in.var_exp);
  }
  return in;
}

bool noise_exponent_check(const DistributionSpec& dist, double alpha, double c) {
  dist.validate();
  if (!(c > 0.0)) throw ValidationError("noise constant c must be > 0");
  constexpr double kTol = 1e-12;
  std::vector<std::pair<double, double>> margin_mass;
  for (std::size_t i = 0; i < dist.eta.size(); ++i)
    if (dist.mu.weight(i) > 0.0) margin_mass.emplace_back(std::fabs(2.0 * dist.eta[i] - 1.0), dist.mu.weight(i));
  if (std::isinf(alpha)) {
    const double t = 3.0 / c;
    for (const auto& [a, w] : margin_mass)
      if (a < t - kTol) return false;
    return true;
  }
  if (alpha == 0.0) return true;
  // the left side mu(|2 eta - 1| < t) only jumps right after each margin
  // value a_i, where it reaches mu(a <= a_i); the right side is continuous
  std::sort(margin_mass.begin(), margin_mass.end());
  double mass = 0.0;
  for (std::size_t i = 0; i < margin_mass.size(); ++i) {
    mass += margin_mass[i].second;
    if (i + 1 < margin_mass.size() && margin_mass[i + 1].first == margin_mass[i].first) continue;
    if (mass > std::pow(c * margin_mass[i].first, alpha) + kTol) return false;
  }
  return true;
}

double edge_matrix_var_norm(SpaceKind kind, std::size_t nvertices, const CoupleMeasure& mu) {
  if (mu.size() != couple_count(nvertices)) throw ValidationError("couple measure size does not match |V|");
  const auto n = static_cast<Eigen::Index>(nvertices);
  if (kind == SpaceKind::hyperbolic) {
    // E_c^2 = diag(1/4 at both endpoints)
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    std::size_t idx = 0;
    for (Eigen::Index u = 0; u < n; ++u)
      for (Eigen::Index v = u + 1; v < n; ++v, ++idx) {
        diag[u] += 0.25 * mu.weight(idx);
        diag[v] += 0.25 * mu.weight(idx);
      }
    return diag.maxCoeff();
  }
  // E_c^2 = 2 (e_u - e_v)(e_u - e_v)^T: twice a weighted graph Laplacian
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  std::size_t idx = 0;
  for (Eigen::Index u = 0; u < n; ++u)
    for (Eigen::Index v = u + 1; v < n; ++v, ++idx) {
      const double w = 2.0 * mu.weight(idx);
      m(u, u) += w;
      m(v, v) += w;
      m(u, v) -= w;
      m(v, u) -= w;
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigenvalue solver failed");
  return es.eigenvalues().maxCoeff();
}

namespace {
struct OldConstants {
  ExtReal omega;
  double sigma_e;
};

OldConstants old_constants(SpaceKind kind, double R) {
  if (!(R > 0.0)) throw ValidationError("radius must be > 0");
  if (kind == SpaceKind::euclidean) return {ExtReal(4.0 * R * R), 2.0};
  // cosh^2 R + sinh^2 R = cosh 2R
  return {ext_cosh(2.0 * R), 0.5};
}
}  // namespace

OldBound old_bound_rc(SpaceKind kind, double R, std::size_t nvertices, const CoupleMeasure& mu, double S,
                      double lip_g2) {
  if (nvertices > 2000) throw SizeError("old bound supports |V| <= 2000");
  if (!(S >= 1.0)) throw ValidationError("sample size S must be >= 1");
  const auto [omega, sigma] = old_constants(kind, R);
  OldBound ob;
  ob.omega = omega;
  ob.sigma_e = sigma;
  ob.e_var_norm = edge_matrix_var_norm(kind, nvertices, mu);
  const double nv = static_cast<double>(nvertices);
  const double ln_v = std::log(nv);
  const double bracket = std::sqrt(2.0 * S * ob.e_var_norm * ln_v) + sigma / 3.0 * ln_v;
  ob.rc = omega / ExtReal(S) * ExtReal(lip_g2 * nv) * ExtReal(bracket);
  return ob;
}

ExtReal old_bound_threshold(SpaceKind kind, double R, std::size_t nvertices, const CoupleMeasure& mu, double xi,
                            double v_min, double lip_g2) {
  if (!(xi > 0.0 && xi <= 1.0)) throw ValidationError("xi must lie in (0, 1]");
  if (v_min == 0.0) return ExtReal::zero();
  const auto [omega, sigma] = old_constants(kind, R);
  const double e_var = edge_matrix_var_norm(kind, nvertices, mu);
  const double nv = static_cast<double>(nvertices);
  const double ln_v = std::log(nv);
  // rc(S) = a x + b x^2 with x = 1/sqrt(S); solve rc = gap for x > 0
  const ExtReal scale = omega * ExtReal(lip_g2 * nv);
  const ExtReal a = scale * ExtReal(std::sqrt(2.0 * e_var * ln_v));
  const ExtReal b = scale * ExtReal(sigma / 3.0 * ln_v);
  const ExtReal k(xi * v_min / static_cast<double>(couple_count(nvertices)));
  const ExtReal x = ExtReal(2.0) * k / (a + sqrt(a * a + ExtReal(4.0) * b * k));
  return ExtReal(1.0) / (x * x);
}

CrossoverThresholds crossover_thresholds(double R, double q, std::size_t n_couples, double xi, double v_min,
                                         double delta, LipschitzFactor factor) {
  if (!(R > 0.0)) throw ValidationError("radius must be > 0");
  if (!(q >= 1.0)) throw ValidationError("q must be >= 1");
  if (!(xi > 0.0 && xi <= 1.0)) throw ValidationError("xi must lie in (0, 1]");
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("delta must lie in (0, 1)");
  if (!(v_min >= 0.0)) throw ValidationError("v_min must be >= 0");
  CrossoverThresholds t;
  if (v_min == 0.0) {
    t.never_worse = true;
    return t;
  }
  ExtReal lg = pow(ExtReal(2.0 * R), q - 1.0);
  if (factor == LipschitzFactor::printed) lg = ExtReal(q) * lg;
  const ExtReal e2(static_cast<double>(n_couples));
  const ExtReal xi2(xi * xi);
  const ExtReal v(v_min);
  t.n0 = ExtReal(97200.0) * lg * lg * e2 * e2 / (xi2 * v);
  t.n_full = ExtReal(32.0 * R * R) * lg * lg * e2 * e2 / (xi2 * v * v);
  t.n_minor = ExtReal(3888.0 * std::log(3.0 / delta)) / (xi2 * v);
  t.threshold = max(min(t.n0, t.n_full), t.n_minor);
  return t;
}

}  // namespace gembed
