#include "gembed/rademacher.hpp"

#include <algorithm>
#include <cmath>

#include "gembed/errors.hpp"
#include "gembed/parallel.hpp"

namespace gembed {

namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double std_err_of(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

std::vector<int> draw_signs(std::size_t S, Rng& rng) {
  std::vector<int> s(S);
  for (int& x : s) x = rng.sign();
  return s;
}

// value of a LossObjective for 1-D coordinates
double value_1d(const LossObjective& obj, const GFunc& g, const std::vector<double>& x) {
  double total = 0.0;
  for (const auto& t : obj.terms) {
    const double h = g.score(std::fabs(x[t.couple.u] - x[t.couple.v]));
    if (t.w_pos != 0.0) total += t.w_pos * clipped_hinge(1, h, obj.clip_M);
    if (t.w_neg != 0.0) total += t.w_neg * clipped_hinge(-1, h, obj.clip_M);
  }
  return total;
}

}  // namespace

double rc_trial_sup(const Dataset& data, const std::vector<int>& signs, const SpaceSpec& space, const GFunc& g,
                    const LossSpec& loss, const OptimizerOptions& opt) {
  const auto obj = LossObjective::rademacher(data, signs, loss.clip_M);
  return -minimize_objective(space, g, obj, opt).best_value;
}

RcEstimate rc_monte_carlo(const DistributionSpec& dist, const SpaceSpec& space, const GFunc& g, const LossSpec& loss,
                          std::size_t S, const RcOptions& opts) {
  if (opts.trials < 30) throw ValidationError("rc_monte_carlo needs at least 30 trials");
  if (S == 0) throw ValidationError("sample size must be >= 1");
  g.validate(space);
  const bool localized = std::isfinite(opts.local_radius);
  // NaN marks a dropped trial
  std::vector<double> sups(opts.trials, std::numeric_limits<double>::quiet_NaN());
  parallel_for(opts.trials, opts.threads, [&](std::size_t t) {
    Rng rng(stream_seed(opts.seed, t));
    const Dataset data = sample_dataset(dist, S, rng.next());
    const auto signs = draw_signs(S, rng);
    OptimizerOptions opt = opts.optimizer;
    opt.seed = rng.next();
    try {
      const auto obj = LossObjective::rademacher(data, signs, loss.clip_M);
      const auto res = minimize_objective(space, g, obj, opt);
      if (!localized) {
        sups[t] = -res.best_value;
        return;
      }
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < res.restart_embeddings.size(); ++r) {
        if (risks_exact(res.restart_embeddings[r], g, dist, loss).excess <= opts.local_radius)
          best = std::max(best, -res.restart_values[r]);
      }
      if (std::isfinite(best)) sups[t] = best;
    } catch (const NumericalError&) {
    }
  });
  RcEstimate est;
  for (std::size_t t = 0; t < sups.size(); ++t) {
    if (std::isnan(sups[t])) {
      ++est.dropped;
    } else {
      est.sup_values.push_back(sups[t]);
      est.trial_ids.push_back(t);
    }
  }
  if (static_cast<double>(est.dropped) > 0.1 * static_cast<double>(opts.trials))
    throw OptimizerError(std::to_string(est.dropped) + " of " + std::to_string(opts.trials) +
                         " Rademacher trials dropped (limit 10%)");
  est.trials = est.sup_values.size();
  est.mean = mean_of(est.sup_values);
  est.std_err = std_err_of(est.sup_values, est.mean);
  return est;
}

double GridClass::radius() const {
  double r = 0.0;
  for (double x : grid) r = std::max(r, std::fabs(x));
  return r;
}

std::size_t GridClass::embedding_count(std::size_t n) const {
  if (grid.empty()) throw ValidationError("grid must be non-empty");
  double total = 1.0;
  for (std::size_t i = 0; i < n; ++i) total *= static_cast<double>(grid.size());
  if (total > 1e5) throw SizeError("grid class has more than 1e5 embeddings");
  return static_cast<std::size_t>(total);
}

double grid_sup_exhaustive(const Dataset& data, const std::vector<int>& signs, const GridClass& cls, const GFunc& g,
                           const LossSpec& loss) {
  const std::size_t n = data.vertex_count;
  const std::size_t count = cls.embedding_count(n);
  const auto obj = LossObjective::rademacher(data, signs, loss.clip_M);
  std::vector<double> x(n);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < count; ++e) {
    std::size_t code = e;
    for (std::size_t v = 0; v < n; ++v) {
      x[v] = cls.grid[code % cls.grid.size()];
      code /= cls.grid.size();
    }
    best = std::min(best, value_1d(obj, g, x));
  }
  return -best;
}

double grid_sup_ascent(const Dataset& data, const std::vector<int>& signs, const GridClass& cls, const GFunc& g,
                       const LossSpec& loss, const OptimizerOptions& opt) {
  const std::size_t n = data.vertex_count;
  const auto obj = LossObjective::rademacher(data, signs, loss.clip_M);
  const double R = cls.radius();
  auto snap = [&](double v) {
    return *std::min_element(cls.grid.begin(), cls.grid.end(),
                             [&](double a, double b) { return std::fabs(a - v) < std::fabs(b - v); });
  };
  auto climb = [&](std::vector<double>& x) {
    double cur = value_1d(obj, g, x);
    for (bool improved = true; improved;) {
      improved = false;
      for (std::size_t v = 0; v < n; ++v) {
        const double keep = x[v];
        double best_val = cur;
        double best_x = keep;
        for (double c : cls.grid) {
          x[v] = c;
          const double val = value_1d(obj, g, x);
          if (val < best_val - 1e-15) {
            best_val = val;
            best_x = c;
          }
        }
        x[v] = best_x;
        if (best_x != keep) {
          cur = best_val;
          improved = true;
        }
      }
    }
    return cur;
  };

  double best = std::numeric_limits<double>::infinity();
  std::vector<double> x(n);
  if (R > 0.0) {
    const SpaceSpec space{SpaceKind::euclidean, 1, R};
    const auto res = minimize_objective(space, g, obj, opt);
    for (const auto& emb : res.restart_embeddings) {
      for (std::size_t v = 0; v < n; ++v) x[v] = snap(emb.points[v][0]);
      best = std::min(best, climb(x));
    }
    // snapped continuous optima can sit in the wrong grid basin
    Rng rng(stream_seed(opt.seed, opt.restarts));
    for (std::size_t r = 0; r < opt.restarts; ++r) {
      for (std::size_t v = 0; v < n; ++v) x[v] = cls.grid[rng.index(cls.grid.size())];
      best = std::min(best, climb(x));
    }
  } else {
    std::fill(x.begin(), x.end(), cls.grid.front());
    best = climb(x);
  }
  return -best;
}

RcEstimate rc_brute_force(const DistributionSpec& dist, const GridClass& cls, const GFunc& g, const LossSpec& loss,
                          std::size_t S, std::uint64_t seed, std::size_t mc_draws) {
  const std::size_t n = dist.vertex_count;
  if (n > 3) throw SizeError("brute-force Rademacher oracle supports |V| <= 3");
  if (S == 0 || S > 4) throw SizeError("brute-force Rademacher oracle supports 1 <= S <= 4");
  dist.validate();
  const std::size_t n_emb = cls.embedding_count(n);
  const std::size_t n_couples = couple_count(n);
  const auto couples = all_couples(n);

  // loss[e][2c + (y<0)]
  std::vector<std::vector<double>> table(n_emb, std::vector<double>(2 * n_couples));
  std::vector<double> x(n);
  for (std::size_t e = 0; e < n_emb; ++e) {
    std::size_t code = e;
    for (std::size_t v = 0; v < n; ++v) {
      x[v] = cls.grid[code % cls.grid.size()];
      code /= cls.grid.size();
    }
    for (std::size_t c = 0; c < n_couples; ++c) {
      const double h = g.score(std::fabs(x[couples[c].u] - x[couples[c].v]));
      table[e][2 * c] = clipped_hinge(1, h, loss.clip_M);
      table[e][2 * c + 1] = clipped_hinge(-1, h, loss.clip_M);
    }
  }
  // exact expectation over signs of the sup, for one data tuple (cells)
  const std::size_t n_signs = std::size_t{1} << S;
  auto sign_average = [&](const std::vector<std::size_t>& cells) {
    double acc = 0.0;
    for (std::size_t mask = 0; mask < n_signs; ++mask) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t e = 0; e < n_emb; ++e) {
        double v = 0.0;
        for (std::size_t s = 0; s < S; ++s) v += ((mask >> s) & 1 ? 1.0 : -1.0) * table[e][cells[s]];
        best = std::max(best, v);
      }
      acc += best / static_cast<double>(S);
    }
    return acc / static_cast<double>(n_signs);
  };

  RcEstimate est;
  est.sup_method = SupMethod::exhaustive;
  double tuples = 1.0;
  for (std::size_t s = 0; s < S; ++s) tuples *= static_cast<double>(n_couples);
  if (tuples <= 1e4) {
    est.lower_estimate = false;
    const std::size_t n_cells = 2 * n_couples;
    std::size_t total = 1;
    for (std::size_t s = 0; s < S; ++s) total *= n_cells;
    std::vector<std::size_t> cells(S);
    double value = 0.0;
    for (std::size_t code = 0; code < total; ++code) {
      std::size_t rest = code;
      double prob = 1.0;
      for (std::size_t s = 0; s < S; ++s) {
        cells[s] = rest % n_cells;
        rest /= n_cells;
        const std::size_t c = cells[s] / 2;
        const double eta = dist.eta[c];
        prob *= dist.mu.weight(c) * (cells[s] % 2 == 0 ? eta : 1.0 - eta);
      }
      if (prob == 0.0) continue;
      value += prob * sign_average(cells);
    }
    est.mean = value;
    est.trials = total;
    return est;
  }
  for (std::size_t t = 0; t < mc_draws; ++t) {
    const Dataset data = sample_dataset(dist, S, stream_seed(seed, t));
    std::vector<std::size_t> cells(S);
    for (std::size_t s = 0; s < S; ++s)
      cells[s] = 2 * couple_index(n, data.items[s].couple.u, data.items[s].couple.v) + (data.items[s].label < 0);
    est.sup_values.push_back(sign_average(cells));
    est.trial_ids.push_back(t);
  }
  est.trials = mc_draws;
  est.mean = mean_of(est.sup_values);
  est.std_err = std_err_of(est.sup_values, est.mean);
  return est;
}

std::vector<LocalRcRow> local_rc_bound_table(const BoundInputs& in, const CoupleMeasure& mu,
                                             const std::vector<double>& r_grid, double S) {
  if (r_grid.empty()) throw ValidationError("r grid must be non-empty");
  if (!(S >= 1.0)) throw ValidationError("sample size S must be >= 1");
  const double root_s = std::sqrt(S);
  const auto ms = rate_m_grid(mu.size());
  std::vector<LocalRcRow> rows;
  for (double r : r_grid) {
    LocalRcRow row{r, 0, 0.0};
    if (std::isinf(r)) {
      // every m > 0 term carries r^beta = inf
      row.bound = zeta_m(0.0, 0, in, mu) / root_s;
    } else {
      row.bound = std::numeric_limits<double>::infinity();
      for (std::size_t m : ms) {
        const double b = zeta_m(r, m, in, mu) / root_s;
        if (b < row.bound) {
          row.bound = b;
          row.argmin_m = m;
        }
      }
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace gembed
