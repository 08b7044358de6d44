#include "gembed/learner.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "gembed/errors.hpp"
#include "gembed/sarkar.hpp"

namespace gembed {

double clip(double t, double M) { return std::clamp(t, -M, M); }

double hinge(int y, double t) { return std::max(1.0 - y * t, 0.0); }

double clipped_hinge(int y, double t, double M) { return hinge(y, clip(t, M)); }

Dataset sample_dataset(const DistributionSpec& dist, std::size_t S, std::uint64_t seed) {
  if (S == 0) throw ValidationError("sample size must be >= 1");
  dist.validate();
  const auto couples = all_couples(dist.vertex_count);
  Rng rng(seed);
  Dataset data{dist.vertex_count, {}, seed};
  data.items.reserve(S);
  for (std::size_t s = 0; s < S; ++s) {
    const std::size_t idx = dist.mu.draw(rng.uniform());
    const int label = rng.uniform() < dist.eta[idx] ? 1 : -1;
    data.items.push_back({couples[idx], label});
  }
  return data;
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  out << "u,v,label\n";
  for (const auto& it : data.items) out << it.couple.u << "," << it.couple.v << "," << it.label << "\n";
}

Dataset read_dataset_csv(std::istream& in, std::size_t vertex_count) {
  Dataset data{vertex_count, {}, 0};
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "u,v,label") throw ValidationError("dataset CSV must start with the header u,v,label");
      header = true;
      continue;
    }
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    long long u = -1, v = -1;
    int y = 0;
    if (!(ss >> u >> v >> y) || u < 0 || v < 0 || static_cast<std::size_t>(std::max(u, v)) >= vertex_count ||
        u == v || (y != 1 && y != -1))
      throw ValidationError("malformed dataset row: '" + line + "'");
    data.items.push_back({Couple(static_cast<Vertex>(u), static_cast<Vertex>(v)), y});
  }
  if (!header) throw ValidationError("dataset CSV is empty");
  return data;
}

Risks risks_exact(const std::vector<double>& couple_dist, const GFunc& g, const DistributionSpec& dist,
                  const LossSpec& loss) {
  if (couple_dist.size() != dist.mu.size()) throw ValidationError("embedding and distribution sizes differ");
  const double M = loss.clip_M;
  Risks r;
  for (std::size_t i = 0; i < couple_dist.size(); ++i) {
    const double w = dist.mu.weight(i);
    if (w == 0.0) continue;
    const double h = g.score(couple_dist[i]);
    const double eta = dist.eta[i];
    r.expected += w * (eta * hinge(1, h) + (1.0 - eta) * hinge(-1, h));
    r.clipped_expected += w * (eta * clipped_hinge(1, h, M) + (1.0 - eta) * clipped_hinge(-1, h, M));
    // pointwise minimum over t in [-M, M] sits at t = +-min(M, 1)
    r.bayes += w * (1.0 - std::min(M, 1.0) * std::fabs(2.0 * eta - 1.0));
  }
  r.excess = r.clipped_expected - r.bayes;
  return r;
}

Risks risks_exact(const Embedding& emb, const GFunc& g, const DistributionSpec& dist, const LossSpec& loss) {
  if (emb.size() != dist.vertex_count) throw ValidationError("embedding and distribution sizes differ");
  return risks_exact(couple_distances(emb), g, dist, loss);
}

double empirical_risk(const Embedding& emb, const GFunc& g, const Dataset& data, const LossSpec& loss, bool clipped) {
  if (data.items.empty()) throw ValidationError("empirical risk of an empty dataset");
  double total = 0.0;
  for (const auto& it : data.items) {
    const double h = g.score(distance(emb.space, emb.points[it.couple.u], emb.points[it.couple.v]));
    total += clipped ? clipped_hinge(it.label, h, loss.clip_M) : hinge(it.label, h);
  }
  return total / static_cast<double>(data.items.size());
}

namespace {

LossObjective aggregate(const Dataset& data, const std::vector<double>& weight, double clip_M) {
  std::map<std::pair<Vertex, Vertex>, CoupleTerm> acc;
  for (std::size_t s = 0; s < data.items.size(); ++s) {
    const auto& it = data.items[s];
    auto& t = acc[{it.couple.u, it.couple.v}];
    t.couple = it.couple;
    (it.label > 0 ? t.w_pos : t.w_neg) += weight[s];
  }
  LossObjective obj;
  obj.vertex_count = data.vertex_count;
  obj.clip_M = clip_M;
  for (auto& [key, t] : acc)
    if (t.w_pos != 0.0 || t.w_neg != 0.0) obj.terms.push_back(t);
  return obj;
}

// d loss / d h for one label: the exact clipped subgradient, or the
// surrogate that keeps pushing on the side where the clip would zero the
// gradient (the sign of the term weight picks the side).
double loss_slope(int y, double h, double M, double w, bool surrogate) {
  const double z = y * h;
  if (!surrogate) return (std::fabs(h) < M && z < 1.0) ? -y : 0.0;
  if (w > 0.0) return z < std::min(1.0, M) ? -y : 0.0;
  return z > -M ? -y : 0.0;
}

std::vector<Eigen::VectorXd> objective_gradient(const LossObjective& obj, const Embedding& emb, const GFunc& g,
                                                bool surrogate) {
  std::vector<Eigen::VectorXd> grad(emb.size(), Eigen::VectorXd::Zero(static_cast<Eigen::Index>(emb.space.ambient_dim())));
  for (const auto& t : obj.terms) {
    const auto& a = emb.points[t.couple.u];
    const auto& b = emb.points[t.couple.v];
    const double d = distance(emb.space, a, b);
    const double h = g.score(d);
    double dh = 0.0;
    if (t.w_pos != 0.0) dh += t.w_pos * loss_slope(1, h, obj.clip_M, t.w_pos, surrogate);
    if (t.w_neg != 0.0) dh += t.w_neg * loss_slope(-1, h, obj.clip_M, t.w_neg, surrogate);
    if (dh == 0.0) continue;
    const double dd = -dh * g.derivative(d);  // h = g(tau) - g(d)
    if (dd == 0.0) continue;
    grad[t.couple.u] += dd * distance_gradient(emb.space, a, b);
    grad[t.couple.v] += dd * distance_gradient(emb.space, b, a);
  }
  return grad;
}

// One normalized step: the fastest-moving entity travels `step`.
bool take_step(Embedding& emb, const std::vector<Eigen::VectorXd>& grad, double step) {
  double gmax = 0.0;
  for (std::size_t v = 0; v < emb.size(); ++v)
    gmax = std::max(gmax, riemannian_grad_norm(emb.space, emb.points[v], grad[v]));
  if (!std::isfinite(gmax)) throw OptimizerError("non-finite gradient");
  if (gmax == 0.0) return false;
  for (std::size_t v = 0; v < emb.size(); ++v)
    emb.points[v] = riemannian_step(emb.space, emb.points[v], grad[v] / gmax, step);
  return true;
}

}  // namespace

LossObjective LossObjective::empirical(const Dataset& data, double clip_M) {
  if (data.items.empty()) throw ValidationError("training data must be non-empty");
  return aggregate(data, std::vector<double>(data.items.size(), 1.0 / static_cast<double>(data.items.size())), clip_M);
}

LossObjective LossObjective::rademacher(const Dataset& data, const std::vector<int>& signs, double clip_M) {
  if (data.items.empty() || signs.size() != data.items.size())
    throw ValidationError("need one Rademacher sign per sample");
  std::vector<double> w(signs.size());
  for (std::size_t s = 0; s < signs.size(); ++s) w[s] = -static_cast<double>(signs[s]) / static_cast<double>(signs.size());
  return aggregate(data, w, clip_M);
}

double LossObjective::value(const Embedding& emb, const GFunc& g) const {
  double total = 0.0;
  for (const auto& t : terms) {
    const double h = g.score(distance(emb.space, emb.points[t.couple.u], emb.points[t.couple.v]));
    if (t.w_pos != 0.0) total += t.w_pos * clipped_hinge(1, h, clip_M);
    if (t.w_neg != 0.0) total += t.w_neg * clipped_hinge(-1, h, clip_M);
  }
  return total;
}

std::vector<Eigen::VectorXd> LossObjective::gradient(const Embedding& emb, const GFunc& g) const {
  return objective_gradient(*this, emb, g, false);
}

std::vector<Eigen::VectorXd> LossObjective::surrogate_gradient(const Embedding& emb, const GFunc& g) const {
  return objective_gradient(*this, emb, g, true);
}

MinimizeResult minimize_objective(const SpaceSpec& space, const GFunc& g, const LossObjective& obj,
                                  const OptimizerOptions& opts, const std::vector<Embedding>& extra_starts) {
  space.validate();
  if (opts.restarts == 0) throw ValidationError("need at least one restart");
  if (space.kind == SpaceKind::hyperbolic && space.radius > kHyperbolicPrecisionRadius)
    throw ValidationError("hyperbolic radius above the precision envelope (R <= 15)");
  const double eta0 = opts.step_size > 0.0 ? opts.step_size : 0.1 * space.radius;
  // the clipped objective is flat wherever every active term sits past its
  // clip; a surrogate phase without those plateaus comes first
  const std::size_t surrogate_steps = (opts.steps * 3) / 5;

  MinimizeResult res;
  res.best_value = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < opts.restarts + extra_starts.size(); ++r) {
    Embedding emb{space, {}};
    if (r < opts.restarts) {
      Rng rng(stream_seed(opts.seed, r));
      emb.points.reserve(obj.vertex_count);
      for (std::size_t v = 0; v < obj.vertex_count; ++v)
        emb.points.push_back(sample_uniform_ball(space, opts.init_fraction * space.radius, rng));
    } else {
      emb = extra_starts[r - opts.restarts];
      if (emb.size() != obj.vertex_count) throw ValidationError("extra start has the wrong number of entities");
    }

    Embedding best = emb;
    double best_val = obj.value(emb, g);
    for (std::size_t t = 0; t < opts.steps; ++t) {
      const bool surrogate = t < surrogate_steps;
      const auto grad = surrogate ? obj.surrogate_gradient(emb, g) : obj.gradient(emb, g);
      if (!take_step(emb, grad, eta0 / std::sqrt(1.0 + static_cast<double>(t)))) {
        if (surrogate) {
          t = surrogate_steps - 1;
          continue;
        }
        break;
      }
      const double val = obj.value(emb, g);
      if (!std::isfinite(val)) throw OptimizerError("objective diverged in restart " + std::to_string(r));
      if (val < best_val) {
        best_val = val;
        best = emb;
      }
    }
    res.restart_values.push_back(best_val);
    res.restart_embeddings.push_back(best);
    if (best_val < res.best_value) {
      res.best_value = best_val;
      res.best = best;
      res.best_restart = r;
    }
  }
  return res;
}

std::optional<Embedding> majority_tree_start(const SpaceSpec& space, const GFunc& g, const Dataset& data) {
  if (space.kind != SpaceKind::hyperbolic || data.vertex_count < 2) return std::nullopt;
  const std::size_t n = data.vertex_count;
  std::vector<long> votes(couple_count(n), 0);
  for (const auto& s : data.items) votes[couple_index(n, s.couple.u, s.couple.v)] += s.label;
  std::vector<std::pair<Vertex, Vertex>> majority;
  for (std::size_t i = 0; i < votes.size(); ++i)
    if (votes[i] > 0) majority.emplace_back(couple_at(n, i).u, couple_at(n, i).v);
  const Graph mg(n, majority);

  // BFS spanning forest, each further component hung off vertex 0
  std::vector<std::pair<Vertex, Vertex>> tree_edges;
  std::vector<char> seen(n, 0);
  for (Vertex s = 0; s < n; ++s) {
    if (seen[s]) continue;
    if (s != 0) tree_edges.emplace_back(0, s);
    seen[s] = 1;
    std::deque<Vertex> queue{s};
    while (!queue.empty()) {
      const Vertex v = queue.front();
      queue.pop_front();
      for (Vertex w : mg.neighbors(v))
        if (!seen[w]) {
          seen[w] = 1;
          tree_edges.emplace_back(v, w);
          queue.push_back(w);
        }
    }
  }
  const Graph tree(n, tree_edges);

  // edge score g(tau) - g(nu) >= 1 when possible
  const double gt = g(g.tau_x);
  double nu = gt > 1.0 ? std::pow(gt - 1.0, 1.0 / g.q) : 0.5 * g.tau_x;
  if (!(nu > 0.0)) nu = 0.5 * g.tau_x;
  if (!(nu > 0.0)) return std::nullopt;
  SarkarEmbedding se = sarkar_tree_embedding(tree, nu);
  for (int shrink = 0; se.enclosing_radius > space.radius && shrink < 60; ++shrink) {
    nu *= 0.95 * space.radius / se.enclosing_radius;
    se = sarkar_tree_embedding(tree, nu);
  }
  if (se.enclosing_radius > space.radius) return std::nullopt;

  Embedding out{space, {}};
  for (const auto& p : se.embedding.points) {
    Point x = Point::Zero(static_cast<Eigen::Index>(space.ambient_dim()));
    x.head(3) = p.head(3);
    out.points.push_back(project_to_ball(space, x));
  }
  return out;
}

Embedding polish(const Embedding& start, const GFunc& g, const LossObjective& obj, std::size_t steps, double step0) {
  Embedding emb = start;
  Embedding best = start;
  double best_val = obj.value(emb, g);
  for (std::size_t t = 0; t < steps; ++t) {
    if (!take_step(emb, obj.gradient(emb, g), step0 / std::sqrt(1.0 + static_cast<double>(t)))) break;
    const double val = obj.value(emb, g);
    if (val < best_val) {
      best_val = val;
      best = emb;
    }
  }
  return best;
}

TrainResult cerm_train(const SpaceSpec& space, const GFunc& g, const Dataset& data, const OptimizerOptions& opts,
                       const LossSpec& loss) {
  g.validate(space);
  const auto obj = LossObjective::empirical(data, loss.clip_M);
  std::vector<Embedding> extra;
  if (opts.tree_start)
    if (auto start = majority_tree_start(space, g, data)) extra.push_back(std::move(*start));
  const auto res = minimize_objective(space, g, obj, opts, extra);
  TrainResult out;
  out.embedding = res.best;
  out.empirical_risk = res.best_value;
  out.restart_values = res.restart_values;
  const Embedding polished = polish(res.best, g, obj, opts.polish_steps, 0.01 * space.radius);
  const double best_found = std::min(res.best_value, obj.value(polished, g));
  out.eps_hat = std::max(0.0, out.empirical_risk - best_found);
  return out;
}

}  // namespace gembed
