#include "gembed/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "gembed/bounds.hpp"
#include "gembed/cli_io.hpp"
#include "gembed/errors.hpp"
#include "gembed/experiment.hpp"
#include "gembed/rademacher.hpp"
#include "gembed/sarkar.hpp"
#include "gembed/star_packing.hpp"
#include "gembed/version.hpp"

namespace gembed::cli {

namespace {

namespace fs = std::filesystem;

struct GlobalOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::size_t threads = 1;
  std::string out_dir = "out";
};

struct Outputs {
  std::vector<std::pair<std::string, std::string>> files;
  std::string stdout_text;
};

std::string num(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

// JSON has no infinity; non-finite and overflowing values become strings
Json jnum(double x) { return std::isfinite(x) ? Json(x) : Json(num(x)); }

Json jnum(const ExtReal& x) {
  if (x.is_infinite() || x.overflows_double()) return x.to_string(8);
  return x.to_double();
}

Json load_config(const std::string& path) {
  if (path.empty()) throw ValidationError("--config is required for this subcommand");
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
}

double read_extended(ConfigReader& r, const std::string& key, double fallback) {
  if (!r.has(key)) {
    r.set_resolved(key, jnum(fallback));
    return fallback;
  }
  const Json& v = r.raw(key);
  double out = 0.0;
  if (v.is_number()) {
    out = v.get<double>();
  } else if (v.is_string() && v.get<std::string>() == "inf") {
    out = std::numeric_limits<double>::infinity();
  } else {
    throw ValidationError("config key '" + r.key_path(key) + "' must be a number or \"inf\"");
  }
  r.set_resolved(key, jnum(out));
  return out;
}

SpaceSpec parse_space(ConfigReader r) {
  SpaceSpec s;
  s.kind = space_kind_from_string(r.require<std::string>("kind"));
  s.dim = r.get<std::size_t>("dim", 2);
  s.radius = r.require<double>("radius");
  r.finish();
  s.validate();
  return s;
}

GFunc parse_g(ConfigReader r) {
  GFunc g;
  g.q = r.get<double>("q", 1.0);
  g.tau_x = r.require<double>("tau_x");
  r.finish();
  g.validate();
  return g;
}

Graph parse_graph(ConfigReader r) {
  Graph graph;
  if (r.has("path")) {
    const auto path = r.require<std::string>("path");
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read graph file '" + path + "'");
    graph = read_edge_list(in);
  } else {
    const auto gen = r.require<std::string>("generator");
    if (gen == "complete_ary_tree") {
      graph = complete_ary_tree(r.require<std::size_t>("arity"), r.require<std::size_t>("levels"));
    } else if (gen == "path") {
      graph = path_graph(r.require<std::size_t>("vertices"));
    } else if (gen == "star") {
      graph = star_graph(r.require<std::size_t>("leaves"));
    } else if (gen == "random_tree") {
      const auto n = r.require<std::size_t>("vertices");
      Rng rng(r.get<std::uint64_t>("seed", 1));
      graph = random_tree(n, rng);
    } else if (gen == "random_graph") {
      const auto n = r.require<std::size_t>("vertices");
      const auto p = r.require<double>("p");
      Rng rng(r.get<std::uint64_t>("seed", 1));
      graph = random_graph(n, p, rng);
    } else {
      throw ValidationError("unknown graph generator '" + gen + "'");
    }
  }
  r.finish();
  return graph;
}

CoupleMeasure parse_mu(ConfigReader& r, std::size_t n_couples) {
  if (!r.has("mu")) {
    r.set_resolved("mu", "uniform");
    return CoupleMeasure::uniform(n_couples);
  }
  const Json& v = r.raw("mu");
  if (v.is_array()) {
    std::vector<double> w;
    for (const auto& x : v) {
      if (!x.is_number()) throw ValidationError("config key 'mu' must hold numbers");
      w.push_back(x.get<double>());
    }
    if (w.size() != n_couples) throw ValidationError("config key 'mu' needs one weight per couple");
    r.set_resolved("mu", v);
    return CoupleMeasure(std::move(w));
  }
  if (v.is_string() && v.get<std::string>() == "uniform") {
    r.set_resolved("mu", "uniform");
    return CoupleMeasure::uniform(n_couples);
  }
  if (v.is_string() && v.get<std::string>() == "random") {
    r.set_resolved("mu", "random");
    Rng rng(r.get<std::uint64_t>("mu_seed", 1));
    return CoupleMeasure::random(n_couples, rng);
  }
  throw ValidationError("config key 'mu' must be \"uniform\", \"random\" or an array of weights");
}

OptimizerOptions parse_optimizer(ConfigReader& root, const OptimizerOptions& defaults) {
  if (!root.has("optimizer")) {
    root.set_resolved("optimizer", Json{{"restarts", defaults.restarts},
                                         {"steps", defaults.steps},
                                         {"step_size", defaults.step_size},
                                         {"polish_steps", defaults.polish_steps},
                                         {"init_fraction", defaults.init_fraction},
                                         {"tree_start", defaults.tree_start}});
    return defaults;
  }
  auto r = root.child("optimizer");
  OptimizerOptions o = defaults;
  o.restarts = r.get("restarts", o.restarts);
  o.steps = r.get("steps", o.steps);
  o.step_size = r.get("step_size", o.step_size);
  o.polish_steps = r.get("polish_steps", o.polish_steps);
  o.init_fraction = r.get("init_fraction", o.init_fraction);
  o.tree_start = r.get("tree_start", o.tree_start);
  r.finish();
  if (o.restarts == 0) throw ValidationError("optimizer.restarts must be >= 1");
  if (!(o.init_fraction > 0.0 && o.init_fraction <= 1.0)) throw ValidationError("optimizer.init_fraction must lie in (0, 1]");
  return o;
}

std::vector<double> parse_sample_sizes(ConfigReader& r, const std::string& key) {
  const Json& v = r.raw(key);
  std::vector<double> out;
  if (v.is_number()) {
    out.push_back(v.get<double>());
  } else if (v.is_array()) {
    for (const auto& x : v) {
      if (!x.is_number()) throw ValidationError("config key '" + key + "' must hold numbers");
      out.push_back(x.get<double>());
    }
  } else {
    throw ValidationError("config key '" + key + "' must be a number or an array");
  }
  if (out.empty()) throw ValidationError("config key '" + key + "' must be non-empty");
  for (double S : out)
    if (!(S >= 1.0) || !std::isfinite(S)) throw ValidationError("sample sizes must be finite and >= 1");
  r.set_resolved(key, v);
  return out;
}

std::uint64_t resolve_seed(ConfigReader& r, const GlobalOpts& g) {
  if (g.seed) {
    if (r.has("seed")) r.raw("seed");
    r.set_resolved("seed", *g.seed);
    return *g.seed;
  }
  return r.get<std::uint64_t>("seed", 1);
}

// Hinge constants for a xi-margin distribution: alpha = inf with c = 3 / xi,
// or alpha = 0 when xi = 0.
BoundInputs margin_inputs(double xi) {
  return xi > 0.0 ? hinge_params(std::numeric_limits<double>::infinity(), 3.0 / xi) : hinge_params(0.0, 1.0);
}

std::string resolved_text(const Json& resolved) { return resolved.dump(2) + "\n"; }

// ---------------------------------------------------------------- bounds

Outputs cmd_bounds(const Json& doc, const GlobalOpts& gopts) {
  Json resolved;
  ConfigReader r(doc, resolved);
  const auto n = r.require<std::size_t>("vertices");
  if (n < 2) throw ValidationError("vertices must be >= 2");
  const SpaceSpec space = parse_space(r.child("space"));
  const GFunc g = parse_g(r.child("g"));
  g.validate(space);
  const CoupleMeasure mu = parse_mu(r, couple_count(n));

  BoundInputs in;
  if (r.has("noise")) {
    auto nr = r.child("noise");
    const double alpha = read_extended(nr, "alpha", std::numeric_limits<double>::infinity());
    const double c = nr.require<double>("c");
    nr.finish();
    in = hinge_params(alpha, c);
  }
  const LambdaMode mode = lambda_mode_from_string(r.get<std::string>("lambda_mode", "worst_metric"));
  bool lambda_given = false;
  if (r.has("inputs")) {
    auto ir = r.child("inputs");
    in.lip_L = ir.get("lip_L", in.lip_L);
    in.sup_B = ir.get("sup_B", in.sup_B);
    in.sup_B0 = ir.get("sup_B0", in.sup_B0);
    in.var_const = ir.get("var_const", in.var_const);
    in.var_exp = ir.get("var_exp", in.var_exp);
    in.clip_M = ir.get("clip_M", in.clip_M);
    in.delta = ir.get("delta", in.delta);
    in.erm_eps = ir.get("erm_eps", in.erm_eps);
    if (ir.has("lambda_sq")) {
      in.lambda_sq = ir.require<double>("lambda_sq");
      lambda_given = true;
    }
    ir.finish();
  }
  if (!lambda_given) {
    LambdaEstimateOptions lo;
    if (gopts.seed) lo.seed = *gopts.seed;
    in.lambda_sq = lambda_sq(mode, space, g, n, lo);
  }
  in.validate();
  const double lip_g2 = r.get<double>("lip_g2", 1.0);
  const auto sizes = parse_sample_sizes(r, "S");
  r.finish();
  resolved["resolved_inputs"] = Json{{"lip_L", in.lip_L},         {"sup_B", in.sup_B},   {"sup_B0", in.sup_B0},
                                     {"var_const", in.var_const}, {"var_exp", in.var_exp}, {"clip_M", in.clip_M},
                                     {"delta", in.delta},         {"erm_eps", in.erm_eps}, {"lambda_sq", in.lambda_sq}};

  std::ostringstream csv;
  csv << csv_header_comment(resolved) << "\n";
  csv << "S,r0,r_full_solved,r_full_closed,minor_a,minor_b,total_local,total_global,old_bound,thresholds\n";
  for (double S : sizes) {
    const RateReport rep = bound_local(S, in, mu);
    std::string old = "n/a";
    if (n <= 2000) old = old_bound_rc(space.kind, space.radius, n, mu, S, lip_g2).rc.to_string(10);
    csv << num(S) << "," << num(rep.r0_solved) << "," << num(rep.r_full_solved) << "," << num(rep.r_full_closed) << ","
        << num(rep.minor_a) << "," << num(rep.minor_b) << "," << num(rep.total_local) << "," << num(rep.total_global)
        << "," << old << "," << rep.crossover_S.to_string(10) << "\n";
  }
  Outputs out;
  out.files.emplace_back("bounds.csv", csv.str());
  out.files.emplace_back("config.resolved.json", resolved_text(resolved));
  return out;
}

// ---------------------------------------------------------------- embed

Outputs cmd_embed(const Json& doc, const GlobalOpts& gopts) {
  const auto t0 = std::chrono::steady_clock::now();
  Json resolved;
  ConfigReader r(doc, resolved);
  const Graph graph = parse_graph(r.child("graph"));
  const std::size_t n = graph.vertex_count();
  SpaceSpec space;
  GFunc g;
  const bool calibrate = r.get<bool>("calibrate", false);
  if (calibrate) {
    if (r.has("space") || r.has("g")) throw ValidationError("calibrate excludes explicit space and g");
    const auto cal = calibrate_sarkar(graph, r.get<double>("q", 1.0));
    space = SpaceSpec{SpaceKind::hyperbolic, 2, cal.radius};
    g = cal.g;
  } else {
    space = parse_space(r.child("space"));
    g = parse_g(r.child("g"));
  }
  g.validate(space);
  if (space.kind == SpaceKind::hyperbolic && space.radius > kHyperbolicPrecisionRadius)
    throw ValidationError("hyperbolic radius above the precision envelope (R <= 15)");
  resolved["resolved_space"] = Json{{"kind", to_string(space.kind)}, {"dim", space.dim}, {"radius", space.radius}};
  resolved["resolved_g"] = Json{{"q", g.q}, {"tau_x", g.tau_x}};

  const double xi = r.get<double>("xi", 1.0);
  const CoupleMeasure mu = parse_mu(r, couple_count(n));
  const auto labels = true_labels(all_pairs_distances(graph));
  const auto dist = DistributionSpec::with_margin(n, mu, labels, xi);
  const std::uint64_t seed = resolve_seed(r, gopts);
  OptimizerOptions opt = parse_optimizer(r, {});
  opt.seed = seed;

  Dataset data;
  bool sampled = false;
  if (r.has("dataset")) {
    if (r.has("S")) throw ValidationError("give either S or dataset, not both");
    const auto path = r.require<std::string>("dataset");
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read dataset file '" + path + "'");
    data = read_dataset_csv(in, n);
  } else {
    const auto S = r.require<std::size_t>("S");
    data = sample_dataset(dist, S, stream_seed(seed, 0));
    sampled = true;
  }
  r.finish();

  const TrainResult trained = cerm_train(space, g, data, opt);
  const Risks risks = risks_exact(trained.embedding, g, dist);
  const auto margin = verify_margin_condition(trained.embedding, g, labels);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const std::string header = csv_header_comment(resolved);
  Outputs out;
  std::ostringstream emb_csv;
  emb_csv << header << "\n";
  write_embedding_csv(emb_csv, trained.embedding);
  out.files.emplace_back("embedding.csv", emb_csv.str());
  if (sampled) {
    std::ostringstream ds;
    ds << header << "\n";
    write_dataset_csv(ds, data);
    out.files.emplace_back("dataset.csv", ds.str());
    Json side{{"vertices", n}, {"S", data.size()}, {"seed", data.seed}, {"xi", xi}, {"mu", resolved["mu"]}};
    out.files.emplace_back("dataset.json", side.dump(2) + "\n");
  }
  Json report{{"risks",
               {{"expected", risks.expected},
                {"clipped_expected", risks.clipped_expected},
                {"bayes", risks.bayes},
                {"excess", risks.excess}}},
              {"empirical_risk", trained.empirical_risk},
              {"eps_hat", trained.eps_hat},
              {"restart_values", trained.restart_values},
              {"violations", margin.violations},
              {"wall_time_s", wall}};
  out.files.emplace_back("report.json", report.dump(2) + "\n");
  out.files.emplace_back("config.resolved.json", resolved_text(resolved));
  return out;
}

// ---------------------------------------------------------------- rc-estimate

Outputs cmd_rc_estimate(const Json& doc, const GlobalOpts& gopts) {
  Json resolved;
  ConfigReader r(doc, resolved);
  const Graph graph = parse_graph(r.child("graph"));
  const std::size_t n = graph.vertex_count();
  const SpaceSpec space = parse_space(r.child("space"));
  const GFunc g = parse_g(r.child("g"));
  g.validate(space);
  const double xi = r.get<double>("xi", 1.0);
  const CoupleMeasure mu = parse_mu(r, couple_count(n));
  const auto dist = DistributionSpec::with_margin(n, mu, true_labels(all_pairs_distances(graph)), xi);
  const auto S = r.require<std::size_t>("S");
  RcOptions opts;
  opts.trials = r.get<std::size_t>("trials", opts.trials);
  opts.seed = resolve_seed(r, gopts);
  opts.threads = gopts.threads;
  opts.local_radius = read_extended(r, "local_radius", std::numeric_limits<double>::infinity());
  opts.optimizer = parse_optimizer(r, {});
  const LambdaMode mode = lambda_mode_from_string(r.get<std::string>("lambda_mode", "worst_metric"));
  const double lip_g2 = r.get<double>("lip_g2", 1.0);
  r.finish();

  const RcEstimate est = rc_monte_carlo(dist, space, g, LossSpec{}, S, opts);
  BoundInputs in = margin_inputs(xi);
  in.lambda_sq = lambda_sq(mode, space, g, n);
  const double theorem = local_rc_bound_table(in, mu, {opts.local_radius}, static_cast<double>(S)).front().bound;
  std::optional<ExtReal> old;
  if (n <= 2000) old = old_bound_rc(space.kind, space.radius, n, mu, static_cast<double>(S), lip_g2).rc;
  const double slack = 3.0 * est.std_err;

  std::ostringstream csv;
  csv << csv_header_comment(resolved) << "\n";
  csv << "trial,sup_value\n";
  for (std::size_t i = 0; i < est.sup_values.size(); ++i) csv << est.trial_ids[i] << "," << num(est.sup_values[i]) << "\n";
  Json summary{{"mean", est.mean},
               {"std_err", est.std_err},
               {"trials", est.trials},
               {"dropped", est.dropped},
               {"lower_estimate", est.lower_estimate},
               {"lambda_sq", in.lambda_sq},
               {"theorem_bound", jnum(theorem)},
               {"within_theorem_bound", est.mean <= theorem + slack}};
  if (old) {
    summary["old_bound"] = jnum(*old);
    summary["old_bound_applicable"] = space.kind == SpaceKind::euclidean;
    summary["within_old_bound"] = ExtReal(est.mean - slack) <= *old;
  } else {
    summary["old_bound"] = nullptr;
  }
  Outputs out;
  out.files.emplace_back("rc.csv", csv.str());
  out.files.emplace_back("summary.json", summary.dump(2) + "\n");
  out.files.emplace_back("config.resolved.json", resolved_text(resolved));
  return out;
}

// ---------------------------------------------------------------- experiment

Outputs cmd_experiment(const Json& doc, const GlobalOpts& gopts) {
  Json resolved;
  ConfigReader r(doc, resolved);
  ExperimentConfig cfg;
  cfg.graph = parse_graph(r.child("graph"));
  cfg.xi = r.get("xi", cfg.xi);
  cfg.sample_sizes.clear();
  if (r.has("S")) {
    for (double S : parse_sample_sizes(r, "S")) cfg.sample_sizes.push_back(static_cast<std::size_t>(S));
  } else {
    cfg.sample_sizes = {100, 1000, 10000};
    r.set_resolved("S", cfg.sample_sizes);
  }
  cfg.trials = r.get("trials", cfg.trials);
  cfg.delta = r.get("delta", cfg.delta);
  cfg.q = r.get("q", cfg.q);
  cfg.lambda_mode = lambda_mode_from_string(r.get<std::string>("lambda_mode", "worst_metric"));
  cfg.optimizer = parse_optimizer(r, {});
  cfg.seed = resolve_seed(r, gopts);
  cfg.threads = gopts.threads;
  if (r.has("space") || r.has("g")) {
    cfg.space = parse_space(r.child("space"));
    cfg.g = parse_g(r.child("g"));
  }
  r.finish();

  const ExperimentReport rep = experiment_excess_risk(cfg);
  const std::string header = csv_header_comment(resolved);
  std::ostringstream trials;
  trials << header << "\n" << "S,trial,empirical_risk,excess,eps_hat\n";
  for (const auto& t : rep.trials)
    trials << t.S << "," << t.trial << "," << num(t.empirical_risk) << "," << num(t.excess) << "," << num(t.eps_hat)
           << "\n";
  std::ostringstream sweep;
  sweep << header << "\n" << "S,excess_mean,excess_quantile,max_eps_hat,bound,holds\n";
  bool all_hold = true;
  for (const auto& row : rep.rows) {
    sweep << row.S << "," << num(row.excess_mean) << "," << num(row.excess_quantile) << "," << num(row.max_eps_hat)
          << "," << num(row.bound) << "," << (row.holds ? 1 : 0) << "\n";
    all_hold = all_hold && row.holds;
  }
  Json summary{{"space", {{"kind", to_string(rep.space.kind)}, {"dim", rep.space.dim}, {"radius", rep.space.radius}}},
               {"g", {{"q", rep.g.q}, {"tau_x", rep.g.tau_x}}},
               {"lambda_sq", rep.inputs.lambda_sq},
               {"var_const", rep.inputs.var_const},
               {"var_exp", rep.inputs.var_exp},
               {"all_rows_hold", all_hold}};
  Outputs out;
  out.files.emplace_back("trials.csv", trials.str());
  out.files.emplace_back("sweep.csv", sweep.str());
  out.files.emplace_back("summary.json", summary.dump(2) + "\n");
  out.files.emplace_back("config.resolved.json", resolved_text(resolved));
  return out;
}

// ---------------------------------------------------------------- reproduce

// Example constants: complete 5-ary tree of height 4 (156 vertices) in a
// plane ball of radius 39.51, xi = 1/2, delta = 2^-10.
constexpr double kExampleRadius = 39.51;
constexpr double kExampleXi = 0.5;
constexpr std::size_t kExampleArity = 5;
constexpr std::size_t kExampleLevels = 4;
const double kExampleDelta = std::ldexp(1.0, -10);

Json thresholds_json(const CrossoverThresholds& t) {
  return Json{{"n0", jnum(t.n0)},
              {"n_full", jnum(t.n_full)},
              {"n_minor", jnum(t.n_minor)},
              {"threshold", jnum(t.threshold)},
              {"never_worse", t.never_worse}};
}

Json example43_block(const std::string& label, double v_min, std::size_t n, double lip_g2) {
  const std::size_t e2 = couple_count(n);
  const auto mu = CoupleMeasure::uniform(e2);
  return Json{
      {"label", label},
      {"v_min", v_min},
      {"q1", thresholds_json(crossover_thresholds(kExampleRadius, 1.0, e2, kExampleXi, v_min, kExampleDelta))},
      {"q2_printed_factor", thresholds_json(crossover_thresholds(kExampleRadius, 2.0, e2, kExampleXi, v_min,
                                                                 kExampleDelta, LipschitzFactor::printed))},
      {"q2_example_factor", thresholds_json(crossover_thresholds(kExampleRadius, 2.0, e2, kExampleXi, v_min,
                                                                 kExampleDelta, LipschitzFactor::example))},
      {"old_bound_threshold",
       jnum(old_bound_threshold(SpaceKind::hyperbolic, kExampleRadius, n, mu, kExampleXi, v_min, lip_g2))}};
}

Outputs cmd_reproduce(const std::string& target, const GlobalOpts& gopts, double v_min, double lip_g2) {
  Json resolved{{"target", target}, {"v_min", v_min}, {"lip_g2", lip_g2}};
  if (!gopts.config_path.empty()) {
    const Json doc = load_config(gopts.config_path);
    ConfigReader r(doc, resolved);
    v_min = r.get("v_min", v_min);
    lip_g2 = r.get("lip_g2", lip_g2);
    r.finish();
  }
  if (!(v_min > 0.0)) throw ValidationError("v_min must be > 0");
  if (!(lip_g2 > 0.0)) throw ValidationError("lip_g2 must be > 0");
  const Graph tree = complete_ary_tree(kExampleArity, kExampleLevels);
  const std::size_t n = tree.vertex_count();
  Json result{{"constants",
               {{"radius", kExampleRadius},
                {"xi", kExampleXi},
                {"delta", kExampleDelta},
                {"arity", kExampleArity},
                {"height", kExampleLevels},
                {"vertices", n},
                {"couples", couple_count(n)},
                {"lip_g2", lip_g2}}}};
  if (target == "example43") {
    const auto packing = max_disjoint_star_packing(tree, kPlanePackingNumber + 1);
    result["calibrations"] = Json::array(
        {example43_block("v_min flag (calibrated count)", v_min, n, lip_g2),
         example43_block("star-packing lower bound", static_cast<double>(packing.count), n, lip_g2)});
    result["star_packing"] = Json{{"k", kPlanePackingNumber + 1}, {"count", packing.count}, {"exact", packing.exact}};
  } else {
    const auto mu = CoupleMeasure::uniform(couple_count(n));
    const ExtReal old_t = old_bound_threshold(SpaceKind::hyperbolic, kExampleRadius, n, mu, kExampleXi, v_min, lip_g2);
    const ExtReal new_t =
        crossover_thresholds(kExampleRadius, 1.0, couple_count(n), kExampleXi, v_min, kExampleDelta).threshold;
    result["v_min"] = v_min;
    result["old_bound_threshold"] = jnum(old_t);
    result["old_bound_threshold_log10"] = old_t.log10_abs();
    result["new_threshold_q1"] = jnum(new_t);
    result["log10_ratio"] = old_t.log10_abs() - new_t.log10_abs();
  }
  Outputs out;
  const std::string text = result.dump(2) + "\n";
  out.files.emplace_back(target + ".json", text);
  out.files.emplace_back("config.resolved.json", resolved_text(resolved));
  out.stdout_text = text;
  return out;
}

void write_outputs(const Outputs& outputs, const std::string& dir) {
  fs::create_directories(dir);
  for (const auto& [name, content] : outputs.files) atomic_write(fs::path(dir) / name, content);
}

void emit_error(std::ostream& err, const std::string& kind, const std::string& type, const std::string& message) {
  err << Json{{"error", {{"kind", kind}, {"type", type}, {"message", message}}}}.dump() << "\n";
}

void add_global_flags(CLI::App* sub, GlobalOpts& g) {
  sub->add_option("--config", g.config_path, "JSON config file");
  sub->add_option("--seed", g.seed, "master seed (overrides the config)");
  sub->add_option("--out", g.out_dir, "output directory")->capture_default_str();
  sub->add_option("--threads", g.threads, "worker threads for trial-level parallelism")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Graph embedding by clipped ERM: bounds, training and Rademacher experiments", "gembed"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  GlobalOpts gopts;
  auto* bounds = app.add_subcommand("bounds", "tabulate excess-risk bounds over a grid of sample sizes");
  auto* embed = app.add_subcommand("embed", "train a clipped-ERM embedding");
  auto* rc = app.add_subcommand("rc-estimate", "Monte-Carlo Rademacher complexity against its bounds");
  auto* experiment = app.add_subcommand("experiment", "excess-risk sweep against bound_local");
  auto* reproduce = app.add_subcommand("reproduce", "recompute the worked example thresholds");
  std::string target;
  double v_min = 156.0;
  double lip_g2 = 1.0;
  reproduce->add_option("target", target, "example43 or remark62d")
      ->required()
      ->check(CLI::IsMember({"example43", "remark62d"}));
  reproduce->add_option("--vmin", v_min, "margin-violation count v_min")->capture_default_str();
  reproduce->add_option("--lip-g2", lip_g2, "Lipschitz constant of g2 for the prior-work bound")->capture_default_str();
  for (auto* sub : {bounds, embed, rc, experiment, reproduce}) add_global_flags(sub, gopts);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    emit_error(err, "usage", e.get_name(), e.what());
    return kExitValidation;
  }

  try {
    Outputs outputs;
    if (*reproduce) {
      outputs = cmd_reproduce(target, gopts, v_min, lip_g2);
    } else {
      const Json doc = load_config(gopts.config_path);
      if (*bounds) outputs = cmd_bounds(doc, gopts);
      if (*embed) outputs = cmd_embed(doc, gopts);
      if (*rc) outputs = cmd_rc_estimate(doc, gopts);
      if (*experiment) outputs = cmd_experiment(doc, gopts);
    }
    write_outputs(outputs, gopts.out_dir);
    out << outputs.stdout_text;
    return kExitOk;
  } catch (const ValidationError& e) {
    emit_error(err, "validation", "ValidationError", e.what());
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    emit_error(err, "validation", "invalid_argument", e.what());
    return kExitValidation;
  } catch (const NumericalError& e) {
    emit_error(err, "numerical", "NumericalError", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    emit_error(err, "numerical", "runtime_error", e.what());
    return kExitNumerical;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace gembed::cli
