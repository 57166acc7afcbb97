// Command-line driver: feature extraction, certification, attacks, the
// concentric-spheres study, and the bound-vs-robustness experiment. Every
// output embeds the resolved configuration and the toolkit version; re-runs
// with identical flags and seed are byte-identical regardless of --jobs.
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "srf/attack.hpp"
#include "srf/bench.hpp"
#include "srf/certify.hpp"
#include "srf/dataio.hpp"
#include "srf/features.hpp"
#include "srf/parallel.hpp"
#include "srf/report.hpp"
#include "srf/rng.hpp"
#include "srf/spheres.hpp"
#include "srf/version.hpp"

namespace {

using nlohmann::json;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct InputFlags {
  std::string input;
  std::string labels;
  std::size_t limit = 0;
  bool header = false;
  int label_column = -1;

  void add_to(CLI::App* cmd, bool required = true) {
    auto* opt = cmd->add_option("--input", input, "input dataset (.csv, or IDX image file)");
    if (required) opt->required();
    cmd->add_option("--labels", labels, "IDX label file (required for IDX input)");
    cmd->add_option("--limit", limit, "keep only the first N records");
    cmd->add_flag("--header", header, "CSV input has a header row");
    cmd->add_option("--label-column", label_column, "CSV column holding integer labels");
  }

  srf::Dataset load() const {
    // IDX files start with two zero bytes; CSV never does.
    std::ifstream probe(input, std::ios::binary);
    if (!probe) throw std::runtime_error("cannot open input '" + input + "'");
    char magic[2] = {1, 1};
    probe.read(magic, 2);
    probe.close();
    if (magic[0] == 0 && magic[1] == 0) {
      if (labels.empty())
        throw CLI::ValidationError("--input", "IDX input needs --labels <idx label file>");
      return srf::load_idx_pair(input, labels,
                                limit > 0 ? std::optional<std::size_t>(limit) : std::nullopt);
    }
    std::optional<std::size_t> lc;
    if (label_column >= 0) lc = static_cast<std::size_t>(label_column);
    srf::Dataset ds = srf::load_csv(input, lc, header);
    if (limit > 0 && ds.size() > limit) {
      srf::Matrix pts(limit, ds.dim());
      for (std::size_t i = 0; i < limit; ++i)
        for (std::size_t c = 0; c < ds.dim(); ++c) pts(i, c) = ds.points(i, c);
      std::optional<std::vector<int>> lab;
      if (ds.labels) lab = std::vector<int>(ds.labels->begin(), ds.labels->begin() + limit);
      ds = srf::make_dataset(std::move(pts), std::move(lab), ds.name);
    }
    return ds;
  }

  json config() const {
    json j;
    j["input"] = input;
    if (!labels.empty()) j["labels"] = labels;
    if (limit > 0) j["limit"] = limit;
    if (header) j["header"] = true;
    if (label_column >= 0) j["label_column"] = label_column;
    return j;
  }
};

struct GraphFlags {
  double threshold = 0.0;
  double gamma = 0.0;
  bool auto_threshold = false;
  bool has_threshold = false;
  bool has_gamma = false;

  void add_to(CLI::App* cmd, bool allow_weighted = true) {
    cmd->add_option("--threshold", threshold, "edge iff distance <= T")
        ->each([this](const std::string&) { has_threshold = true; });
    if (allow_weighted)
      cmd->add_option("--weighted", gamma, "Gaussian weights exp(-gamma d^2)")
          ->each([this](const std::string&) { has_gamma = true; });
    cmd->add_flag("--auto-threshold", auto_threshold,
                  "threshold = max over points of the nearest-neighbor distance");
  }

  void check() const {
    int picked = (has_threshold ? 1 : 0) + (has_gamma ? 1 : 0) + (auto_threshold ? 1 : 0);
    if (picked != 1)
      throw CLI::ValidationError(
          "graph", "pick exactly one of --threshold, --weighted, --auto-threshold");
  }

  // Resolves --auto-threshold against the dataset; returns the GraphSpec.
  srf::GraphSpec resolve(const srf::Dataset& ds, srf::MetricKind metric, double* resolved_t) {
    check();
    if (has_gamma) {
      if (resolved_t) *resolved_t = 0.0;
      return srf::GraphSpec::gaussian(gamma);
    }
    double t = threshold;
    if (auto_threshold) t = srf::auto_threshold(*srf::cached_distances(ds, metric));
    if (resolved_t) *resolved_t = t;
    return srf::GraphSpec::threshold(t);
  }

  json config(const srf::GraphSpec& spec) const {
    json j;
    if (spec.kind == srf::GraphKind::Gaussian)
      j["weighted"] = srf::json_real(spec.value);
    else
      j["threshold"] = srf::json_real(spec.value);
    if (auto_threshold) j["auto_threshold"] = true;
    return j;
  }
};

std::vector<double> parse_point(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    char* end = nullptr;
    double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str() || *end != '\0')
      throw CLI::ValidationError("--point", "expected comma-separated numbers, got '" + cell + "'");
    out.push_back(v);
  }
  if (out.empty()) throw CLI::ValidationError("--point", "empty point");
  return out;
}

void emit_json(const json& doc, const std::string& out_path) {
  if (out_path.empty())
    std::cout << doc.dump(2) << '\n';
  else
    srf::save_json(doc, out_path);
}

json wrap(json config, json result) {
  json doc;
  doc["version"] = srf::kVersion;
  doc["config"] = std::move(config);
  doc["result"] = std::move(result);
  return doc;
}

// Matrix payloads go to CSV: config comments first, then one row per line.
void write_csv(const std::string& out_path, const json& config,
               const std::vector<std::string>& extra_comments, const srf::Matrix& m) {
  std::ostringstream body;
  body << "# version " << srf::kVersion << "\n";
  body << "# config " << config.dump() << "\n";
  for (const std::string& line : extra_comments) body << "# " << line << "\n";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) body << ",";
      body << fmt17(m(i, c));
    }
    body << "\n";
  }
  if (out_path.empty()) {
    std::cout << body.str();
  } else {
    std::ofstream f(out_path);
    if (!f) throw std::runtime_error("cannot open '" + out_path + "' for writing");
    f << body.str();
    if (!f.good()) throw std::runtime_error("write to '" + out_path + "' failed");
  }
}

struct BudgetFlags {
  std::size_t trials = 1000;
  std::size_t refine = 10;
  std::uint64_t seed = 0;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--trials", trials, "candidate trials per search");
    cmd->add_option("--refine", refine, "greedy refinement sweeps");
    cmd->add_option("--seed", seed, "RNG seed");
  }

  srf::AttackBudget budget(unsigned jobs) const {
    srf::AttackBudget b;
    b.trials = trials;
    b.refinement_steps = refine;
    b.seed = seed;
    b.jobs = jobs;
    return b;
  }

  json config() const {
    json j;
    j["trials"] = trials;
    j["refine"] = refine;
    j["seed"] = seed;
    return j;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral robustness features: extraction, certificates, attacks"};
  app.require_subcommand(1);
  app.fallthrough();  // global options like --jobs may follow the subcommand
  unsigned jobs = 0;
  app.add_option("--jobs", jobs, "worker threads (0 = all cores); never changes results")
      ->capture_default_str();

  // ---- features ----
  auto* cmd_features = app.add_subcommand("features", "bottom nontrivial eigenvectors as CSV");
  InputFlags feat_in;
  GraphFlags feat_graph;
  feat_in.add_to(cmd_features);
  feat_graph.add_to(cmd_features);
  std::size_t feat_k = 1;
  std::string feat_metric = "l2", feat_variant = "unnormalized", feat_out;
  cmd_features->add_option("--k", feat_k, "number of feature columns");
  cmd_features->add_option("--metric", feat_metric, "l2, l1, or linf");
  cmd_features->add_option("--laplacian", feat_variant, "unnormalized or scaled");
  cmd_features->add_option("--out", feat_out, "output CSV path (default: stdout)");

  // ---- certify ----
  auto* cmd_certify = app.add_subcommand("certify", "dataset-level robustness certificate");
  InputFlags cert_in;
  GraphFlags cert_graph;
  cert_in.add_to(cmd_certify);
  cert_graph.add_to(cmd_certify, /*allow_weighted=*/false);
  double cert_eps = 0.0;
  std::size_t cert_k = 1;
  std::string cert_metric = "l2", cert_variant = "unnormalized", cert_out;
  cmd_certify->add_option("--eps", cert_eps, "perturbation radius")->required();
  cmd_certify->add_option("--k", cert_k, "feature count (1 = second eigenvector only)");
  cmd_certify->add_option("--metric", cert_metric, "l2, l1, or linf");
  cmd_certify->add_option("--laplacian", cert_variant, "unnormalized or scaled");
  cmd_certify->add_option("--out", cert_out, "output JSON path (default: stdout)");

  // ---- lower-bound ----
  auto* cmd_lower = app.add_subcommand(
      "lower-bound", "turn an (eps, delta) classifier guarantee into a feature guarantee");
  InputFlags low_in;
  low_in.add_to(cmd_lower);
  double low_eps = 0.0, low_delta = 0.0;
  std::string low_metric = "l2", low_out;
  cmd_lower->add_option("--eps", low_eps, "guarantee radius")->required();
  cmd_lower->add_option("--delta", low_delta, "guarantee displacement bound")->required();
  cmd_lower->add_option("--metric", low_metric, "l2, l1, or linf");
  cmd_lower->add_option("--out", low_out, "output JSON path (default: stdout)");

  // ---- pointwise ----
  auto* cmd_point = app.add_subcommand("pointwise", "certificate for one held-out point");
  InputFlags pt_in;
  GraphFlags pt_graph;
  pt_in.add_to(cmd_point);
  pt_graph.add_to(cmd_point, /*allow_weighted=*/false);
  std::string pt_point, pt_metric = "l2", pt_out;
  double pt_eps = 0.0;
  cmd_point->add_option("--point", pt_point, "held-out point, comma-separated")->required();
  cmd_point->add_option("--eps", pt_eps, "perturbation radius")->required();
  cmd_point->add_option("--metric", pt_metric, "l2, l1, or linf");
  cmd_point->add_option("--out", pt_out, "output JSON path (default: stdout)");

  // ---- attack ----
  auto* cmd_attack = app.add_subcommand("attack", "seeded perturbation search");
  InputFlags atk_in;
  GraphFlags atk_graph;
  BudgetFlags atk_budget;
  atk_in.add_to(cmd_attack);
  atk_graph.add_to(cmd_attack, /*allow_weighted=*/false);
  atk_budget.add_to(cmd_attack);
  std::string atk_point, atk_metric = "l2", atk_variant = "unnormalized", atk_out;
  double atk_eps = 0.0;
  cmd_attack->add_option("--eps", atk_eps, "perturbation radius")->required();
  cmd_attack->add_option("--point", atk_point, "attack this held-out point instead of the set");
  cmd_attack->add_option("--metric", atk_metric, "l2, l1, or linf");
  cmd_attack->add_option("--laplacian", atk_variant, "unnormalized or scaled");
  cmd_attack->add_option("--out", atk_out, "output JSON path (default: stdout)");

  // ---- spheres ----
  auto* cmd_spheres = app.add_subcommand("spheres", "concentric-spheres separation study");
  std::size_t sph_d = 500, sph_n = 50, sph_test = 100, sph_attack = 5;
  double sph_r = 1.3;
  std::uint64_t sph_seed = 0;
  BudgetFlags sph_budget;
  sph_budget.trials = 32;
  sph_budget.refine = 2;
  std::string sph_out, sph_csv;
  cmd_spheres->add_option("--d", sph_d, "ambient dimension");
  cmd_spheres->add_option("--n", sph_n, "points per sphere");
  cmd_spheres->add_option("--r", sph_r, "outer sphere radius (> 1)");
  cmd_spheres->add_option("--seed", sph_seed, "sampling seed");
  cmd_spheres->add_option("--test-points", sph_test, "test points per sphere");
  cmd_spheres->add_option("--attack-points", sph_attack, "attacked test points per sphere");
  cmd_spheres->add_option("--trials", sph_budget.trials, "attack trials per point");
  cmd_spheres->add_option("--refine", sph_budget.refine, "attack refinement sweeps");
  cmd_spheres->add_option("--out", sph_out, "output JSON path (default: stdout)");
  cmd_spheres->add_option("--csv", sph_csv, "also write test-point features as CSV");

  // ---- experiment ----
  auto* cmd_exp = app.add_subcommand(
      "experiment", "certificate bound vs adversarial error over a two-cluster family");
  std::string exp_seps = "4,6,8,10,12,14,16,18,20";
  std::size_t exp_nper = 40, exp_dim = 5;
  double exp_spread = 1.0, exp_eps = 0.5;
  std::string exp_metric = "l2", exp_out, exp_csv;
  BudgetFlags exp_budget;
  exp_budget.trials = 60;
  exp_budget.refine = 4;
  cmd_exp->add_option("--separations", exp_seps, "comma-separated cluster separations");
  cmd_exp->add_option("--n-per", exp_nper, "points per cluster");
  cmd_exp->add_option("--dim", exp_dim, "ambient dimension");
  cmd_exp->add_option("--spread", exp_spread, "cluster half-width");
  cmd_exp->add_option("--eps", exp_eps, "attack radius for the error estimate");
  cmd_exp->add_option("--metric", exp_metric, "l2, l1, or linf");
  cmd_exp->add_option("--trials", exp_budget.trials, "attack trials per point");
  cmd_exp->add_option("--refine", exp_budget.refine, "attack refinement sweeps");
  cmd_exp->add_option("--seed", exp_budget.seed, "generator and attack seed");
  cmd_exp->add_option("--out", exp_out, "output JSON path (default: stdout)");
  cmd_exp->add_option("--csv", exp_csv, "also write scatter rows as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    if (jobs > 0) srf::default_jobs() = jobs;

    if (*cmd_features) {
      srf::MetricKind metric = srf::metric_from_name(feat_metric);
      srf::LaplacianVariant variant = srf::laplacian_from_name(feat_variant);
      srf::Dataset ds = feat_in.load();
      double resolved_t = 0.0;
      srf::GraphSpec spec = feat_graph.resolve(ds, metric, &resolved_t);
      srf::FeatureMatrix fm = srf::robust_features_k(ds, spec, feat_k, metric, variant);
      json config = feat_in.config();
      config.update(feat_graph.config(spec));
      config["command"] = "features";
      config["k"] = feat_k;
      config["metric"] = feat_metric;
      config["laplacian"] = feat_variant;
      std::string eigs = "eigenvalues";
      for (double e : fm.eigenvalues) eigs += " " + fmt17(e);
      write_csv(feat_out, config, {eigs}, fm.values);
      return 0;
    }

    if (*cmd_certify) {
      srf::MetricKind metric = srf::metric_from_name(cert_metric);
      srf::LaplacianVariant variant = srf::laplacian_from_name(cert_variant);
      srf::Dataset ds = cert_in.load();
      double resolved_t = 0.0;
      srf::GraphSpec spec = cert_graph.resolve(ds, metric, &resolved_t);
      srf::Certificate c = srf::certify_multi(ds, resolved_t, cert_eps, cert_k, metric, variant);
      json config = cert_in.config();
      config.update(cert_graph.config(spec));
      config["command"] = "certify";
      config["eps"] = srf::json_real(cert_eps);
      config["k"] = cert_k;
      config["metric"] = cert_metric;
      config["laplacian"] = cert_variant;
      emit_json(wrap(config, srf::certificate_to_json(c)), cert_out);
      return 0;
    }

    if (*cmd_lower) {
      srf::MetricKind metric = srf::metric_from_name(low_metric);
      srf::Dataset ds = low_in.load();
      srf::Certificate c = srf::certify_lower_bound(ds, low_eps, low_delta, metric);
      json config = low_in.config();
      config["command"] = "lower-bound";
      config["eps"] = srf::json_real(low_eps);
      config["delta"] = srf::json_real(low_delta);
      config["metric"] = low_metric;
      emit_json(wrap(config, srf::certificate_to_json(c)), low_out);
      return 0;
    }

    if (*cmd_point) {
      srf::MetricKind metric = srf::metric_from_name(pt_metric);
      srf::Dataset ds = pt_in.load();
      std::vector<double> x = parse_point(pt_point);
      double resolved_t = 0.0;
      srf::GraphSpec spec = pt_graph.resolve(ds, metric, &resolved_t);
      srf::Certificate c = srf::certify_pointwise(ds, x, resolved_t, pt_eps, metric);
      srf::ExtendedFeature ext = srf::extend_feature(ds, x, resolved_t, metric);
      json config = pt_in.config();
      config.update(pt_graph.config(spec));
      config["command"] = "pointwise";
      config["eps"] = srf::json_real(pt_eps);
      config["metric"] = pt_metric;
      config["point"] = pt_point;
      json result;
      result["certificate"] = srf::certificate_to_json(c);
      result["extended_value"] = srf::json_real(ext.value);
      result["ambiguous_sign"] = ext.ambiguous_sign;
      emit_json(wrap(config, result), pt_out);
      return 0;
    }

    if (*cmd_attack) {
      srf::MetricKind metric = srf::metric_from_name(atk_metric);
      srf::LaplacianVariant variant = srf::laplacian_from_name(atk_variant);
      srf::Dataset ds = atk_in.load();
      double resolved_t = 0.0;
      srf::GraphSpec spec = atk_graph.resolve(ds, metric, &resolved_t);
      srf::AttackBudget budget = atk_budget.budget(jobs);
      srf::AttackResult r;
      if (atk_point.empty()) {
        r = srf::attack_dataset_feature(ds, resolved_t, atk_eps, metric, budget, variant);
      } else {
        std::vector<double> x = parse_point(atk_point);
        r = srf::attack_pointwise_feature(ds, x, resolved_t, atk_eps, metric, budget);
      }
      json config = atk_in.config();
      config.update(atk_graph.config(spec));
      config.update(atk_budget.config());
      config["command"] = "attack";
      config["eps"] = srf::json_real(atk_eps);
      config["metric"] = atk_metric;
      config["laplacian"] = atk_variant;
      if (!atk_point.empty()) config["point"] = atk_point;
      emit_json(wrap(config, srf::attack_result_to_json(r)), atk_out);
      return 0;
    }

    if (*cmd_spheres) {
      srf::SpheresConfig cfg;
      cfg.n_per_sphere = sph_n;
      cfg.d = sph_d;
      cfg.radius = sph_r;
      cfg.seed = sph_seed;
      srf::Dataset train = srf::sample_spheres(cfg);
      srf::SpheresStructure structure = srf::verify_structure(train, cfg);
      sph_budget.seed = sph_seed;
      srf::AttackBudget budget = sph_budget.budget(jobs);
      srf::SpheresFeatureReport report = srf::spheres_feature_test(
          train, cfg, sph_test, srf::mix_seed(sph_seed, 0x7e57), budget, sph_attack);
      json config;
      config["command"] = "spheres";
      config["d"] = sph_d;
      config["n"] = sph_n;
      config["r"] = srf::json_real(sph_r);
      config["seed"] = sph_seed;
      config["test_points"] = sph_test;
      config["attack_points"] = sph_attack;
      config.update(sph_budget.config());
      emit_json(wrap(config, srf::spheres_report_to_json(structure, report)), sph_out);
      if (!sph_csv.empty()) {
        // Inner test rows first, then outer, mirroring the sampler.
        srf::Matrix all(report.inner_features.rows() + report.outer_features.rows(),
                        report.inner_features.cols());
        for (std::size_t i = 0; i < report.inner_features.rows(); ++i)
          for (std::size_t c = 0; c < all.cols(); ++c) all(i, c) = report.inner_features(i, c);
        for (std::size_t i = 0; i < report.outer_features.rows(); ++i)
          for (std::size_t c = 0; c < all.cols(); ++c)
            all(report.inner_features.rows() + i, c) = report.outer_features(i, c);
        write_csv(sph_csv, config, {"rows inner then outer"}, all);
      }
      return 0;
    }

    if (*cmd_exp) {
      srf::MetricKind metric = srf::metric_from_name(exp_metric);
      std::vector<double> seps = parse_point(exp_seps);
      std::vector<srf::Dataset> family;
      for (std::size_t i = 0; i < seps.size(); ++i) {
        srf::Dataset ds = srf::gen_two_clusters(exp_nper, exp_dim, seps[i], exp_spread,
                                                srf::mix_seed(exp_budget.seed, i));
        ds.name = "sep_" + fmt17(seps[i]);
        family.push_back(std::move(ds));
      }
      srf::AttackBudget budget = exp_budget.budget(jobs);
      srf::CorrelationResult r = srf::correlation_experiment(family, exp_eps, budget, metric);
      json config;
      config["command"] = "experiment";
      config["separations"] = exp_seps;
      config["n_per"] = exp_nper;
      config["dim"] = exp_dim;
      config["spread"] = srf::json_real(exp_spread);
      config["eps"] = srf::json_real(exp_eps);
      config["metric"] = exp_metric;
      config.update(exp_budget.config());
      emit_json(wrap(config, srf::correlation_to_json(r)), exp_out);
      if (!exp_csv.empty()) {
        std::ostringstream body;
        body << "# version " << srf::kVersion << "\n";
        body << "# config " << config.dump() << "\n";
        body << "dataset,bound,adv_error,valid,reason\n";
        for (const srf::ExperimentRow& row : r.rows)
          body << row.dataset << "," << fmt17(row.bound) << "," << fmt17(row.adv_error) << ","
               << (row.valid ? "1" : "0") << "," << row.reason << "\n";
        std::ofstream f(exp_csv);
        if (!f) throw std::runtime_error("cannot open '" + exp_csv + "' for writing");
        f << body.str();
        if (!f.good()) throw std::runtime_error("write to '" + exp_csv + "' failed");
      }
      return 0;
    }

    std::cerr << "no subcommand selected\n";
    return 2;
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
