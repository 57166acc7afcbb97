#include "srf/report.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "srf/version.hpp"

namespace srf {

nlohmann::json json_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double real_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw std::invalid_argument("real_from_json: unknown value '" + s + "'");
  }
  if (j.is_number()) return j.get<double>();
  throw std::invalid_argument("real_from_json: expected a number");
}

std::string laplacian_name(LaplacianVariant v) {
  return v == LaplacianVariant::Unnormalized ? "unnormalized" : "scaled";
}

LaplacianVariant laplacian_from_name(const std::string& s) {
  if (s == "unnormalized") return LaplacianVariant::Unnormalized;
  if (s == "scaled") return LaplacianVariant::Scaled;
  throw std::invalid_argument("unknown laplacian '" + s + "' (expected unnormalized or scaled)");
}

namespace {

std::string kind_name(CertificateKind k) {
  switch (k) {
    case CertificateKind::Pair: return "pair";
    case CertificateKind::Multi: return "multi";
    case CertificateKind::Pointwise: return "pointwise";
    case CertificateKind::LowerBound: return "lower_bound";
  }
  return "?";
}

CertificateKind kind_from_name(const std::string& s) {
  if (s == "pair") return CertificateKind::Pair;
  if (s == "multi") return CertificateKind::Multi;
  if (s == "pointwise") return CertificateKind::Pointwise;
  if (s == "lower_bound") return CertificateKind::LowerBound;
  throw std::invalid_argument("unknown certificate kind '" + s + "'");
}

}  // namespace

nlohmann::json certificate_to_json(const Certificate& c) {
  nlohmann::json j;
  j["version"] = kVersion;
  j["kind"] = kind_name(c.kind);
  j["threshold"] = json_real(c.threshold);
  j["eps"] = json_real(c.eps);
  j["k"] = c.k;
  j["laplacian"] = laplacian_name(c.variant);
  j["metric"] = metric_name(c.metric);
  nlohmann::json in = nlohmann::json::object();
  for (const auto& [name, v] : c.inputs) in[name] = json_real(v);
  j["inputs"] = in;
  j["delta"] = json_real(c.delta);
  j["effective_delta"] = json_real(c.effective_delta);
  j["vacuous"] = c.vacuous;
  j["degenerate"] = c.degenerate;
  j["clipped"] = c.clipped;
  j["empirical_mode"] = c.empirical_mode;
  j["certified_eps"] = json_real(c.certified_eps);
  j["feature_threshold"] = json_real(c.feature_threshold);
  return j;
}

Certificate certificate_from_json(const nlohmann::json& j) {
  Certificate c;
  c.kind = kind_from_name(j.at("kind").get<std::string>());
  c.threshold = real_from_json(j.at("threshold"));
  c.eps = real_from_json(j.at("eps"));
  c.k = j.at("k").get<std::size_t>();
  c.variant = laplacian_from_name(j.at("laplacian").get<std::string>());
  c.metric = metric_from_name(j.at("metric").get<std::string>());
  for (const auto& [name, v] : j.at("inputs").items()) c.inputs[name] = real_from_json(v);
  c.delta = real_from_json(j.at("delta"));
  c.effective_delta = real_from_json(j.at("effective_delta"));
  c.vacuous = j.at("vacuous").get<bool>();
  c.degenerate = j.at("degenerate").get<bool>();
  c.clipped = j.at("clipped").get<bool>();
  c.empirical_mode = j.at("empirical_mode").get<bool>();
  c.certified_eps = real_from_json(j.at("certified_eps"));
  c.feature_threshold = real_from_json(j.at("feature_threshold"));
  return c;
}

nlohmann::json feature_matrix_to_json(const Matrix& values) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < values.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < values.cols(); ++j) row.push_back(json_real(values(i, j)));
    rows.push_back(std::move(row));
  }
  nlohmann::json j;
  j["rows"] = values.rows();
  j["cols"] = values.cols();
  j["values"] = std::move(rows);
  return j;
}

Matrix feature_matrix_from_json(const nlohmann::json& j) {
  std::size_t rows = j.at("rows").get<std::size_t>();
  std::size_t cols = j.at("cols").get<std::size_t>();
  const nlohmann::json& values = j.at("values");
  if (values.size() != rows) throw std::invalid_argument("feature matrix: row count mismatch");
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (values[i].size() != cols)
      throw std::invalid_argument("feature matrix: column count mismatch");
    for (std::size_t c = 0; c < cols; ++c) m(i, c) = real_from_json(values[i][c]);
  }
  return m;
}

nlohmann::json attack_result_to_json(const AttackResult& r) {
  nlohmann::json j;
  j["displacement"] = json_real(r.displacement);
  j["trials_used"] = r.trials_used;
  j["within_ball"] = r.within_ball;
  j["best_perturbed"] = feature_matrix_to_json(r.best_perturbed);
  return j;
}

nlohmann::json accuracy_curve_to_json(const AccuracyCurve& c) {
  nlohmann::json eps = nlohmann::json::array();
  nlohmann::json acc = nlohmann::json::array();
  for (double e : c.eps) eps.push_back(json_real(e));
  for (double a : c.accuracy) acc.push_back(json_real(a));
  nlohmann::json j;
  j["eps"] = std::move(eps);
  j["accuracy"] = std::move(acc);
  return j;
}

nlohmann::json correlation_to_json(const CorrelationResult& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const ExperimentRow& row : r.rows) {
    nlohmann::json jr;
    jr["dataset"] = row.dataset;
    jr["bound"] = json_real(row.bound);
    jr["adv_error"] = json_real(row.adv_error);
    jr["valid"] = row.valid;
    jr["reason"] = row.reason;
    rows.push_back(std::move(jr));
  }
  nlohmann::json j;
  j["rows"] = std::move(rows);
  j["pearson"] = json_real(r.pearson);
  j["pearson_wo_max"] = json_real(r.pearson_wo_max);
  j["defined"] = r.defined;
  return j;
}

nlohmann::json spheres_report_to_json(const SpheresStructure& s, const SpheresFeatureReport& f) {
  nlohmann::json js;
  js["inner_tight"] = s.inner_tight;
  js["others_far"] = s.others_far;
  js["isolated_count"] = s.isolated_count;
  js["inner_one_component"] = s.inner_one_component;
  js["min_margin"] = json_real(s.min_margin);
  js["passes"] = s.passes();
  nlohmann::json jf;
  jf["inner_features"] = feature_matrix_to_json(f.inner_features);
  jf["outer_features"] = feature_matrix_to_json(f.outer_features);
  jf["inner_spread"] = json_real(f.inner_spread);
  jf["outer_spread"] = json_real(f.outer_spread);
  jf["separation"] = json_real(f.separation);
  jf["exceptional_count"] = f.exceptional_count;
  jf["max_attack_displacement"] = json_real(f.max_attack_displacement);
  jf["attacked_points"] = f.attacked_points;
  nlohmann::json j;
  j["structure"] = std::move(js);
  j["features"] = std::move(jf);
  return j;
}

void save_json(const nlohmann::json& j, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("save_json: cannot open '" + path + "' for writing");
  f << j.dump(2) << '\n';
  f.flush();
  if (!f.good()) throw std::runtime_error("save_json: write to '" + path + "' failed");
}

nlohmann::json load_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("load_json: cannot open '" + path + "'");
  return nlohmann::json::parse(f);
}

}
