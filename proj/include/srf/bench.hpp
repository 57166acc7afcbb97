#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "srf/attack.hpp"
#include "srf/dataset.hpp"
#include "srf/features.hpp"

namespace srf {

// Binary logistic regression trained by full-batch gradient descent from a
// zero initialization; deterministic. Multi-class wraps one-vs-rest.
struct LogisticModel {
  std::vector<double> weights;
  double bias = 0.0;

  double score(std::span<const double> x) const;
};

LogisticModel train_logistic(const Matrix& features, const std::vector<int>& labels01,
                             std::size_t epochs = 500, double lr = 0.5);

struct OneVsRestModel {
  std::vector<int> classes;
  std::vector<LogisticModel> models;

  int predict(std::span<const double> x) const;
};

OneVsRestModel train_one_vs_rest(const Matrix& features, const std::vector<int>& labels,
                                 std::size_t epochs = 500, double lr = 0.5);

// Spectral-feature classifier: graph on the training set, feature columns
// v_2..v_{k+1}, logistic head; held-out points are featurized by projection
// against the training graph (inductive evaluation).
struct PipelineConfig {
  GraphSpec spec;
  LaplacianVariant variant = LaplacianVariant::Unnormalized;
  std::size_t k = 1;
  MetricKind metric = MetricKind::L2;
  std::size_t epochs = 500;
  double lr = 0.5;
};

struct AccuracyCurve {
  std::vector<double> eps;
  std::vector<double> accuracy;  // adversarial accuracy; index matches eps
};

// Accuracy at eps = attacker picks any x' within eps of the test point; a
// point counts as correct only if no tried perturbation (including x itself)
// is misclassified. The eps grid is evaluated in ascending order and a break
// found at a smaller radius carries into every larger one, so the curve never
// increases.
AccuracyCurve eval_pipeline(const Dataset& train, const Dataset& test, const PipelineConfig& cfg,
                            const std::vector<double>& eps_grid, const AttackBudget& budget);

// One dataset of a certificate-versus-attack study: x = spectral bound
// sqrt((l2+ - l2-) / (l3- - l2-)) with thresholds T = auto_threshold and
// T + 2 on scaled Laplacians, y = adversarial error of the pipeline at eps.
struct ExperimentRow {
  std::string dataset;
  double bound = 0.0;
  double adv_error = 0.0;
  bool valid = true;
  std::string reason;
};

struct CorrelationResult {
  std::vector<ExperimentRow> rows;
  double pearson = 0.0;
  double pearson_wo_max = 0.0;  // recomputed with the largest-bound row removed
  bool defined = false;         // false when fewer than 3 valid rows or zero variance
};

CorrelationResult correlation_experiment(const std::vector<Dataset>& family, double eps,
                                         const AttackBudget& budget,
                                         MetricKind metric = MetricKind::L2);

double pearson(const std::vector<double>& x, const std::vector<double>& y);

}
