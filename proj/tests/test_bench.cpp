#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "srf/bench.hpp"
#include "srf/dataio.hpp"
#include "srf/dataset.hpp"
#include "srf/features.hpp"
#include "srf/linalg.hpp"
#include "srf/metric.hpp"
#include "srf/rng.hpp"

using namespace srf;

namespace {

// External cross-entropy oracle for a trained head.
double logistic_loss(const LogisticModel& m, const Matrix& x, const std::vector<int>& y) {
  double loss = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double s = m.score(x.row(i));
    double p = 1.0 / (1.0 + std::exp(-s));
    p = std::min(1.0 - 1e-15, std::max(1e-15, p));
    loss += y[i] == 1 ? -std::log(p) : -std::log(1.0 - p);
  }
  return loss / static_cast<double>(x.rows());
}

double accuracy01(const LogisticModel& m, const Matrix& x, const std::vector<int>& y) {
  std::size_t hit = 0;
  for (std::size_t i = 0; i < x.rows(); ++i)
    if ((m.score(x.row(i)) > 0 ? 1 : 0) == y[i]) ++hit;
  return static_cast<double>(hit) / static_cast<double>(x.rows());
}

}  // namespace

TEST_CASE("logistic head separates separable one-dimensional features") {
  Matrix x(8, 1);
  std::vector<int> y;
  for (std::size_t i = 0; i < 8; ++i) {
    x(i, 0) = i < 4 ? -1.0 - 0.1 * static_cast<double>(i) : 1.0 + 0.1 * static_cast<double>(i);
    y.push_back(i < 4 ? 0 : 1);
  }
  LogisticModel m = train_logistic(x, y);
  CHECK(accuracy01(m, x, y) == 1.0);
  CHECK(m.weights.size() == 1);
  CHECK(m.weights[0] > 0.0);
}

TEST_CASE("constant features make the head predict the majority class") {
  Matrix x(10, 2);  // all-zero features carry no signal
  std::vector<int> y{1, 1, 1, 1, 1, 1, 1, 0, 0, 0};
  LogisticModel m = train_logistic(x, y);
  // Weights stay zero (no gradient through identical rows); the bias moves
  // toward the 70 percent class.
  CHECK(m.weights[0] == 0.0);
  CHECK(m.weights[1] == 0.0);
  CHECK(m.bias > 0.0);
  CHECK(accuracy01(m, x, y) == doctest::Approx(0.7));
}

TEST_CASE("training loss is non-increasing across epochs") {
  SplitMix64 rng(88);
  Matrix x(20, 2);
  std::vector<int> y;
  for (std::size_t i = 0; i < 20; ++i) {
    int label = i % 2 == 0 ? 0 : 1;
    y.push_back(label);
    x(i, 0) = (label == 0 ? -0.5 : 0.5) + rng.uniform(-0.7, 0.7);
    x(i, 1) = rng.uniform(-1.0, 1.0);
  }
  double prev = 1e300;
  for (std::size_t epochs : {1ul, 2ul, 5ul, 10ul, 20ul, 40ul}) {
    LogisticModel m = train_logistic(x, y, epochs, 0.1);
    double loss = logistic_loss(m, x, y);
    CHECK(loss <= prev + 1e-12);
    prev = loss;
  }
}

TEST_CASE("spectral features of two clusters are perfectly classifiable") {
  Dataset ds = gen_two_clusters(20, 3, 10.0, 0.5, 7);
  FeatureMatrix fm = robust_features_k(ds, GraphSpec::threshold(3.0), 1, MetricKind::L2);
  LogisticModel m = train_logistic(fm.values, *ds.labels);
  CHECK(accuracy01(m, fm.values, *ds.labels) == 1.0);
}

TEST_CASE("one-vs-rest handles three classes and rejects degenerate label sets") {
  Matrix x(9, 2);
  std::vector<int> y;
  for (std::size_t i = 0; i < 9; ++i) {
    int c = static_cast<int>(i / 3);
    y.push_back(c);
    x(i, 0) = static_cast<double>(c) * 2.0 + 0.1 * static_cast<double>(i % 3);
    x(i, 1) = static_cast<double>(c % 2);
  }
  OneVsRestModel m = train_one_vs_rest(x, y);
  REQUIRE(m.classes.size() == 3);
  CHECK(std::is_sorted(m.classes.begin(), m.classes.end()));
  std::size_t hit = 0;
  for (std::size_t i = 0; i < 9; ++i)
    if (m.predict(x.row(i)) == y[i]) ++hit;
  CHECK(hit == 9);

  std::vector<int> constant(9, 4);
  CHECK_THROWS_AS(train_one_vs_rest(x, constant), std::invalid_argument);
  CHECK_THROWS_AS(train_logistic(x, constant), std::invalid_argument);
}

TEST_CASE("pipeline accuracy curve starts clean and never increases") {
  Dataset all = gen_two_clusters(15, 2, 12.0, 0.6, 40);  // 30 points total
  // Even rows train, odd rows test.
  Matrix train_pts(15, 2), test_pts(15, 2);
  std::vector<int> train_y, test_y;
  for (std::size_t i = 0; i < 30; ++i) {
    Matrix& m = i % 2 == 0 ? train_pts : test_pts;
    std::vector<int>& yy = i % 2 == 0 ? train_y : test_y;
    m(i / 2, 0) = all.points(i, 0);
    m(i / 2, 1) = all.points(i, 1);
    yy.push_back((*all.labels)[i]);
  }
  Dataset train = make_dataset(std::move(train_pts), train_y);
  Dataset test = make_dataset(std::move(test_pts), test_y);

  PipelineConfig cfg;
  cfg.spec = GraphSpec::threshold(4.0);
  cfg.k = 1;

  AttackBudget budget;
  budget.trials = 40;
  budget.refinement_steps = 1;
  budget.seed = 2;

  SUBCASE("zero eps equals clean accuracy and the curve is monotone") {
    std::vector<double> grid{0.0, 0.3, 0.6, 1.2, 2.4};
    AccuracyCurve curve = eval_pipeline(train, test, cfg, grid, budget);
    REQUIRE(curve.eps == grid);
    REQUIRE(curve.accuracy.size() == grid.size());
    CHECK(curve.accuracy[0] >= 0.9);  // clean separation at this spread
    for (std::size_t i = 1; i < curve.accuracy.size(); ++i)
      CHECK(curve.accuracy[i] <= curve.accuracy[i - 1]);
    for (double a : curve.accuracy) {
      CHECK(a >= 0.0);
      CHECK(a <= 1.0);
    }
  }

  SUBCASE("an unsorted grid is rejected") {
    std::vector<double> grid{0.5, 0.2};
    CHECK_THROWS_AS(eval_pipeline(train, test, cfg, grid, budget), std::invalid_argument);
  }

  SUBCASE("gaussian-graph features evaluate end to end") {
    PipelineConfig gcfg;
    gcfg.spec = GraphSpec::gaussian(0.1);
    gcfg.variant = LaplacianVariant::Scaled;
    gcfg.k = 2;
    std::vector<double> grid{0.0, 0.4};
    AccuracyCurve curve = eval_pipeline(train, test, gcfg, grid, budget);
    CHECK(curve.accuracy[0] >= 0.9);
    CHECK(curve.accuracy[1] <= curve.accuracy[0]);
  }
}

TEST_CASE("pearson correlation closed forms") {
  std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  std::vector<double> up{2.0, 4.0, 6.0, 8.0};
  std::vector<double> down{8.0, 6.0, 4.0, 2.0};
  CHECK(pearson(x, up) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pearson(x, down) == doctest::Approx(-1.0).epsilon(1e-12));
  std::vector<double> flat{5.0, 5.0, 5.0, 5.0};
  CHECK(pearson(x, flat) == 0.0);  // zero variance: defined as 0
  // Hand-computed: x vs y = {1, 3, 2, 4}: r = 0.8.
  std::vector<double> y{1.0, 3.0, 2.0, 4.0};
  CHECK(pearson(x, y) == doctest::Approx(0.8).epsilon(1e-12));
  std::vector<double> bad{1.0};
  CHECK_THROWS_AS(pearson(x, bad), std::invalid_argument);
}

TEST_CASE("correlation study emits one row per dataset and is reproducible") {
  std::vector<Dataset> family;
  for (std::uint64_t i = 0; i < 4; ++i) {
    double sep = 4.0 + 3.0 * static_cast<double>(i);
    Dataset ds = gen_two_clusters(24, 3, sep, 1.0, mix_seed(77, i));
    ds.name = "fam_" + std::to_string(i);
    family.push_back(std::move(ds));
  }

  AttackBudget budget;
  budget.trials = 30;
  budget.refinement_steps = 1;
  budget.seed = 9;

  CorrelationResult r1 = correlation_experiment(family, 0.5, budget);
  REQUIRE(r1.rows.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(r1.rows[i].dataset == family[i].name);
    if (r1.rows[i].valid) {
      CHECK(std::isfinite(r1.rows[i].bound));
      CHECK(r1.rows[i].adv_error >= 0.0);
      CHECK(r1.rows[i].adv_error <= 1.0);
    } else {
      CHECK(!r1.rows[i].reason.empty());
    }
  }

  CorrelationResult r2 = correlation_experiment(family, 0.5, budget);
  REQUIRE(r2.rows.size() == r1.rows.size());
  CHECK(r2.pearson == r1.pearson);
  CHECK(r2.pearson_wo_max == r1.pearson_wo_max);
  CHECK(r2.defined == r1.defined);
  for (std::size_t i = 0; i < r1.rows.size(); ++i) {
    CHECK(r2.rows[i].bound == r1.rows[i].bound);
    CHECK(r2.rows[i].adv_error == r1.rows[i].adv_error);
  }
}

TEST_CASE("correlation is undefined below three valid rows") {
  std::vector<Dataset> family;
  for (std::uint64_t i = 0; i < 2; ++i)
    family.push_back(gen_two_clusters(20, 2, 8.0, 1.0, i));
  AttackBudget budget;
  budget.trials = 10;
  budget.refinement_steps = 0;
  budget.seed = 1;
  CorrelationResult r = correlation_experiment(family, 0.5, budget);
  CHECK(!r.defined);
  CHECK(r.rows.size() == 2);
}
