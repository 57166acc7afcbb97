#include "srf/bench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "srf/certify.hpp"
#include "srf/eigensolver.hpp"
#include "srf/parallel.hpp"
#include "srf/rng.hpp"
#include "srf/tolerances.hpp"
#include "search_detail.hpp"

namespace srf {

double LogisticModel::score(std::span<const double> x) const {
  if (x.size() != weights.size()) throw std::invalid_argument("score: feature size mismatch");
  return dot(weights, x) + bias;
}

LogisticModel train_logistic(const Matrix& features, const std::vector<int>& labels01,
                             std::size_t epochs, double lr) {
  std::size_t n = features.rows();
  std::size_t k = features.cols();
  if (n == 0 || k == 0) throw std::invalid_argument("train_logistic: empty feature matrix");
  if (labels01.size() != n) throw std::invalid_argument("train_logistic: label count mismatch");
  bool has0 = false, has1 = false;
  for (int y : labels01) {
    if (y == 0)
      has0 = true;
    else if (y == 1)
      has1 = true;
    else
      throw std::invalid_argument("train_logistic: labels must be 0 or 1");
  }
  if (!has0 || !has1) throw std::invalid_argument("train_logistic: need both classes");

  LogisticModel m;
  m.weights.assign(k, 0.0);
  std::vector<double> gw(k);
  for (std::size_t e = 0; e < epochs; ++e) {
    std::fill(gw.begin(), gw.end(), 0.0);
    double gb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double z = m.score(features.row(i));
      double p = 1.0 / (1.0 + std::exp(-z));
      double g = p - static_cast<double>(labels01[i]);
      for (std::size_t c = 0; c < k; ++c) gw[c] += g * features(i, c);
      gb += g;
    }
    for (std::size_t c = 0; c < k; ++c) m.weights[c] -= lr * gw[c] / static_cast<double>(n);
    m.bias -= lr * gb / static_cast<double>(n);
  }
  return m;
}

int OneVsRestModel::predict(std::span<const double> x) const {
  if (classes.empty()) throw std::logic_error("predict: untrained model");
  std::size_t best = 0;
  double best_score = models[0].score(x);
  for (std::size_t c = 1; c < classes.size(); ++c) {
    double s = models[c].score(x);
    if (s > best_score) {  // ties keep the smallest class
      best_score = s;
      best = c;
    }
  }
  return classes[best];
}

OneVsRestModel train_one_vs_rest(const Matrix& features, const std::vector<int>& labels,
                                 std::size_t epochs, double lr) {
  if (labels.size() != features.rows())
    throw std::invalid_argument("train_one_vs_rest: label count mismatch");
  std::set<int> uniq(labels.begin(), labels.end());
  if (uniq.size() < 2) throw std::invalid_argument("train_one_vs_rest: need at least 2 classes");
  OneVsRestModel m;
  m.classes.assign(uniq.begin(), uniq.end());
  for (int c : m.classes) {
    std::vector<int> binary(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) binary[i] = labels[i] == c ? 1 : 0;
    m.models.push_back(train_logistic(features, binary, epochs, lr));
  }
  return m;
}

AccuracyCurve eval_pipeline(const Dataset& train, const Dataset& test, const PipelineConfig& cfg,
                            const std::vector<double>& eps_grid, const AttackBudget& budget) {
  if (!train.labels || !test.labels)
    throw std::invalid_argument("eval_pipeline: both splits need labels");
  if (eps_grid.empty()) throw std::invalid_argument("eval_pipeline: empty eps grid");
  for (std::size_t i = 0; i < eps_grid.size(); ++i) {
    if (eps_grid[i] < 0) throw std::invalid_argument("eval_pipeline: negative eps");
    if (i > 0 && eps_grid[i] < eps_grid[i - 1])
      throw std::invalid_argument("eval_pipeline: eps grid must be ascending");
  }

  FeatureMatrix fm = robust_features_k(train, cfg.spec, cfg.k, cfg.metric, cfg.variant);
  OneVsRestModel model = train_one_vs_rest(fm.values, *train.labels, cfg.epochs, cfg.lr);

  auto featurize = [&](std::span<const double> x) {
    std::vector<double> f = extend_features_k(train, x, cfg.spec, cfg.k, cfg.metric, cfg.variant);
    return std::vector<double>(f.begin() + 1, f.end());  // drop the kernel slot
  };

  std::size_t m = test.size();
  unsigned jobs = budget.jobs == 0 ? default_jobs() : budget.jobs;
  std::vector<char> broken(m, 0);
  // The clean point is always one of the attacker's candidates: a point the
  // model already misclassifies is broken at every radius.
  parallel_for(m, jobs, [&](std::size_t i) {
    broken[i] = model.predict(featurize(test.point(i))) != (*test.labels)[i] ? 1 : 0;
  });

  const Dataset* toggle_train = cfg.spec.kind == GraphKind::Threshold ? &train : nullptr;
  double toggle_threshold = cfg.spec.kind == GraphKind::Threshold ? cfg.spec.value : 0.0;

  AccuracyCurve curve;
  for (double eps : eps_grid) {
    if (eps > 0) {
      parallel_for(m, jobs, [&](std::size_t i) {
        if (broken[i]) return;  // a break at a smaller radius carries forward
        int want = (*test.labels)[i];
        auto objective = [&](std::span<const double> y) {
          return model.predict(featurize(y)) != want ? 1.0 : 0.0;
        };
        AttackBudget b = budget;
        b.seed = mix_seed(budget.seed, i);
        detail::PointSearchOutcome r = detail::search_point(
            test.point(i), objective, eps, cfg.metric, toggle_train, toggle_threshold, b, 0.5);
        if (r.best_obj >= 0.5) broken[i] = 1;
      });
    }
    std::size_t cnt = 0;
    for (char b : broken) cnt += b;
    curve.eps.push_back(eps);
    curve.accuracy.push_back(1.0 - static_cast<double>(cnt) / static_cast<double>(m));
  }
  return curve;
}

// Plain sample correlation; 0 when either side has no variance.
double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
  if (x.size() < 2) throw std::invalid_argument("pearson: need at least 2 samples");
  double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0 || syy <= 0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

namespace {

Dataset take_rows(const Dataset& ds, bool even) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < ds.size(); ++i)
    if ((i % 2 == 0) == even) idx.push_back(i);
  Matrix pts(idx.size(), ds.dim());
  std::vector<int> labels(idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r) {
    for (std::size_t c = 0; c < ds.dim(); ++c) pts(r, c) = ds.points(idx[r], c);
    labels[r] = (*ds.labels)[idx[r]];
  }
  return make_dataset(std::move(pts), std::move(labels),
                      ds.name + (even ? "/train" : "/test"));
}

double correlation_over(const std::vector<ExperimentRow>& rows, bool drop_max, bool* ok) {
  std::vector<double> xs, ys;
  std::size_t arg_max = 0;
  double max_bound = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> valid;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].valid) {
      valid.push_back(i);
      if (rows[i].bound > max_bound) {
        max_bound = rows[i].bound;
        arg_max = i;
      }
    }
  for (std::size_t i : valid) {
    if (drop_max && i == arg_max) continue;
    xs.push_back(rows[i].bound);
    ys.push_back(rows[i].adv_error);
  }
  if (ok) *ok = false;
  if (xs.size() < 3) return 0.0;
  double r = pearson(xs, ys);
  double sxx = 0.0, syy = 0.0, mx = 0.0, my = 0.0;
  for (double v : xs) mx += v;
  for (double v : ys) my += v;
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (ok) *ok = sxx > 0 && syy > 0;
  return r;
}

}  // namespace

CorrelationResult correlation_experiment(const std::vector<Dataset>& family, double eps,
                                         const AttackBudget& budget, MetricKind metric) {
  if (eps <= 0) throw std::invalid_argument("correlation_experiment: eps must be positive");
  CorrelationResult out;
  for (std::size_t idx = 0; idx < family.size(); ++idx) {
    const Dataset& ds = family[idx];
    ExperimentRow row;
    row.dataset = ds.name.empty() ? "dataset_" + std::to_string(idx) : ds.name;
    try {
      if (!ds.labels) throw std::invalid_argument("dataset has no labels");
      auto dm = cached_distances(ds, metric);
      double t_lo = auto_threshold(*dm);
      double t_hi = t_lo + 2.0;
      SpectralDecomposition lo =
          eigh(laplacian(threshold_graph(*dm, t_lo), LaplacianVariant::Scaled).m);
      SpectralDecomposition hi =
          eigh(laplacian(threshold_graph(*dm, t_hi), LaplacianVariant::Scaled).m);
      double den = lo.eigenvalues[2] - lo.eigenvalues[1];
      if (den <= tolerances().gap_vacuous) {
        row.valid = false;
        row.reason = "vacuous spectral gap";
      } else {
        row.bound = std::sqrt(std::max(0.0, hi.eigenvalues[1] - lo.eigenvalues[1]) / den);
        PipelineConfig cfg;
        cfg.spec = GraphSpec::threshold(t_lo + 1.0);
        cfg.variant = LaplacianVariant::Scaled;
        cfg.k = 1;
        cfg.metric = metric;
        Dataset tr = take_rows(ds, true);
        Dataset te = take_rows(ds, false);
        AccuracyCurve curve = eval_pipeline(tr, te, cfg, {eps}, budget);
        row.adv_error = 1.0 - curve.accuracy[0];
      }
    } catch (const std::exception& e) {
      row.valid = false;
      row.reason = e.what();
    }
    out.rows.push_back(std::move(row));
  }
  bool ok_full = false, ok_wo = false;
  out.pearson = correlation_over(out.rows, false, &ok_full);
  out.pearson_wo_max = correlation_over(out.rows, true, &ok_wo);
  out.defined = ok_full;
  return out;
}

}
