#include "srf/attack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "srf/eigensolver.hpp"
#include "srf/parallel.hpp"
#include "srf/rng.hpp"
#include "srf/tolerances.hpp"
#include "search_detail.hpp"

namespace srf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Projects y onto the eps-ball around x, then shrinks the step until the
// metric distance is really <= eps; within_ball holds with no tolerance.
void project_ball(std::vector<double>& y, std::span<const double> x, double eps,
                  MetricKind metric) {
  std::size_t d = y.size();
  if (metric == MetricKind::LInf) {
    for (std::size_t i = 0; i < d; ++i) y[i] = std::clamp(y[i], x[i] - eps, x[i] + eps);
    return;
  }
  if (metric == MetricKind::L1) {
    double sum = 0.0;
    for (std::size_t i = 0; i < d; ++i) sum += std::abs(y[i] - x[i]);
    if (sum > eps) {
      // Duchi-style soft threshold of the displacement.
      std::vector<double> mag(d);
      for (std::size_t i = 0; i < d; ++i) mag[i] = std::abs(y[i] - x[i]);
      std::sort(mag.begin(), mag.end(), std::greater<double>());
      double cum = 0.0, theta = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        cum += mag[i];
        double t = (cum - eps) / static_cast<double>(i + 1);
        if (mag[i] - t > 0)
          theta = t;
        else
          break;
      }
      for (std::size_t i = 0; i < d; ++i) {
        double diff = y[i] - x[i];
        double m = std::max(0.0, std::abs(diff) - theta);
        y[i] = x[i] + (diff < 0 ? -m : m);
      }
    }
  } else if (metric == MetricKind::L2) {
    double n2 = 0.0;
    for (std::size_t i = 0; i < d; ++i) n2 += (y[i] - x[i]) * (y[i] - x[i]);
    double dist = std::sqrt(n2);
    if (dist > eps && dist > 0) {
      double s = eps / dist;
      for (std::size_t i = 0; i < d; ++i) y[i] = x[i] + (y[i] - x[i]) * s;
    }
  }
  // Roundoff can leave the point a few ulps outside; contract until it isn't.
  for (int guard = 0; guard < 64; ++guard) {
    std::vector<double> yy(y.begin(), y.end());
    if (point_distance(yy, x, metric) <= eps) return;
    for (std::size_t i = 0; i < d; ++i) y[i] = x[i] + (y[i] - x[i]) * 0.99999999999999;
  }
}

std::vector<double> random_direction(SplitMix64& g, std::size_t d, MetricKind metric) {
  std::vector<double> v(d);
  switch (metric) {
    case MetricKind::L2: {
      double n = 0.0;
      do {
        for (auto& x : v) x = g.gaussian();
        n = norm2(v);
      } while (n < 1e-12);
      for (auto& x : v) x /= n;
      break;
    }
    case MetricKind::LInf: {
      for (auto& x : v) x = g.uniform(-1.0, 1.0);
      std::size_t pin = static_cast<std::size_t>(g.next() % d);
      v[pin] = (g.next() & 1) ? 1.0 : -1.0;
      break;
    }
    case MetricKind::L1: {
      double s = 0.0;
      do {
        for (auto& x : v) x = -std::log(1.0 - g.uniform());
        s = 0.0;
        for (double x : v) s += x;
      } while (s < 1e-12);
      for (auto& x : v) x = ((g.next() & 1) ? 1.0 : -1.0) * x / s;
      break;
    }
  }
  return v;
}

std::vector<double> candidate_feature(const Matrix& pts, double threshold, MetricKind metric,
                                      LaplacianVariant variant) {
  Dataset tmp{pts, std::nullopt, {}};
  DistanceMatrix dm = pairwise_distances(tmp, metric, 1);
  SpectralDecomposition s = decompose(laplacian(threshold_graph(dm, threshold), variant));
  std::vector<double> v = s.eigenvectors.col(1);
  sign_fix(v);
  return v;
}

struct TogglePair {
  std::size_t i, j;
  double dist;
};

// Pairs whose edge membership can change when each endpoint moves by at most
// eps: |d_ij - T| <= 2 eps.
std::vector<TogglePair> toggleable_pairs(const DistanceMatrix& dm, double threshold, double eps) {
  std::vector<TogglePair> out;
  std::size_t n = dm.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(dm(i, j) - threshold) <= 2.0 * eps) out.push_back({i, j, dm(i, j)});
  return out;
}

// Moves the endpoints of one pair toward each other (creating the edge) or
// apart (deleting it), each by at most eps, into `pts`.
void apply_pair_toggle(Matrix& pts, const Dataset& orig, const TogglePair& tp, double threshold,
                       double eps, SplitMix64& g) {
  std::size_t d = pts.cols();
  std::vector<double> dir(d);
  double n2 = 0.0;
  for (std::size_t c = 0; c < d; ++c) {
    dir[c] = orig.points(tp.j, c) - orig.points(tp.i, c);
    n2 += dir[c] * dir[c];
  }
  double dist = std::sqrt(n2);
  if (dist < 1e-15) {
    for (auto& x : dir) x = g.gaussian();
    dist = norm2(dir);
    if (dist < 1e-15) return;
  }
  for (auto& x : dir) x /= dist;

  double slack = 1e-9 * (1.0 + threshold);
  bool create = tp.dist > threshold;
  double need = create ? (tp.dist - threshold) / 2.0 : (threshold - tp.dist) / 2.0;
  double m = std::min(eps, need + slack);
  double sgn = create ? 1.0 : -1.0;
  for (std::size_t c = 0; c < d; ++c) {
    pts(tp.i, c) += sgn * m * dir[c];
    pts(tp.j, c) -= sgn * m * dir[c];
  }
}

void project_rows(Matrix& pts, const Dataset& orig, double eps, MetricKind metric) {
  for (std::size_t i = 0; i < pts.rows(); ++i) {
    std::vector<double> row(pts.row(i).begin(), pts.row(i).end());
    project_ball(row, orig.point(i), eps, metric);
    for (std::size_t c = 0; c < pts.cols(); ++c) pts(i, c) = row[c];
  }
}

// Deterministic candidate for trial t; the same (seed, t) always rebuilds the
// same dataset, so only objectives need to be stored during the search.
Matrix dataset_candidate(const Dataset& ds, const DistanceMatrix& dm,
                         const std::vector<TogglePair>& toggles, double threshold, double eps,
                         MetricKind metric, std::uint64_t seed, std::size_t t) {
  (void)dm;
  SplitMix64 g(mix_seed(seed, t));
  Matrix pts = ds.points;
  std::size_t n = ds.size();
  std::size_t d = ds.dim();
  std::size_t kind = toggles.empty() ? 0 : t % 3;
  if (kind == 0) {
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> dir = random_direction(g, d, metric);
      for (std::size_t c = 0; c < d; ++c) pts(i, c) += eps * dir[c];
    }
  } else if (kind == 1) {
    const TogglePair& tp = toggles[g.next() % toggles.size()];
    apply_pair_toggle(pts, ds, tp, threshold, eps, g);
  } else {
    std::size_t picks = 1 + g.next() % std::min<std::size_t>(4, toggles.size());
    for (std::size_t p = 0; p < picks; ++p)
      apply_pair_toggle(pts, ds, toggles[g.next() % toggles.size()], threshold, eps, g);
  }
  project_rows(pts, ds, eps, metric);
  return pts;
}

}  // namespace

AttackResult attack_dataset_feature(const Dataset& ds, double threshold, double eps,
                                    MetricKind metric, const AttackBudget& budget,
                                    LaplacianVariant variant) {
  if (eps < 0) throw std::invalid_argument("attack_dataset_feature: eps must be >= 0");
  if (threshold < 0) throw std::invalid_argument("attack_dataset_feature: threshold must be >= 0");
  std::vector<double> f0 =
      robust_feature(ds, GraphSpec::threshold(threshold), metric, variant).values;

  AttackResult out;
  out.best_perturbed = ds.points;
  if (eps == 0 || budget.trials == 0) return out;

  auto dm = cached_distances(ds, metric);
  std::vector<TogglePair> toggles = toggleable_pairs(*dm, threshold, eps);
  unsigned jobs = budget.jobs == 0 ? default_jobs() : budget.jobs;

  std::vector<double> objective(budget.trials, 0.0);
  parallel_for(budget.trials, jobs, [&](std::size_t t) {
    Matrix pts = dataset_candidate(ds, *dm, toggles, threshold, eps, metric, budget.seed, t);
    objective[t] = align_sign_distance(f0, candidate_feature(pts, threshold, metric, variant));
  });
  std::size_t best_t = 0;
  for (std::size_t t = 1; t < budget.trials; ++t)
    if (objective[t] > objective[best_t]) best_t = t;
  out.trials_used = budget.trials;
  out.displacement = objective[best_t];
  if (out.displacement > 0)
    out.best_perturbed =
        dataset_candidate(ds, *dm, toggles, threshold, eps, metric, budget.seed, best_t);

  // Greedy refinement: move one point at a time toward or away from its
  // nearest threshold boundary, keep any improvement, stop when a full sweep
  // stalls.
  std::size_t n = ds.size();
  std::size_t d = ds.dim();
  for (std::size_t step = 0; step < budget.refinement_steps; ++step) {
    Dataset cur{out.best_perturbed, std::nullopt, {}};
    DistanceMatrix cur_dm = pairwise_distances(cur, metric, 1);
    std::vector<double> cand_obj(2 * n, -1.0);
    std::vector<Matrix> cand_pts(2 * n);
    parallel_for(2 * n, jobs, [&](std::size_t c) {
      std::size_t i = c / 2;
      bool toward = (c % 2) == 0;
      std::size_t jbest = i == 0 ? 1 : 0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i &&
            std::abs(cur_dm(i, j) - threshold) < std::abs(cur_dm(i, jbest) - threshold))
          jbest = j;
      std::vector<double> dir(d);
      for (std::size_t cc = 0; cc < d; ++cc) dir[cc] = cur.points(jbest, cc) - cur.points(i, cc);
      double nn = norm2(dir);
      if (nn < 1e-15) return;
      for (auto& x : dir) x /= nn;
      Matrix pts = out.best_perturbed;
      std::vector<double> row(pts.row(i).begin(), pts.row(i).end());
      for (std::size_t cc = 0; cc < d; ++cc) row[cc] += (toward ? eps : -eps) * dir[cc];
      project_ball(row, ds.point(i), eps, metric);
      for (std::size_t cc = 0; cc < d; ++cc) pts(i, cc) = row[cc];
      cand_obj[c] = align_sign_distance(f0, candidate_feature(pts, threshold, metric, variant));
      cand_pts[c] = std::move(pts);
    });
    out.trials_used += 2 * n;
    std::size_t best_c = 0;
    for (std::size_t c = 1; c < 2 * n; ++c)
      if (cand_obj[c] > cand_obj[best_c]) best_c = c;
    if (cand_obj[best_c] <= out.displacement) break;
    out.displacement = cand_obj[best_c];
    out.best_perturbed = std::move(cand_pts[best_c]);
  }
  return out;
}

namespace {

// Candidate stream for a single moving point. Kind cycles through full
// random steps, one edge toggle, and a blend of toggles.
std::vector<double> point_candidate(std::span<const double> x0,
                                    const std::vector<TogglePair>& toggles, const Dataset& train,
                                    double threshold, double eps, MetricKind metric,
                                    std::uint64_t seed, std::size_t t) {
  SplitMix64 g(mix_seed(seed, t));
  std::size_t d = x0.size();
  std::vector<double> y(x0.begin(), x0.end());
  std::size_t kind = toggles.empty() ? 0 : t % 3;
  if (kind == 0) {
    std::vector<double> dir = random_direction(g, d, metric);
    for (std::size_t c = 0; c < d; ++c) y[c] += eps * dir[c];
  } else {
    std::size_t picks = kind == 1 ? 1 : 1 + g.next() % std::min<std::size_t>(3, toggles.size());
    for (std::size_t p = 0; p < picks; ++p) {
      const TogglePair& tp = toggles[g.next() % toggles.size()];
      // tp.j indexes the training point; x moves the full required distance
      // because the training side is pinned.
      std::vector<double> dir(d);
      for (std::size_t c = 0; c < d; ++c) dir[c] = train.points(tp.j, c) - y[c];
      double dist = norm2(dir);
      if (dist < 1e-15) continue;
      for (auto& v : dir) v /= dist;
      double slack = 1e-9 * (1.0 + threshold);
      bool create = tp.dist > threshold;
      double need = create ? (tp.dist - threshold) : (threshold - tp.dist);
      double m = std::min(eps, need + slack);
      double sgn = create ? 1.0 : -1.0;
      for (std::size_t c = 0; c < d; ++c) y[c] += sgn * m * dir[c];
    }
  }
  project_ball(y, x0, eps, metric);
  return y;
}

}  // namespace

namespace detail {

PointSearchOutcome search_point(std::span<const double> x0,
                                const std::function<double(std::span<const double>)>& objective,
                                double eps, MetricKind metric, const Dataset* train,
                                double threshold, const AttackBudget& budget, double early_stop) {
  PointSearchOutcome out;
  out.best_x.assign(x0.begin(), x0.end());
  if (eps <= 0) return out;

  std::vector<TogglePair> toggles;
  if (train) {
    for (std::size_t j = 0; j < train->size(); ++j) {
      double dist = point_distance(x0, train->point(j), metric);
      if (std::abs(dist - threshold) <= eps) toggles.push_back({0, j, dist});
    }
  }
  Dataset empty_train;
  const Dataset& tr = train ? *train : empty_train;

  for (std::size_t t = 0; t < budget.trials; ++t) {
    std::vector<double> y = point_candidate(x0, toggles, tr, threshold, eps, metric,
                                            budget.seed, t);
    double obj = objective(y);
    ++out.evals;
    if (obj > out.best_obj) {
      out.best_obj = obj;
      out.best_x = std::move(y);
    }
    if (out.best_obj >= early_stop) return out;
  }
  if (!train) return out;

  for (std::size_t step = 0; step < budget.refinement_steps; ++step) {
    double cur_best = out.best_obj;
    std::size_t jbest = 0;
    double margin = kInf;
    for (std::size_t j = 0; j < train->size(); ++j) {
      double dist = point_distance(out.best_x, train->point(j), metric);
      if (std::abs(dist - threshold) < margin) {
        margin = std::abs(dist - threshold);
        jbest = j;
      }
    }
    std::vector<double> dir(x0.size());
    for (std::size_t c = 0; c < x0.size(); ++c) dir[c] = train->points(jbest, c) - out.best_x[c];
    double nn = norm2(dir);
    if (nn < 1e-15) break;
    for (auto& v : dir) v /= nn;
    for (double sgn : {1.0, -1.0}) {
      std::vector<double> y = out.best_x;
      for (std::size_t c = 0; c < y.size(); ++c) y[c] += sgn * eps * dir[c];
      project_ball(y, x0, eps, metric);
      double obj = objective(y);
      ++out.evals;
      if (obj > out.best_obj) {
        out.best_obj = obj;
        out.best_x = std::move(y);
      }
      if (out.best_obj >= early_stop) return out;
    }
    if (out.best_obj <= cur_best) break;
  }
  return out;
}

}  // namespace detail

using detail::PointSearchOutcome;
using detail::search_point;

AttackResult attack_pointwise_feature(const Dataset& train, std::span<const double> x,
                                      double threshold, double eps, MetricKind metric,
                                      const AttackBudget& budget) {
  if (eps < 0) throw std::invalid_argument("attack_pointwise_feature: eps must be >= 0");
  FeatureVector trained = robust_feature(train, GraphSpec::threshold(threshold), metric,
                                         LaplacianVariant::Unnormalized);
  double f0 = extend_feature_with(train, trained, x, threshold, metric).value;
  auto objective = [&](std::span<const double> y) {
    return std::abs(f0 - extend_feature_with(train, trained, y, threshold, metric).value);
  };
  PointSearchOutcome r = search_point(x, objective, eps, metric, &train, threshold, budget, kInf);
  AttackResult out;
  out.displacement = r.best_obj;
  out.trials_used = r.evals;
  out.best_perturbed = Matrix(1, x.size());
  for (std::size_t c = 0; c < x.size(); ++c) out.best_perturbed(0, c) = r.best_x[c];
  return out;
}

double estimate_robustness(const Dataset& test, const ScalarTarget& target, double eps,
                           double delta, const AttackBudget& budget) {
  if (!target.value) throw std::invalid_argument("estimate_robustness: empty target");
  if (eps < 0) throw std::invalid_argument("estimate_robustness: eps must be >= 0");
  std::size_t m = test.size();
  if (eps == 0) return 0.0;
  std::vector<char> broken(m, 0);
  unsigned jobs = budget.jobs == 0 ? default_jobs() : budget.jobs;
  parallel_for(m, jobs, [&](std::size_t i) {
    double f0 = target.value(test.point(i));
    auto objective = [&](std::span<const double> y) { return std::abs(f0 - target.value(y)); };
    PointSearchOutcome r = search_point(test.point(i), objective, eps, target.metric,
                                        target.train, target.threshold, budget, delta);
    broken[i] = r.best_obj >= delta ? 1 : 0;
  });
  std::size_t count = 0;
  for (char b : broken) count += b;
  return static_cast<double>(count) / static_cast<double>(m);
}

LinearAttack attack_linear_exact(std::span<const double> w, double b, std::span<const double> x,
                                 double eps) {
  if (w.size() != x.size()) throw std::invalid_argument("attack_linear_exact: length mismatch");
  if (eps < 0) throw std::invalid_argument("attack_linear_exact: eps must be >= 0");
  double wn = norm2(w);
  if (wn == 0) throw std::invalid_argument("attack_linear_exact: weight vector is zero");
  double score = dot(w, x) + b;
  LinearAttack out;
  out.margin = std::abs(score) / wn;
  double sgn = score >= 0 ? 1.0 : -1.0;
  out.x_prime.assign(x.begin(), x.end());
  for (std::size_t i = 0; i < x.size(); ++i) out.x_prime[i] -= eps * sgn * w[i] / wn;
  out.flipped = std::abs(score) <= eps * wn;
  return out;
}

}
