#include "srf/spheres.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "srf/eigensolver.hpp"
#include "srf/graph.hpp"
#include "srf/parallel.hpp"
#include "srf/rng.hpp"

namespace srf {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;

// Uniform point on the radius-r sphere: normalized Gaussian vector, redrawn
// on the (measure-zero) event of a tiny norm.
void sample_sphere_point(SplitMix64& g, double r, std::span<double> out) {
  double n = 0.0;
  do {
    for (auto& x : out) x = g.gaussian();
    n = norm2(out);
  } while (n < 1e-12);
  for (auto& x : out) x = r * x / n;
}

}  // namespace

Dataset sample_spheres(const SpheresConfig& cfg) {
  if (cfg.n_per_sphere < 1) throw std::invalid_argument("sample_spheres: need n_per_sphere >= 1");
  if (cfg.d < 1) throw std::invalid_argument("sample_spheres: need d >= 1");
  if (cfg.radius <= 1.0) throw std::invalid_argument("sample_spheres: need radius > 1");
  std::size_t n = 2 * cfg.n_per_sphere;
  Matrix pts(n, cfg.d);
  std::vector<int> labels(n);
  SplitMix64 g(cfg.seed);
  std::vector<double> buf(cfg.d);
  for (std::size_t i = 0; i < n; ++i) {
    bool inner = i < cfg.n_per_sphere;
    sample_sphere_point(g, inner ? 1.0 : cfg.radius, buf);
    for (std::size_t c = 0; c < cfg.d; ++c) pts(i, c) = buf[c];
    labels[i] = inner ? 0 : 1;
  }
  return make_dataset(std::move(pts), std::move(labels), "spheres");
}

SpheresStructure verify_structure(const Dataset& spheres, const SpheresConfig& cfg) {
  if (!spheres.labels) throw std::invalid_argument("verify_structure: dataset has no labels");
  const std::vector<int>& lab = *spheres.labels;
  auto dm = cached_distances(spheres, MetricKind::L2);
  double eps = cfg.eps();
  double near_cut = kSqrt2 + eps;
  double far_cut = kSqrt2 + 3.0 * eps;

  SpheresStructure out;
  out.inner_tight = true;
  out.others_far = true;
  out.min_margin = std::numeric_limits<double>::infinity();
  std::size_t n = spheres.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double d = (*dm)(i, j);
      if (lab[i] == 0 && lab[j] == 0) {
        if (d > near_cut) out.inner_tight = false;
        out.min_margin = std::min(out.min_margin, near_cut - d);
      } else {
        if (d <= far_cut) out.others_far = false;
        out.min_margin = std::min(out.min_margin, d - far_cut);
      }
    }
  }

  Graph gr = threshold_graph(*dm, cfg.threshold());
  std::vector<double> deg = gr.degrees();
  for (std::size_t i = 0; i < n; ++i)
    if (deg[i] == 0.0) ++out.isolated_count;

  // BFS over the threshold graph: every inner vertex reachable from the first.
  std::size_t start = n;
  for (std::size_t i = 0; i < n; ++i)
    if (lab[i] == 0) {
      start = i;
      break;
    }
  if (start < n) {
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> queue{start};
    seen[start] = 1;
    while (!queue.empty()) {
      std::size_t v = queue.back();
      queue.pop_back();
      for (std::size_t u = 0; u < n; ++u)
        if (!seen[u] && gr.weights(v, u) != 0.0) {
          seen[u] = 1;
          queue.push_back(u);
        }
    }
    out.inner_one_component = true;
    for (std::size_t i = 0; i < n; ++i)
      if (lab[i] == 0 && !seen[i]) out.inner_one_component = false;
  }
  return out;
}

SpheresFeatureReport spheres_feature_test(const Dataset& train, const SpheresConfig& cfg,
                                          std::size_t test_per_sphere, std::uint64_t test_seed,
                                          const AttackBudget& attack_budget,
                                          std::size_t attack_points_per_sphere) {
  if (!train.labels) throw std::invalid_argument("spheres_feature_test: train has no labels");
  if (test_per_sphere < 1)
    throw std::invalid_argument("spheres_feature_test: need test points");
  SpheresConfig tcfg = cfg;
  tcfg.n_per_sphere = test_per_sphere;
  tcfg.seed = test_seed;
  Dataset test = sample_spheres(tcfg);

  double threshold = cfg.threshold();
  std::size_t k = cfg.n_per_sphere;  // bottom k+1 eigenvectors span the kernel
  std::size_t cols = k + 1;
  std::size_t m = test.size();

  std::vector<std::size_t> inner_train;
  for (std::size_t j = 0; j < train.size(); ++j)
    if ((*train.labels)[j] == 0) inner_train.push_back(j);

  SpheresFeatureReport out;
  out.inner_features = Matrix(test_per_sphere, cols);
  out.outer_features = Matrix(test_per_sphere, cols);

  std::vector<char> exceptional(m, 0);
  Matrix feats(m, cols);
  parallel_for(m, default_jobs(), [&](std::size_t i) {
    std::span<const double> x = test.point(i);
    // Expected attachment: an inner test point links to exactly the inner
    // training block, an outer test point to nothing.
    std::vector<std::size_t> attached;
    for (std::size_t j = 0; j < train.size(); ++j)
      if (point_distance(x, train.point(j), MetricKind::L2) <= threshold) attached.push_back(j);
    bool inner = (*test.labels)[i] == 0;
    if (inner)
      exceptional[i] = attached != inner_train ? 1 : 0;
    else
      exceptional[i] = attached.empty() ? 0 : 1;
    std::vector<double> f =
        extend_features_k(train, x, GraphSpec::threshold(threshold), k, MetricKind::L2);
    for (std::size_t c = 0; c < cols; ++c) feats(i, c) = f[c];
  });
  for (std::size_t i = 0; i < m; ++i) {
    out.exceptional_count += exceptional[i];
    bool inner = (*test.labels)[i] == 0;
    std::size_t row = inner ? i : i - test_per_sphere;
    for (std::size_t c = 0; c < cols; ++c)
      (inner ? out.inner_features : out.outer_features)(row, c) = feats(i, c);
  }

  auto row_dist = [&](const Matrix& a, std::size_t i, const Matrix& b, std::size_t j) {
    double s = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      double diff = a(i, c) - b(j, c);
      s += diff * diff;
    }
    return std::sqrt(s);
  };
  for (std::size_t i = 0; i < test_per_sphere; ++i)
    for (std::size_t j = i + 1; j < test_per_sphere; ++j) {
      out.inner_spread = std::max(out.inner_spread, row_dist(out.inner_features, i,
                                                             out.inner_features, j));
      out.outer_spread = std::max(out.outer_spread, row_dist(out.outer_features, i,
                                                             out.outer_features, j));
    }
  out.separation = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < test_per_sphere; ++i)
    for (std::size_t j = 0; j < test_per_sphere; ++j)
      out.separation = std::min(out.separation, row_dist(out.inner_features, i,
                                                         out.outer_features, j));

  std::size_t per = std::min(attack_points_per_sphere, test_per_sphere);
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t i = 0; i < per; ++i) {
      std::size_t idx = s * test_per_sphere + i;
      AttackResult r = attack_pointwise_feature(train, test.point(idx), threshold, cfg.eps(),
                                                MetricKind::L2, attack_budget);
      out.max_attack_displacement = std::max(out.max_attack_displacement, r.displacement);
      ++out.attacked_points;
    }
  return out;
}

double concentration_check(double r1, double r2, std::size_t d, std::size_t samples, double tol,
                           std::uint64_t seed) {
  if (d < 1 || samples < 1) throw std::invalid_argument("concentration_check: empty setup");
  if (tol <= 0) throw std::invalid_argument("concentration_check: tol must be positive");
  double expected = r1 * r1 + r2 * r2;
  std::vector<char> bad(samples, 0);
  parallel_for(samples, default_jobs(), [&](std::size_t s) {
    SplitMix64 g(mix_seed(seed, s));
    std::vector<double> a(d), b(d);
    sample_sphere_point(g, r1, a);
    sample_sphere_point(g, r2, b);
    double d2 = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      double diff = a[c] - b[c];
      d2 += diff * diff;
    }
    bad[s] = std::abs(d2 - expected) > tol ? 1 : 0;
  });
  std::size_t count = 0;
  for (char x : bad) count += x;
  return static_cast<double>(count) / static_cast<double>(samples);
}

}
