#include "srf/graph.hpp"

#include <cmath>
#include <cstring>
#include <list>
#include <mutex>
#include <ostream>
#include <stdexcept>

#include "srf/parallel.hpp"

namespace srf {

DistanceMatrix pairwise_distances(const Dataset& ds, MetricKind metric, unsigned jobs) {
  std::size_t n = ds.size();
  Matrix d(n, n);
  if (jobs == 0) jobs = default_jobs();
  // Each row's upper triangle is one independent unit of work; mirroring
  // afterwards keeps the matrix exactly symmetric.
  parallel_for(n, jobs, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) d(i, j) = point_distance(ds.point(i), ds.point(j), metric);
  });
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d(j, i) = d(i, j);
  return DistanceMatrix{std::move(d), metric};
}

namespace {

std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t h) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct CacheEntry {
  std::uint64_t hash = 0;
  MetricKind metric = MetricKind::L2;
  std::size_t rows = 0, cols = 0;
  std::vector<double> data;
  std::shared_ptr<const DistanceMatrix> dm;
};

}  // namespace

std::shared_ptr<const DistanceMatrix> cached_distances(const Dataset& ds, MetricKind metric) {
  static std::mutex mu;
  static std::list<CacheEntry> entries;
  constexpr std::size_t kMaxEntries = 8;

  std::uint64_t h = 0xcbf29ce484222325ULL;
  std::size_t rows = ds.size(), cols = ds.dim();
  h = fnv1a(&rows, sizeof(rows), h);
  h = fnv1a(&cols, sizeof(cols), h);
  h = fnv1a(&metric, sizeof(metric), h);
  h = fnv1a(ds.points.data().data(), ds.points.data().size() * sizeof(double), h);

  {
    std::lock_guard<std::mutex> lock(mu);
    for (auto it = entries.begin(); it != entries.end(); ++it)
      if (it->hash == h && it->metric == metric && it->rows == rows && it->cols == cols &&
          it->data == ds.points.data()) {
        entries.splice(entries.begin(), entries, it);
        return entries.front().dm;
      }
  }
  auto dm = std::make_shared<const DistanceMatrix>(pairwise_distances(ds, metric));
  {
    std::lock_guard<std::mutex> lock(mu);
    entries.push_front(CacheEntry{h, metric, rows, cols, ds.points.data(), dm});
    while (entries.size() > kMaxEntries) entries.pop_back();
  }
  return dm;
}

std::vector<double> Graph::degrees() const {
  std::size_t n = size();
  std::vector<double> deg(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) deg[i] += weights(i, j);
  return deg;
}

Graph threshold_graph(const DistanceMatrix& dm, double threshold) {
  std::size_t n = dm.size();
  Graph g;
  g.kind = GraphKind::Threshold;
  g.threshold = threshold;
  g.weights = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (dm(i, j) <= threshold) g.weights(i, j) = g.weights(j, i) = 1.0;
  return g;
}

ShiftedGraphs shifted_graphs(const DistanceMatrix& dm, double threshold, double eps) {
  if (eps <= 0) throw std::invalid_argument("shifted_graphs: eps must be positive");
  if (threshold < 0) throw std::invalid_argument("shifted_graphs: threshold must be >= 0");
  ShiftedGraphs out;
  double lo = threshold - 2.0 * eps;
  out.clipped = lo < 0.0;
  if (out.clipped) lo = 0.0;
  out.minus = threshold_graph(dm, lo);
  out.base = threshold_graph(dm, threshold);
  out.plus = threshold_graph(dm, threshold + 2.0 * eps);
  return out;
}

namespace {

Graph pointwise_graph(const Dataset& train, std::span<const double> x, double base_threshold,
                      double node0_threshold, MetricKind metric, double eps, int shift) {
  std::size_t n = train.size();
  Graph g;
  g.kind = GraphKind::PointwiseThreshold;
  g.threshold = base_threshold;
  g.eps = eps;
  g.shift = shift;
  g.weights = Matrix(n + 1, n + 1);
  for (std::size_t j = 0; j < n; ++j)
    if (point_distance(x, train.point(j), metric) <= node0_threshold)
      g.weights(0, j + 1) = g.weights(j + 1, 0) = 1.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (point_distance(train.point(i), train.point(j), metric) <= base_threshold)
        g.weights(i + 1, j + 1) = g.weights(j + 1, i + 1) = 1.0;
  return g;
}

}  // namespace

PointwiseGraphs pointwise_graphs(const Dataset& train, std::span<const double> x, double threshold,
                                 double eps, MetricKind metric) {
  if (eps < 0) throw std::invalid_argument("pointwise_graphs: eps must be >= 0");
  if (threshold < 0) throw std::invalid_argument("pointwise_graphs: threshold must be >= 0");
  if (x.size() != train.dim())
    throw std::invalid_argument("pointwise_graphs: point dimension mismatch");
  PointwiseGraphs out;
  out.minus = pointwise_graph(train, x, threshold, threshold - eps, metric, eps, -1);
  out.base = pointwise_graph(train, x, threshold, threshold, metric, eps, 0);
  out.plus = pointwise_graph(train, x, threshold, threshold + eps, metric, eps, +1);
  return out;
}

Graph gaussian_graph(const DistanceMatrix& dm, double gamma) {
  if (!(gamma > 0)) throw std::invalid_argument("gaussian_graph: gamma must be positive");
  std::size_t n = dm.size();
  Graph g;
  g.kind = GraphKind::Gaussian;
  g.gamma = gamma;
  g.weights = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double w = std::exp(-gamma * dm(i, j) * dm(i, j));
      g.weights(i, j) = g.weights(j, i) = w;
    }
  return g;
}

LaplacianMatrix laplacian(const Graph& g, LaplacianVariant variant) {
  std::size_t n = g.size();
  std::vector<double> deg = g.degrees();
  LaplacianMatrix lap;
  lap.variant = variant;
  lap.source_kind = g.kind;
  lap.m = Matrix(n, n);
  if (variant == LaplacianVariant::Unnormalized) {
    for (std::size_t i = 0; i < n; ++i) {
      lap.m(i, i) = deg[i];
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) lap.m(i, j) = -g.weights(i, j);
    }
  } else {
    // Isolated vertices get an identity row so the matrix stays symmetric PSD
    // with a well-defined unit diagonal.
    std::vector<double> inv_sqrt(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      if (deg[i] > 0) inv_sqrt[i] = 1.0 / std::sqrt(deg[i]);
    for (std::size_t i = 0; i < n; ++i) {
      lap.m(i, i) = 1.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) lap.m(i, j) = -g.weights(i, j) * inv_sqrt[i] * inv_sqrt[j];
    }
  }
  return lap;
}

std::size_t max_degree(const Graph& g) {
  if (g.kind == GraphKind::Gaussian)
    throw std::invalid_argument("max_degree: weighted graphs have no vertex degree");
  std::size_t n = g.size();
  std::size_t best = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t deg = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (g.weights(i, j) == 1.0) ++deg;
    if (deg > best) best = deg;
  }
  return best;
}

void write_edge_list(const Graph& g, std::ostream& out) {
  std::size_t n = g.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (g.weights(i, j) != 0.0) out << i << ' ' << j << ' ' << g.weights(i, j) << '\n';
}

}
