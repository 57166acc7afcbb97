#include "srf/features.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "srf/tolerances.hpp"

namespace srf {

Graph build_graph(const DistanceMatrix& dm, const GraphSpec& spec) {
  switch (spec.kind) {
    case GraphKind::Threshold: return threshold_graph(dm, spec.value);
    case GraphKind::Gaussian: return gaussian_graph(dm, spec.value);
    default: throw std::invalid_argument("build_graph: spec must be threshold or gaussian");
  }
}

namespace {

void check_feature_column(std::span<const double> v, LaplacianVariant variant) {
  double n2 = norm2(v);
  if (std::abs(n2 - 1.0) > 1e-8)
    throw std::runtime_error("feature column norm " + std::to_string(n2) + " is not 1");
  if (variant == LaplacianVariant::Unnormalized) {
    double sum = 0.0;
    for (double x : v) sum += x;
    if (std::abs(sum) > 1e-8)
      throw std::runtime_error("feature column sum " + std::to_string(sum) + " is not 0");
  }
}

}  // namespace

FeatureVector robust_feature(const Dataset& ds, const GraphSpec& spec, MetricKind metric,
                             LaplacianVariant variant) {
  auto dm = cached_distances(ds, metric);
  SpectralDecomposition s = decompose(laplacian(build_graph(*dm, spec), variant));
  std::vector<double> v = s.eigenvectors.col(1);
  sign_fix(v);
  check_feature_column(v, variant);
  return FeatureVector{std::move(v), s.eigenvalues[1]};
}

FeatureMatrix robust_features_k(const Dataset& ds, const GraphSpec& spec, std::size_t k,
                                MetricKind metric, LaplacianVariant variant) {
  std::size_t n = ds.size();
  if (k < 1) throw std::invalid_argument("robust_features_k: k must be >= 1");
  if (k > n - 1)
    throw std::invalid_argument("robust_features_k: k = " + std::to_string(k) +
                                " needs at least k + 1 = " + std::to_string(k + 1) + " points");
  auto dm = cached_distances(ds, metric);
  SpectralDecomposition s = decompose(laplacian(build_graph(*dm, spec), variant));
  FeatureMatrix out;
  out.values = Matrix(n, k);
  out.eigenvalues.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<double> v = s.eigenvectors.col(j + 1);
    sign_fix(v);
    check_feature_column(v, variant);
    out.values.set_col(j, v);
    out.eigenvalues[j] = s.eigenvalues[j + 1];
  }
  return out;
}

ExtendedFeature extend_feature(const Dataset& train, std::span<const double> x, double threshold,
                               MetricKind metric) {
  FeatureVector trained = robust_feature(train, GraphSpec::threshold(threshold), metric,
                                         LaplacianVariant::Unnormalized);
  return extend_feature_with(train, trained, x, threshold, metric);
}

ExtendedFeature extend_feature_with(const Dataset& train, const FeatureVector& trained,
                                    std::span<const double> x, double threshold,
                                    MetricKind metric) {
  const Tolerances& tol = tolerances();
  PointwiseGraphs pg = pointwise_graphs(train, x, threshold, 0.0, metric);
  SpectralDecomposition s =
      decompose(laplacian(pg.base, LaplacianVariant::Unnormalized));
  std::size_t n1 = s.size();

  // Columns spanning the lambda_2(x) eigenspace, never including the ones
  // vector at column 0: for a zero lambda_2 that is the rest of the kernel,
  // otherwise the near-equal cluster around lambda_2.
  double lam2 = s.eigenvalues[1];
  std::vector<std::size_t> idx;
  if (lam2 < tol.zero_eigenvalue(n1)) {
    std::size_t m = zero_multiplicity(s);
    for (std::size_t j = 1; j < m; ++j) idx.push_back(j);
  } else {
    double cluster = tol.degenerate_cluster(s.eigenvalues.back());
    for (std::size_t j = 1; j < n1; ++j)
      if (std::abs(s.eigenvalues[j] - lam2) <= cluster) idx.push_back(j);
  }

  // Maximizing the inner product of the last n entries with v2(X) over unit
  // vectors of the eigenspace is exactly normalizing the projection of the
  // 0-prepended v2(X).
  std::vector<double> u(n1, 0.0);
  for (std::size_t i = 0; i + 1 < n1; ++i) u[i + 1] = trained.values[i];
  std::vector<double> p(n1, 0.0);
  for (std::size_t j : idx) {
    double c = 0.0;
    for (std::size_t i = 0; i < n1; ++i) c += u[i] * s.eigenvectors(i, j);
    for (std::size_t i = 0; i < n1; ++i) p[i] += c * s.eigenvectors(i, j);
  }
  double alpha = norm2(p);

  ExtendedFeature out;
  if (alpha >= tol.alignment_zero) {
    out.value = p[0] / alpha;
  } else {
    // Nothing to align against; fall back to the canonical basis vector of
    // the eigenspace and say so.
    std::vector<double> rep = s.eigenvectors.col(idx.front());
    if (!(lam2 < tol.zero_eigenvalue(n1))) sign_fix(rep);
    out.value = rep[0];
    out.ambiguous_sign = true;
  }
  return out;
}

std::vector<double> extend_features_k(const Dataset& train, std::span<const double> x,
                                      const GraphSpec& spec, std::size_t k, MetricKind metric,
                                      LaplacianVariant variant) {
  std::size_t n = train.size();
  if (k < 1) throw std::invalid_argument("extend_features_k: k must be >= 1");
  if (k + 1 > n)
    throw std::invalid_argument("extend_features_k: k + 1 = " + std::to_string(k + 1) +
                                " exceeds the training size " + std::to_string(n));
  auto dm = cached_distances(train, metric);
  SpectralDecomposition s_train = decompose(laplacian(build_graph(*dm, spec), variant));

  SpectralDecomposition s_aug;
  if (spec.kind == GraphKind::Threshold) {
    PointwiseGraphs pg = pointwise_graphs(train, x, spec.value, 0.0, metric);
    s_aug = decompose(laplacian(pg.base, variant));
  } else {
    Matrix pts(n + 1, train.dim());
    for (std::size_t j = 0; j < train.dim(); ++j) pts(0, j) = x[j];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < train.dim(); ++j) pts(i + 1, j) = train.points(i, j);
    Dataset aug{std::move(pts), std::nullopt, ""};
    DistanceMatrix dm_aug = pairwise_distances(aug, metric, 1);
    s_aug = decompose(laplacian(build_graph(dm_aug, spec), variant));
  }

  // The projection is linear in the training columns, so they must carry the
  // same sign convention as the trained feature matrix or the extended values
  // come out flipped relative to it.
  for (std::size_t i = 0; i <= k; ++i) {
    std::vector<double> v = s_train.eigenvectors.col(i);
    sign_fix(v);
    s_train.eigenvectors.set_col(i, v);
  }

  // out[i] = e_0^T P v'_i with P the projector onto the bottom k+1 columns of
  // the augmented decomposition and v'_i the 0-prepended training column i.
  std::vector<double> out(k + 1, 0.0);
  for (std::size_t i = 0; i <= k; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j <= k; ++j) {
      double c = 0.0;
      for (std::size_t r = 0; r < n; ++r) c += s_aug.eigenvectors(r + 1, j) * s_train.eigenvectors(r, i);
      acc += s_aug.eigenvectors(0, j) * c;
    }
    out[i] = acc;
  }
  return out;
}

double align_sign_distance(std::span<const double> f, std::span<const double> g) {
  if (f.size() != g.size()) throw std::invalid_argument("align_sign_distance: length mismatch");
  double dminus = 0.0, dplus = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    double a = f[i] - g[i], b = f[i] + g[i];
    dminus += a * a;
    dplus += b * b;
  }
  return std::sqrt(std::min(dminus, dplus));
}

LinearAlignment align_linear(const Matrix& f, const Matrix& f_prime) {
  if (f.rows() != f_prime.rows() || f.cols() != f_prime.cols())
    throw std::invalid_argument("align_linear: shape mismatch");
  std::size_t k = f.cols();
  Matrix mt = transpose_times(f, f_prime);  // M^T, k x k

  Matrix fit = times(f, mt);
  double res = 0.0;
  for (std::size_t i = 0; i < f.rows(); ++i)
    for (std::size_t j = 0; j < k; ++j) {
      double d = fit(i, j) - f_prime(i, j);
      res += d * d;
    }

  LinearAlignment out;
  out.m = Matrix(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) out.m(i, j) = mt(j, i);
  out.residual = std::sqrt(res);

  // sigma_min(M) via the spectrum of M^T M = mt mt^T.
  Matrix gram(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < k; ++r) s += mt(i, r) * mt(j, r);
      gram(i, j) = s;
    }
  SpectralDecomposition se = eigh(gram);
  out.sigma_min = std::sqrt(std::max(0.0, se.eigenvalues.front()));
  return out;
}

}
