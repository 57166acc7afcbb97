#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "srf/dataset.hpp"
#include "srf/eigensolver.hpp"
#include "srf/graph.hpp"
#include "srf/linalg.hpp"
#include "srf/metric.hpp"

namespace srf {

// How to turn a distance matrix into a graph: hard threshold at T or Gaussian
// weights exp(-gamma d^2).
struct GraphSpec {
  GraphKind kind = GraphKind::Threshold;
  double value = 0.0;  // T or gamma

  static GraphSpec threshold(double t) { return {GraphKind::Threshold, t}; }
  static GraphSpec gaussian(double g) { return {GraphKind::Gaussian, g}; }
};

Graph build_graph(const DistanceMatrix& dm, const GraphSpec& spec);

// Unit second eigenvector of the graph Laplacian, kernel canonicalized (for
// the unnormalized variant) and sign-fixed. values sums to zero within 1e-8
// when variant == Unnormalized.
struct FeatureVector {
  std::vector<double> values;
  double eigenvalue = 0.0;  // lambda_2 of the source Laplacian
};

FeatureVector robust_feature(const Dataset& ds, const GraphSpec& spec, MetricKind metric,
                             LaplacianVariant variant = LaplacianVariant::Unnormalized);

// Columns v_2 .. v_{k+1}, each sign-fixed; requires k <= n - 1.
struct FeatureMatrix {
  Matrix values;  // n x k
  std::vector<double> eigenvalues;
};

FeatureMatrix robust_features_k(const Dataset& ds, const GraphSpec& spec, std::size_t k,
                                MetricKind metric,
                                LaplacianVariant variant = LaplacianVariant::Unnormalized);

// Value a held-out point x receives from the trained second eigenvector: the
// unit vector of the lambda_2(x) eigenspace of the graph on {x} U X whose
// restriction to the training nodes best matches v_2(X), evaluated at node 0.
// ambiguous_sign reports that the matching inner product vanished and the
// canonical eigenspace basis vector was returned instead.
struct ExtendedFeature {
  double value = 0.0;
  bool ambiguous_sign = false;
};

ExtendedFeature extend_feature(const Dataset& train, std::span<const double> x, double threshold,
                               MetricKind metric = MetricKind::L2);

// Same map with the training-side eigenvector already computed; attack loops
// evaluate many candidate points against one training set.
ExtendedFeature extend_feature_with(const Dataset& train, const FeatureVector& trained,
                                    std::span<const double> x, double threshold,
                                    MetricKind metric = MetricKind::L2);

// Bottom-(k+1) eigenvectors of the training graph, prepended with a zero and
// projected onto the bottom-(k+1) eigenspace of the graph on {x} U X; returns
// the k+1 node-0 components of the projections. Norm of the result is <= 1.
std::vector<double> extend_features_k(const Dataset& train, std::span<const double> x,
                                      const GraphSpec& spec, std::size_t k,
                                      MetricKind metric = MetricKind::L2,
                                      LaplacianVariant variant = LaplacianVariant::Unnormalized);

// min(||f - g||, ||f + g||): displacement that ignores the global sign choice.
double align_sign_distance(std::span<const double> f, std::span<const double> g);

// Least-squares linear map M with columns of F (orthonormal) mapped onto F':
// M^T = F^T F'. residual = ||F M^T - F'||_F; sigma_min flags near-singular
// maps (rank collapse between the two feature bases).
struct LinearAlignment {
  Matrix m;  // k x k
  double residual = 0.0;
  double sigma_min = 0.0;
};

LinearAlignment align_linear(const Matrix& f, const Matrix& f_prime);

}
