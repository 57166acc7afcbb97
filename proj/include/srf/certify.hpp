#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>

#include "srf/dataset.hpp"
#include "srf/graph.hpp"

namespace srf {

enum class CertificateKind { Pair, Multi, Pointwise, LowerBound };

// Provable robustness statement. delta bounds the sign-aligned feature
// displacement under the stated perturbation budget (or, for LowerBound,
// restates a classifier guarantee as a spectral-feature guarantee).
// vacuous means the spectral gap in the denominator fell at or below
// tolerances().gap_vacuous and delta is +infinity.
struct Certificate {
  CertificateKind kind = CertificateKind::Pair;
  double threshold = 0.0;
  double eps = 0.0;
  std::size_t k = 1;
  LaplacianVariant variant = LaplacianVariant::Unnormalized;
  MetricKind metric = MetricKind::L2;

  // Named eigenvalues the bound was assembled from.
  std::map<std::string, double> inputs;

  double delta = 0.0;            // may be +infinity when vacuous
  double effective_delta = 0.0;  // delta clamped at the trivial bound
  bool vacuous = false;
  bool degenerate = false;  // near-repeated eigenvalues in a relevant slot
  bool clipped = false;     // lower shifted threshold clamped at 0
  // Scaled-variant certificates follow the experimental recipe (each shifted
  // graph keeps its own degree matrix) rather than a stated theorem.
  bool empirical_mode = false;

  // LowerBound only: the derived guarantee transfers to the feature computed
  // on the graph at feature_threshold, for perturbations up to certified_eps.
  double certified_eps = 0.0;
  double feature_threshold = 0.0;
};

// Displacement bound 2 sqrt(2) sqrt((l2+ - l2-) / (l3- - l2-)) for the second
// eigenvector under per-point perturbations of size eps.
Certificate certify_pair(const Dataset& ds, double threshold, double eps, MetricKind metric,
                         LaplacianVariant variant = LaplacianVariant::Unnormalized);

// k-dimensional bundle bound 2 sqrt(2k) sqrt((l(k+1)+ - l2-) / (l(k+2)- - l2-));
// requires k + 2 <= n.
Certificate certify_multi(const Dataset& ds, double threshold, double eps, std::size_t k,
                          MetricKind metric,
                          LaplacianVariant variant = LaplacianVariant::Unnormalized);

// Held-out point x against a fixed training set: only node-0 edges can move,
// by at most eps; bound 6 sqrt(2) sqrt((l2+(x) - l2-(x)) / (l3-(x) - l2-(x))).
Certificate certify_pointwise(const Dataset& train, std::span<const double> x, double threshold,
                              double eps, MetricKind metric = MetricKind::L2);

// Converts an (eps, delta) guarantee for any classifier into a guarantee for
// the spectral feature on the graph at threshold 2 eps / 3: robust to
// perturbations up to eps / 6 with displacement bound
// delta * sqrt(8 (d_eps + 1) / (l3 - l2)) where d_eps is the max degree of the
// graph at threshold eps and the gap is taken at threshold eps / 3.
Certificate certify_lower_bound(const Dataset& ds, double eps, double delta,
                                MetricKind metric = MetricKind::L2);

// Smallest threshold at which every point keeps at least one neighbor:
// max_i min_{j != i} d_ij.
double auto_threshold(const DistanceMatrix& dm);

}
