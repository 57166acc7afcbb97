#include "srf/certify.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "srf/eigensolver.hpp"
#include "srf/tolerances.hpp"

namespace srf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Whether the eigenvalue at `slot` sits in a near-repeated cluster with a
// neighbor; the bounds assume simple eigenvalues at the slots they read.
bool slot_degenerate(const std::vector<double>& lam, std::size_t slot) {
  double tol = tolerances().degenerate_cluster(lam.back());
  if (slot > 0 && lam[slot] - lam[slot - 1] <= tol) return true;
  if (slot + 1 < lam.size() && lam[slot + 1] - lam[slot] <= tol) return true;
  return false;
}

// Shared assembly for the dataset-level bounds: numerator slot k (0-based) on
// the plus side, denominator slot k+1 on the minus side, both against
// lambda_2^- at slot 1.
Certificate dataset_certificate(const Dataset& ds, double threshold, double eps, std::size_t k,
                                MetricKind metric, LaplacianVariant variant,
                                CertificateKind kind) {
  std::size_t n = ds.size();
  if (k < 1) throw std::invalid_argument("certify: k must be >= 1");
  if (k + 2 > n)
    throw std::invalid_argument("certify: the bound reads eigenvalue " + std::to_string(k + 2) +
                                " but the dataset has only " + std::to_string(n) + " points");
  auto dm = cached_distances(ds, metric);
  ShiftedGraphs sg = shifted_graphs(*dm, threshold, eps);
  SpectralDecomposition sm = eigh(laplacian(sg.minus, variant).m);
  SpectralDecomposition sp = eigh(laplacian(sg.plus, variant).m);

  double lam_num_plus = sp.eigenvalues[k];    // lambda_{k+1}^+
  double lam2_minus = sm.eigenvalues[1];      // lambda_2^-
  double lam_den_minus = sm.eigenvalues[k + 1];  // lambda_{k+2}^-

  Certificate c;
  c.kind = kind;
  c.threshold = threshold;
  c.eps = eps;
  c.k = k;
  c.variant = variant;
  c.metric = metric;
  c.clipped = sg.clipped;
  c.empirical_mode = variant == LaplacianVariant::Scaled;
  if (kind == CertificateKind::Pair) {
    c.inputs["lambda2_plus"] = lam_num_plus;
    c.inputs["lambda2_minus"] = lam2_minus;
    c.inputs["lambda3_minus"] = lam_den_minus;
  } else {
    c.inputs["lambda_kp1_plus"] = lam_num_plus;
    c.inputs["lambda2_minus"] = lam2_minus;
    c.inputs["lambda_kp2_minus"] = lam_den_minus;
  }
  c.degenerate = slot_degenerate(sp.eigenvalues, k) || slot_degenerate(sm.eigenvalues, k + 1);

  double num = std::max(0.0, lam_num_plus - lam2_minus);
  double den = lam_den_minus - lam2_minus;
  double cap = std::sqrt(2.0 * static_cast<double>(k));
  if (den <= tolerances().gap_vacuous) {
    c.delta = kInf;
    c.vacuous = true;
    c.effective_delta = cap;
  } else {
    c.delta = 2.0 * std::sqrt(2.0 * static_cast<double>(k)) * std::sqrt(num / den);
    c.effective_delta = std::min(c.delta, cap);
  }
  return c;
}

}  // namespace

Certificate certify_pair(const Dataset& ds, double threshold, double eps, MetricKind metric,
                         LaplacianVariant variant) {
  return dataset_certificate(ds, threshold, eps, 1, metric, variant, CertificateKind::Pair);
}

Certificate certify_multi(const Dataset& ds, double threshold, double eps, std::size_t k,
                          MetricKind metric, LaplacianVariant variant) {
  return dataset_certificate(ds, threshold, eps, k, metric, variant, CertificateKind::Multi);
}

Certificate certify_pointwise(const Dataset& train, std::span<const double> x, double threshold,
                              double eps, MetricKind metric) {
  if (eps <= 0) throw std::invalid_argument("certify_pointwise: eps must be positive");
  PointwiseGraphs pg = pointwise_graphs(train, x, threshold, eps, metric);
  SpectralDecomposition sm = eigh(laplacian(pg.minus, LaplacianVariant::Unnormalized).m);
  SpectralDecomposition sp = eigh(laplacian(pg.plus, LaplacianVariant::Unnormalized).m);

  double lam2_plus = sp.eigenvalues[1];
  double lam2_minus = sm.eigenvalues[1];
  double lam3_minus = sm.eigenvalues[2];

  Certificate c;
  c.kind = CertificateKind::Pointwise;
  c.threshold = threshold;
  c.eps = eps;
  c.k = 1;
  c.variant = LaplacianVariant::Unnormalized;
  c.metric = metric;
  c.inputs["lambda2_plus"] = lam2_plus;
  c.inputs["lambda2_minus"] = lam2_minus;
  c.inputs["lambda3_minus"] = lam3_minus;
  c.degenerate = slot_degenerate(sp.eigenvalues, 1) || slot_degenerate(sm.eigenvalues, 2);

  double num = std::max(0.0, lam2_plus - lam2_minus);
  double den = lam3_minus - lam2_minus;
  // The trivial bound here is 2: the feature values are entries of unit
  // vectors, so each lies in [-1, 1].
  if (den <= tolerances().gap_vacuous) {
    c.delta = kInf;
    c.vacuous = true;
    c.effective_delta = 2.0;
  } else {
    c.delta = 6.0 * std::sqrt(2.0) * std::sqrt(num / den);
    c.effective_delta = std::min(c.delta, 2.0);
  }
  return c;
}

Certificate certify_lower_bound(const Dataset& ds, double eps, double delta, MetricKind metric) {
  if (eps <= 0) throw std::invalid_argument("certify_lower_bound: eps must be positive");
  if (delta < 0) throw std::invalid_argument("certify_lower_bound: delta must be >= 0");
  if (ds.size() < 3)
    throw std::invalid_argument("certify_lower_bound: needs at least 3 points");
  auto dm = cached_distances(ds, metric);
  Graph g_third = threshold_graph(*dm, eps / 3.0);
  Graph g_eps = threshold_graph(*dm, eps);
  std::size_t d_eps = max_degree(g_eps);
  SpectralDecomposition s = eigh(laplacian(g_third, LaplacianVariant::Unnormalized).m);
  double gap = s.eigenvalues[2] - s.eigenvalues[1];

  Certificate c;
  c.kind = CertificateKind::LowerBound;
  c.eps = eps;
  c.k = 1;
  c.variant = LaplacianVariant::Unnormalized;
  c.metric = metric;
  c.certified_eps = eps / 6.0;
  c.feature_threshold = 2.0 * eps / 3.0;
  c.threshold = c.feature_threshold;
  c.inputs["lambda2_third"] = s.eigenvalues[1];
  c.inputs["lambda3_third"] = s.eigenvalues[2];
  c.inputs["d_eps"] = static_cast<double>(d_eps);
  c.inputs["input_delta"] = delta;
  c.degenerate = slot_degenerate(s.eigenvalues, 1) || slot_degenerate(s.eigenvalues, 2);

  double cap = std::sqrt(2.0);
  if (gap <= tolerances().gap_vacuous) {
    c.delta = kInf;
    c.vacuous = true;
    c.effective_delta = cap;
  } else {
    c.delta = delta * std::sqrt(8.0 * (static_cast<double>(d_eps) + 1.0) / gap);
    c.effective_delta = std::min(c.delta, cap);
  }
  return c;
}

double auto_threshold(const DistanceMatrix& dm) {
  std::size_t n = dm.size();
  if (n < 2) throw std::invalid_argument("auto_threshold: needs at least 2 points");
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double nearest = kInf;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) nearest = std::min(nearest, dm(i, j));
    best = std::max(best, nearest);
  }
  return best;
}

}
