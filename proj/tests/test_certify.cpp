#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "srf/certify.hpp"
#include "srf/dataset.hpp"
#include "srf/eigensolver.hpp"
#include "srf/graph.hpp"
#include "srf/linalg.hpp"
#include "srf/metric.hpp"
#include "srf/rng.hpp"

using namespace srf;

namespace {

Dataset line_points(std::initializer_list<double> xs) {
  Matrix pts(xs.size(), 1);
  std::size_t i = 0;
  for (double x : xs) pts(i++, 0) = x;
  return make_dataset(std::move(pts));
}

Dataset random_dataset(std::size_t n, std::size_t d, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Matrix pts(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) pts(i, j) = rng.uniform(0.0, 2.0);
  return make_dataset(std::move(pts));
}

}  // namespace

TEST_CASE("pair certificate reads the stated eigenvalues and assembles the stated bound") {
  Dataset ds = random_dataset(12, 3, 404);
  double T = 1.1, eps = 0.15;
  Certificate c = certify_pair(ds, T, eps, MetricKind::L2);

  // Recompute the shifted spectra independently.
  DistanceMatrix dm = pairwise_distances(ds, MetricKind::L2);
  ShiftedGraphs sg = shifted_graphs(dm, T, eps);
  SpectralDecomposition sm = eigh(laplacian(sg.minus, LaplacianVariant::Unnormalized).m);
  SpectralDecomposition sp = eigh(laplacian(sg.plus, LaplacianVariant::Unnormalized).m);

  CHECK(c.kind == CertificateKind::Pair);
  CHECK(c.threshold == T);
  CHECK(c.eps == eps);
  CHECK(c.k == 1);
  CHECK(!c.clipped);
  CHECK(!c.empirical_mode);
  CHECK(c.inputs.at("lambda2_plus") == sp.eigenvalues[1]);
  CHECK(c.inputs.at("lambda2_minus") == sm.eigenvalues[1]);
  CHECK(c.inputs.at("lambda3_minus") == sm.eigenvalues[2]);

  double num = std::max(0.0, sp.eigenvalues[1] - sm.eigenvalues[1]);
  double den = sm.eigenvalues[2] - sm.eigenvalues[1];
  if (!c.vacuous) {
    double expect = 2.0 * std::sqrt(2.0) * std::sqrt(num / den);
    CHECK(c.delta == doctest::Approx(expect).epsilon(1e-12));
    CHECK(c.effective_delta == std::min(c.delta, std::sqrt(2.0)));
  } else {
    CHECK(den <= 1e-10);
  }
}

TEST_CASE("multi certificate with k = 1 equals the pair bound bitwise") {
  for (std::uint64_t seed : {7ull, 8ull, 9ull}) {
    Dataset ds = random_dataset(10, 2, seed);
    Certificate pair = certify_pair(ds, 1.0, 0.1, MetricKind::L2);
    Certificate multi = certify_multi(ds, 1.0, 0.1, 1, MetricKind::L2);
    CHECK(pair.delta == multi.delta);
    CHECK(pair.effective_delta == multi.effective_delta);
    CHECK(pair.vacuous == multi.vacuous);
    CHECK(pair.degenerate == multi.degenerate);
    CHECK(pair.kind == CertificateKind::Pair);
    CHECK(multi.kind == CertificateKind::Multi);
    // The multi form names its numerator and denominator reads generically.
    CHECK(pair.inputs.at("lambda2_plus") == multi.inputs.at("lambda_kp1_plus"));
    CHECK(pair.inputs.at("lambda3_minus") == multi.inputs.at("lambda_kp2_minus"));
  }
}

TEST_CASE("multi certificate follows the k-bundle formula") {
  Dataset ds = random_dataset(14, 3, 2025);
  double T = 1.2, eps = 0.1;
  for (std::size_t k : {2ul, 3ul}) {
    Certificate c = certify_multi(ds, T, eps, k, MetricKind::L2);
    DistanceMatrix dm = pairwise_distances(ds, MetricKind::L2);
    ShiftedGraphs sg = shifted_graphs(dm, T, eps);
    SpectralDecomposition sm = eigh(laplacian(sg.minus, LaplacianVariant::Unnormalized).m);
    SpectralDecomposition sp = eigh(laplacian(sg.plus, LaplacianVariant::Unnormalized).m);
    CHECK(c.inputs.at("lambda_kp1_plus") == sp.eigenvalues[k]);
    CHECK(c.inputs.at("lambda2_minus") == sm.eigenvalues[1]);
    CHECK(c.inputs.at("lambda_kp2_minus") == sm.eigenvalues[k + 1]);
    if (!c.vacuous) {
      double num = std::max(0.0, sp.eigenvalues[k] - sm.eigenvalues[1]);
      double den = sm.eigenvalues[k + 1] - sm.eigenvalues[1];
      double expect = 2.0 * std::sqrt(2.0 * static_cast<double>(k)) * std::sqrt(num / den);
      CHECK(c.delta == doctest::Approx(expect).epsilon(1e-12));
      CHECK(c.effective_delta ==
            std::min(c.delta, std::sqrt(2.0 * static_cast<double>(k))));
    }
  }
  CHECK_THROWS_AS(certify_multi(ds, T, eps, 0, MetricKind::L2), std::invalid_argument);
  CHECK_THROWS_AS(certify_multi(ds, T, eps, 13, MetricKind::L2), std::invalid_argument);
}

TEST_CASE("a tight triangle yields a vacuous certificate with the trivial cap") {
  // All three points pairwise within T - 2 eps: both shifted graphs are the
  // complete triangle, whose spectrum {0, 3, 3} has no gap above lambda_2.
  Dataset ds = line_points({0.0, 0.1, 0.2});
  Certificate c = certify_pair(ds, 1.0, 0.2, MetricKind::L2);
  CHECK(c.vacuous);
  CHECK(std::isinf(c.delta));
  CHECK(c.delta > 0);
  CHECK(c.effective_delta == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(c.degenerate);
}

TEST_CASE("well-separated clusters certify zero displacement") {
  // Intra-cluster distances stay under T - 2 eps, inter-cluster distances
  // stay above T + 2 eps: the second eigenvalue is zero on both sides.
  Dataset ds = line_points({0.0, 0.1, 0.2, 10.0, 10.1, 10.2});
  Certificate c = certify_pair(ds, 1.0, 0.2, MetricKind::L2);
  CHECK(!c.vacuous);
  CHECK(c.delta == 0.0);
  CHECK(c.effective_delta == 0.0);
}

TEST_CASE("near-repeated eigenvalues at a read slot set the degenerate flag") {
  Dataset ds = line_points({0.0, 0.1, 0.2, 0.3});  // complete graph both sides
  Certificate c = certify_pair(ds, 2.0, 0.1, MetricKind::L2);
  CHECK(c.degenerate);  // K4 spectrum {0, 4, 4, 4}: slots 1 and 2 collide
}

TEST_CASE("clipping the lower shifted threshold is reported") {
  Dataset ds = random_dataset(8, 2, 31);
  Certificate c = certify_pair(ds, 0.3, 0.2, MetricKind::L2);  // 0.3 - 0.4 < 0
  CHECK(c.clipped);
}

TEST_CASE("scaled-variant certificates are marked empirical") {
  Dataset ds = random_dataset(9, 2, 77);
  Certificate c = certify_pair(ds, 1.0, 0.1, MetricKind::L2, LaplacianVariant::Scaled);
  CHECK(c.empirical_mode);
  CHECK(c.variant == LaplacianVariant::Scaled);
}

TEST_CASE("pointwise certificate formula and vacuous fallback") {
  SUBCASE("formula against independently recomputed spectra") {
    Dataset train = random_dataset(9, 2, 123);
    std::vector<double> x{1.0, 1.0};
    double T = 1.0, eps = 0.2;
    Certificate c = certify_pointwise(train, x, T, eps, MetricKind::L2);
    CHECK(c.kind == CertificateKind::Pointwise);

    PointwiseGraphs pg = pointwise_graphs(train, x, T, eps, MetricKind::L2);
    SpectralDecomposition sm = eigh(laplacian(pg.minus, LaplacianVariant::Unnormalized).m);
    SpectralDecomposition sp = eigh(laplacian(pg.plus, LaplacianVariant::Unnormalized).m);
    CHECK(c.inputs.at("lambda2_plus") == sp.eigenvalues[1]);
    CHECK(c.inputs.at("lambda2_minus") == sm.eigenvalues[1]);
    CHECK(c.inputs.at("lambda3_minus") == sm.eigenvalues[2]);
    double num = std::max(0.0, sp.eigenvalues[1] - sm.eigenvalues[1]);
    double den = sm.eigenvalues[2] - sm.eigenvalues[1];
    if (!c.vacuous) {
      CHECK(c.delta ==
            doctest::Approx(6.0 * std::sqrt(2.0) * std::sqrt(num / den)).epsilon(1e-12));
      CHECK(c.effective_delta == std::min(c.delta, 2.0));
    } else {
      CHECK(den <= 1e-10);
    }
  }

  SUBCASE("isolated query against two far pairs has no usable gap") {
    // Minus graph components: {x}, one pair, other pair; lambda_2 = lambda_3
    // = 0, so the denominator vanishes and the trivial bound 2 applies.
    Dataset train = line_points({0.0, 0.1, 10.0, 10.1});
    std::vector<double> x{100.0};
    Certificate c = certify_pointwise(train, x, 1.0, 0.2, MetricKind::L2);
    CHECK(c.vacuous);
    CHECK(std::isinf(c.delta));
    CHECK(c.effective_delta == 2.0);
  }

  SUBCASE("nonpositive budgets are rejected") {
    Dataset train = line_points({0.0, 1.0, 2.0});
    std::vector<double> x{0.5};
    CHECK_THROWS_AS(certify_pointwise(train, x, 1.0, 0.0, MetricKind::L2),
                    std::invalid_argument);
    CHECK_THROWS_AS(certify_pointwise(train, x, 1.0, -0.1, MetricKind::L2),
                    std::invalid_argument);
  }
}

TEST_CASE("classifier-to-feature transfer on the unit-spaced path") {
  // Points 0..4 with eps = 4.5: the graph at eps/3 = 1.5 is the path, whose
  // gap above lambda_2 is exactly 1; the graph at eps is complete, so the
  // max degree is 4 and the bound is delta * sqrt(8 * 5 / 1) = delta sqrt(40).
  Dataset ds = line_points({0.0, 1.0, 2.0, 3.0, 4.0});
  double eps = 4.5, delta = 0.1;
  Certificate c = certify_lower_bound(ds, eps, delta, MetricKind::L2);

  CHECK(c.kind == CertificateKind::LowerBound);
  CHECK(c.certified_eps == doctest::Approx(eps / 6.0).epsilon(1e-15));
  CHECK(c.feature_threshold == doctest::Approx(2.0 * eps / 3.0).epsilon(1e-15));
  CHECK(c.threshold == c.feature_threshold);
  CHECK(c.inputs.at("d_eps") == 4.0);
  CHECK(c.inputs.at("input_delta") == delta);
  CHECK(c.inputs.at("lambda2_third") ==
        doctest::Approx(2.0 - 2.0 * std::cos(M_PI / 5.0)).epsilon(1e-10));
  CHECK(c.inputs.at("lambda3_third") ==
        doctest::Approx(2.0 - 2.0 * std::cos(2.0 * M_PI / 5.0)).epsilon(1e-10));
  CHECK(!c.vacuous);
  CHECK(c.delta == doctest::Approx(delta * std::sqrt(40.0)).epsilon(1e-9));
  CHECK(c.delta < std::sqrt(2.0));  // under the cap, so effective == delta
  CHECK(c.effective_delta == c.delta);
}

TEST_CASE("transfer bound degenerates when the third-scale graph is complete") {
  Dataset ds = line_points({0.0, 0.01, 0.02});
  Certificate c = certify_lower_bound(ds, 1.0, 0.5, MetricKind::L2);
  CHECK(c.vacuous);
  CHECK(std::isinf(c.delta));
  CHECK(c.effective_delta == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("transfer bound input validation") {
  Dataset ds = line_points({0.0, 1.0, 2.0});
  CHECK_THROWS_AS(certify_lower_bound(ds, 0.0, 0.1, MetricKind::L2), std::invalid_argument);
  CHECK_THROWS_AS(certify_lower_bound(ds, -1.0, 0.1, MetricKind::L2), std::invalid_argument);
  CHECK_THROWS_AS(certify_lower_bound(ds, 1.0, -0.1, MetricKind::L2), std::invalid_argument);
  Dataset two = line_points({0.0, 1.0});
  CHECK_THROWS_AS(certify_lower_bound(two, 1.0, 0.1, MetricKind::L2), std::invalid_argument);
}

TEST_CASE("auto threshold is the largest nearest-neighbor distance") {
  SUBCASE("hand-checked line") {
    // Nearest-neighbor distances: 1, 1, 2, 4 -> the last point needs T = 4.
    Dataset ds = line_points({0.0, 1.0, 3.0, 7.0});
    DistanceMatrix dm = pairwise_distances(ds, MetricKind::L2);
    CHECK(auto_threshold(dm) == 4.0);
  }
  SUBCASE("matches a brute-force oracle on random data") {
    Dataset ds = random_dataset(15, 3, 9001);
    DistanceMatrix dm = pairwise_distances(ds, MetricKind::L2);
    double expect = 0.0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      double nearest = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < ds.size(); ++j)
        if (j != i) nearest = std::min(nearest, dm(i, j));
      expect = std::max(expect, nearest);
    }
    CHECK(auto_threshold(dm) == expect);
    // Every point keeps a neighbor at the returned threshold.
    Graph g = threshold_graph(dm, auto_threshold(dm));
    for (double deg : g.degrees()) CHECK(deg >= 1.0);
  }
}

TEST_CASE("shifted spectra move monotonically with the budget") {
  // Larger eps adds edges to the plus graph and removes edges from the minus
  // graph; Laplacian eigenvalues respond monotonically (edge interlacing).
  Dataset ds = random_dataset(11, 2, 64);
  double T = 1.0;
  double prev_plus = -1.0;
  double prev_minus = std::numeric_limits<double>::infinity();
  for (double eps : {0.05, 0.1, 0.2, 0.3, 0.4}) {
    Certificate c = certify_pair(ds, T, eps, MetricKind::L2);
    double lp = c.inputs.at("lambda2_plus");
    double lm = c.inputs.at("lambda2_minus");
    CHECK(lp >= prev_plus - 1e-9);
    CHECK(lm <= prev_minus + 1e-9);
    prev_plus = lp;
    prev_minus = lm;
  }
}
