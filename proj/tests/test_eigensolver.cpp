#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "srf/dataset.hpp"
#include "srf/eigensolver.hpp"
#include "srf/graph.hpp"
#include "srf/linalg.hpp"
#include "srf/rng.hpp"

using namespace srf;

namespace {

Matrix random_symmetric(std::size_t n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double v = rng.uniform(-3.0, 3.0);
      a(i, j) = v;
      a(j, i) = v;
    }
  return a;
}

// Path graph on n vertices as an unnormalized Laplacian.
Matrix path_laplacian(std::size_t n) {
  Matrix L(n, n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    L(i, i) += 1.0;
    L(i + 1, i + 1) += 1.0;
    L(i, i + 1) -= 1.0;
    L(i + 1, i) -= 1.0;
  }
  return L;
}

Matrix complete_laplacian(std::size_t n) {
  Matrix L(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) L(i, j) = (i == j) ? double(n - 1) : -1.0;
  return L;
}

double reconstruction_error(const Matrix& a, const SpectralDecomposition& s) {
  std::size_t n = a.rows();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double sum = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        sum += s.eigenvectors(i, k) * s.eigenvalues[k] * s.eigenvectors(j, k);
      worst = std::max(worst, std::abs(sum - a(i, j)));
    }
  }
  return worst;
}

double orthonormality_error(const SpectralDecomposition& s) {
  std::size_t n = s.size();
  double worst = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += s.eigenvectors(i, a) * s.eigenvectors(i, b);
      worst = std::max(worst, std::abs(dot - (a == b ? 1.0 : 0.0)));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("known spectra of small graph laplacians") {
  SUBCASE("path on three vertices") {
    SpectralDecomposition s = eigh(path_laplacian(3));
    REQUIRE(s.size() == 3);
    CHECK(std::abs(s.eigenvalues[0]) < 1e-12);
    CHECK(s.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(s.eigenvalues[2] == doctest::Approx(3.0).epsilon(1e-10));
  }
  SUBCASE("complete graph on four vertices") {
    SpectralDecomposition s = eigh(complete_laplacian(4));
    REQUIRE(s.size() == 4);
    CHECK(std::abs(s.eigenvalues[0]) < 1e-12);
    for (std::size_t k = 1; k < 4; ++k)
      CHECK(s.eigenvalues[k] == doctest::Approx(4.0).epsilon(1e-10));
  }
  SUBCASE("path on five vertices has fiedler gap exactly one") {
    // lambda_2 = 2 - 2cos(pi/5), lambda_3 = 2 - 2cos(2pi/5); the gap between
    // the third and second eigenvalues is 2(cos(pi/5) - cos(2pi/5)) = 1.
    SpectralDecomposition s = eigh(path_laplacian(5));
    double l2 = 2.0 - 2.0 * std::cos(M_PI / 5.0);
    double l3 = 2.0 - 2.0 * std::cos(2.0 * M_PI / 5.0);
    CHECK(s.eigenvalues[1] == doctest::Approx(l2).epsilon(1e-10));
    CHECK(s.eigenvalues[2] == doctest::Approx(l3).epsilon(1e-10));
    CHECK(eigengap(s, 2, 3) == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("decomposition reconstructs random symmetric matrices") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull}) {
    for (std::size_t n : {2ul, 5ul, 13ul, 30ul}) {
      Matrix a = random_symmetric(n, seed * 100 + n);
      SpectralDecomposition s = eigh(a);
      CHECK(std::is_sorted(s.eigenvalues.begin(), s.eigenvalues.end()));
      CHECK(reconstruction_error(a, s) < 1e-9 * static_cast<double>(n));
      CHECK(orthonormality_error(s) < 1e-10 * static_cast<double>(n));
    }
  }
}

TEST_CASE("two by two closed form") {
  Matrix a(2, 2);
  a(0, 0) = 3.0;
  a(1, 1) = 1.0;
  a(0, 1) = a(1, 0) = 2.0;
  // Eigenvalues 2 +/- sqrt(5).
  SpectralDecomposition s = eigh(a);
  CHECK(s.eigenvalues[0] == doctest::Approx(2.0 - std::sqrt(5.0)).epsilon(1e-12));
  CHECK(s.eigenvalues[1] == doctest::Approx(2.0 + std::sqrt(5.0)).epsilon(1e-12));
}

TEST_CASE("one by one matrix") {
  Matrix a(1, 1);
  a(0, 0) = -7.5;
  SpectralDecomposition s = eigh(a);
  REQUIRE(s.size() == 1);
  CHECK(s.eigenvalues[0] == -7.5);
  CHECK(std::abs(std::abs(s.eigenvectors(0, 0)) - 1.0) < 1e-15);
}

TEST_CASE("eigenvalues are invariant under vertex permutation") {
  Matrix a = random_symmetric(9, 42);
  std::vector<std::size_t> perm(9);
  std::iota(perm.begin(), perm.end(), 0);
  SplitMix64 rng(7);
  for (std::size_t i = perm.size(); i > 1; --i)
    std::swap(perm[i - 1], perm[static_cast<std::size_t>(rng.next() % i)]);
  Matrix b(9, 9);
  for (std::size_t i = 0; i < 9; ++i)
    for (std::size_t j = 0; j < 9; ++j) b(i, j) = a(perm[i], perm[j]);
  SpectralDecomposition sa = eigh(a);
  SpectralDecomposition sb = eigh(b);
  for (std::size_t k = 0; k < 9; ++k)
    CHECK(sa.eigenvalues[k] == doctest::Approx(sb.eigenvalues[k]).epsilon(1e-9));
}

TEST_CASE("identical input bits give identical output bits") {
  Matrix a = random_symmetric(17, 90210);
  SpectralDecomposition s1 = eigh(a);
  SpectralDecomposition s2 = eigh(a);
  CHECK(s1.eigenvalues == s2.eigenvalues);
  for (std::size_t i = 0; i < 17; ++i)
    for (std::size_t j = 0; j < 17; ++j) CHECK(s1.eigenvectors(i, j) == s2.eigenvectors(i, j));
}

TEST_CASE("invalid inputs are rejected") {
  SUBCASE("asymmetric matrix") {
    Matrix a(3, 3);
    a(0, 1) = 1.0;
    a(1, 0) = 2.0;
    CHECK_THROWS_AS(eigh(a), std::invalid_argument);
  }
  SUBCASE("non-finite entry") {
    Matrix a(2, 2);
    a(0, 1) = a(1, 0) = std::nan("");
    CHECK_THROWS_AS(eigh(a), std::invalid_argument);
  }
}

TEST_CASE("kernel dimension counts connected components") {
  // Union of a path on 3 and a path on 2 and one isolated vertex: 3 parts.
  Matrix L(6, 6);
  auto add_edge = [&](std::size_t i, std::size_t j) {
    L(i, i) += 1.0;
    L(j, j) += 1.0;
    L(i, j) -= 1.0;
    L(j, i) -= 1.0;
  };
  add_edge(0, 1);
  add_edge(1, 2);
  add_edge(3, 4);
  SpectralDecomposition s = eigh(L);
  CHECK(zero_multiplicity(s) == 3);

  SpectralDecomposition connected = eigh(path_laplacian(6));
  CHECK(zero_multiplicity(connected) == 1);
}

TEST_CASE("eigengap uses one-based indices and clamps at zero") {
  SpectralDecomposition s;
  s.eigenvalues = {0.0, 0.5, 2.5, 2.5};
  CHECK(eigengap(s, 1, 2) == 0.5);
  CHECK(eigengap(s, 2, 3) == 2.0);
  CHECK(eigengap(s, 3, 4) == 0.0);
  CHECK_THROWS_AS(eigengap(s, 3, 2), std::invalid_argument);  // needs i < j
  CHECK_THROWS_AS(eigengap(s, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(eigengap(s, 1, 5), std::invalid_argument);
}

TEST_CASE("sign fix makes the leading significant entry positive") {
  std::vector<double> v{-1e-15, -0.4, 0.3};
  sign_fix(v);
  CHECK(v[1] == 0.4);
  CHECK(v[2] == -0.3);

  std::vector<double> w{0.0, 0.2, -0.9};
  sign_fix(w);
  CHECK(w[1] == 0.2);
  CHECK(w[2] == -0.9);

  std::vector<double> z{1e-15, -1e-14, 0.0};
  CHECK_THROWS_AS(sign_fix(z), std::runtime_error);
}

TEST_CASE("kernel canonicalization produces the component indicator basis") {
  // 1-D points 0, 1, 10, 11 with threshold 2: components {0,1} and {2,3}.
  Matrix pts(4, 1);
  pts(0, 0) = 0.0;
  pts(1, 0) = 1.0;
  pts(2, 0) = 10.0;
  pts(3, 0) = 11.0;
  Dataset ds = make_dataset(std::move(pts));
  DistanceMatrix dm = pairwise_distances(ds, MetricKind::L2);
  Graph g = threshold_graph(dm, 2.0);
  LaplacianMatrix L = laplacian(g, LaplacianVariant::Unnormalized);

  SpectralDecomposition s = decompose(L);
  REQUIRE(zero_multiplicity(s) == 2);

  // Column 0: the normalized all-ones vector.
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(s.eigenvectors(i, 0) == doctest::Approx(0.5).epsilon(1e-12));

  // Column 1: Gram-Schmidt of the first coordinate-indicator projection,
  // which here is the (+,+,-,-)/2 component-contrast vector.
  CHECK(s.eigenvectors(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s.eigenvectors(1, 1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s.eigenvectors(2, 1) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(s.eigenvectors(3, 1) == doctest::Approx(-0.5).epsilon(1e-12));

  // Kernel columns are exact eigenvectors: L v = 0.
  for (std::size_t col = 0; col < 2; ++col) {
    for (std::size_t i = 0; i < 4; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < 4; ++j) sum += L.m(i, j) * s.eigenvectors(j, col);
      CHECK(std::abs(sum) < 1e-12);
    }
  }

  // Off-kernel columns agree with the raw solver output.
  SpectralDecomposition raw = eigh(L.m);
  for (std::size_t col = 2; col < 4; ++col)
    for (std::size_t i = 0; i < 4; ++i)
      CHECK(s.eigenvectors(i, col) == raw.eigenvectors(i, col));
}

TEST_CASE("scaled laplacians keep the raw solver kernel") {
  Matrix pts(4, 1);
  pts(0, 0) = 0.0;
  pts(1, 0) = 1.0;
  pts(2, 0) = 10.0;
  pts(3, 0) = 11.0;
  Dataset ds = make_dataset(std::move(pts));
  Graph g = threshold_graph(pairwise_distances(ds, MetricKind::L2), 2.0);
  LaplacianMatrix L = laplacian(g, LaplacianVariant::Scaled);
  SpectralDecomposition via_decompose = decompose(L);
  SpectralDecomposition raw = eigh(L.m);
  CHECK(via_decompose.eigenvalues == raw.eigenvalues);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      CHECK(via_decompose.eigenvectors(i, j) == raw.eigenvectors(i, j));
}
