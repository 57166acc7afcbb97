#pragma once

#include <cstddef>
#include <vector>

#include "srf/graph.hpp"
#include "srf/linalg.hpp"

namespace srf {

// Full symmetric eigendecomposition. eigenvalues are ascending; eigenvectors
// stores the matching unit vectors as columns. Identical input bits always
// produce identical output bits: the solver is single-threaded and branches
// only on the input values.
struct SpectralDecomposition {
  std::vector<double> eigenvalues;
  Matrix eigenvectors;  // n x n, column j pairs with eigenvalues[j]

  std::size_t size() const { return eigenvalues.size(); }
};

// Householder tridiagonalization followed by implicit-shift QL with Wilkinson
// shifts. Requires max|A - A^T| <= tolerances().symmetry; throws on
// non-convergence (more than max_ql_sweeps sweeps for one eigenvalue).
SpectralDecomposition eigh(const Matrix& a);

// Number of eigenvalues below the kernel cutoff 1e-8 * n. For a threshold
// graph Laplacian this equals the number of connected components.
std::size_t zero_multiplicity(const SpectralDecomposition& s);

// max(0, lambda_j - lambda_i) with 1-based indices (i = 2, j = 3 asks for the
// gap above the Fiedler value).
double eigengap(const SpectralDecomposition& s, std::size_t i, std::size_t j);

// Flip v so its first entry larger than tolerances().sign_zero in magnitude is
// positive; throws when every entry is below that cutoff.
void sign_fix(std::span<double> v);

// Replaces the kernel columns of a decomposition of an unnormalized Laplacian
// with the canonical basis: first the normalized ones vector, then unit
// Gram-Schmidt survivors of the coordinate-indicator projections taken in
// vertex order. Deterministic for a given input; off-kernel columns are
// untouched.
SpectralDecomposition canonicalize_zero_space(SpectralDecomposition s);

// Convenience: eigh + zero-space canonicalization for unnormalized inputs
// (scaled kernels keep the solver basis).
SpectralDecomposition decompose(const LaplacianMatrix& lap);

}
