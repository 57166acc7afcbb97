#pragma once

#include <algorithm>
#include <cstddef>

namespace srf {

// Every numeric tolerance used by the library lives here so tests and callers
// agree on one set of constants.
struct Tolerances {
  // eigh input must satisfy max|L - L^T| <= symmetry.
  double symmetry = 1e-10;
  // PSD inputs may carry eigenvalues down to -psd_slack from roundoff.
  double psd_slack = 1e-9;
  // Laplacian row sums must vanish within row_sum_per_vertex * n.
  double row_sum_per_vertex = 1e-12;
  // |v_i| below sign_zero is treated as zero by the sign rule.
  double sign_zero = 1e-12;
  // Gram-Schmidt residuals below skip_residual are dropped during zero-space
  // canonicalization.
  double skip_residual = 1e-10;
  // Spectral gaps at or below gap_vacuous make a certificate vacuous.
  double gap_vacuous = 1e-10;
  // Alignment inner products below alignment_zero flag an ambiguous sign.
  double alignment_zero = 1e-12;
  // QL sweeps per eigenvalue before the solver reports non-convergence.
  int max_ql_sweeps = 50;

  // Eigenvalues below this bound count as zero (kernel membership).
  double zero_eigenvalue(std::size_t n) const { return 1e-8 * static_cast<double>(n); }
  // Eigenvalues closer than this are treated as a degenerate cluster.
  double degenerate_cluster(double lambda_max) const {
    return 1e-8 * std::max(1.0, lambda_max);
  }
};

inline const Tolerances& tolerances() {
  static const Tolerances t;
  return t;
}

}
