#include "srf/eigensolver.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "srf/tolerances.hpp"

namespace srf {

namespace {

// Householder reduction of a symmetric matrix to tridiagonal form, with the
// orthogonal transform accumulated in v. d receives the diagonal, e the
// subdiagonal in e[1..n-1].
void tred2(Matrix& v, std::vector<double>& d, std::vector<double>& e) {
  std::size_t n = v.rows();
  for (std::size_t j = 0; j < n; ++j) d[j] = v(n - 1, j);

  for (std::size_t i = n - 1; i > 0; --i) {
    double scale = 0.0;
    double h = 0.0;
    for (std::size_t k = 0; k < i; ++k) scale += std::abs(d[k]);
    if (scale == 0.0) {
      e[i] = d[i - 1];
      for (std::size_t j = 0; j < i; ++j) {
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
        v(j, i) = 0.0;
      }
    } else {
      for (std::size_t k = 0; k < i; ++k) {
        d[k] /= scale;
        h += d[k] * d[k];
      }
      double f = d[i - 1];
      double g = std::sqrt(h);
      if (f > 0) g = -g;
      e[i] = scale * g;
      h -= f * g;
      d[i - 1] = f - g;
      for (std::size_t j = 0; j < i; ++j) e[j] = 0.0;

      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        v(j, i) = f;
        g = e[j] + v(j, j) * f;
        for (std::size_t k = j + 1; k < i; ++k) {
          g += v(k, j) * d[k];
          e[k] += v(k, j) * f;
        }
        e[j] = g;
      }
      f = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        e[j] /= h;
        f += e[j] * d[j];
      }
      double hh = f / (h + h);
      for (std::size_t j = 0; j < i; ++j) e[j] -= hh * d[j];
      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        g = e[j];
        for (std::size_t k = j; k < i; ++k) v(k, j) -= f * e[k] + g * d[k];
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
      }
    }
    d[i] = h;
  }

  for (std::size_t i = 0; i + 1 < n; ++i) {
    v(n - 1, i) = v(i, i);
    v(i, i) = 1.0;
    double h = d[i + 1];
    if (h != 0.0) {
      for (std::size_t k = 0; k <= i; ++k) d[k] = v(k, i + 1) / h;
      for (std::size_t j = 0; j <= i; ++j) {
        double g = 0.0;
        for (std::size_t k = 0; k <= i; ++k) g += v(k, i + 1) * v(k, j);
        for (std::size_t k = 0; k <= i; ++k) v(k, j) -= g * d[k];
      }
    }
    for (std::size_t k = 0; k <= i; ++k) v(k, i + 1) = 0.0;
  }
  for (std::size_t j = 0; j < n; ++j) {
    d[j] = v(n - 1, j);
    v(n - 1, j) = 0.0;
  }
  v(n - 1, n - 1) = 1.0;
  e[0] = 0.0;
}

// Implicit-shift QL on the tridiagonal (d, e), rotations accumulated into the
// columns of v. The shift comes from the leading 2x2 block (Wilkinson). Caps
// at max_ql_sweeps sweeps per eigenvalue.
void tql2(Matrix& v, std::vector<double>& d, std::vector<double>& e) {
  std::size_t n = v.rows();
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;

  const double eps = std::pow(2.0, -52.0);
  const int cap = tolerances().max_ql_sweeps;
  double f = 0.0;
  double tst1 = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    std::size_t m = l;
    while (m < n && std::abs(e[m]) > eps * tst1) ++m;
    if (m > l) {
      int iter = 0;
      do {
        if (++iter > cap)
          throw std::runtime_error("eigh: QL failed to converge for eigenvalue " +
                                   std::to_string(l) + " of " + std::to_string(n) + " after " +
                                   std::to_string(cap) + " sweeps");
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        double dl1 = d[l + 1];
        double h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
        f += h;

        p = d[m];
        double c = 1.0;
        double c2 = c;
        double c3 = c;
        double el1 = e[l + 1];
        double s = 0.0;
        double s2 = 0.0;
        for (std::size_t i = m; i-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[i];
          h = c * p;
          r = std::hypot(p, e[i]);
          e[i + 1] = s * r;
          s = e[i] / r;
          c = p / r;
          p = c * d[i] - s * g;
          d[i + 1] = h + s * (c * g + s * d[i]);
          for (std::size_t k = 0; k < n; ++k) {
            h = v(k, i + 1);
            v(k, i + 1) = s * v(k, i) + c * h;
            v(k, i) = c * v(k, i) - s * h;
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }

  // Ascending selection sort; swaps whole eigenvector columns.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    std::size_t k = i;
    double p = d[i];
    for (std::size_t j = i + 1; j < n; ++j)
      if (d[j] < p) {
        k = j;
        p = d[j];
      }
    if (k != i) {
      d[k] = d[i];
      d[i] = p;
      for (std::size_t j = 0; j < n; ++j) {
        p = v(j, i);
        v(j, i) = v(j, k);
        v(j, k) = p;
      }
    }
  }
}

}  // namespace

SpectralDecomposition eigh(const Matrix& a) {
  std::size_t n = a.rows();
  if (n == 0 || a.cols() != n) throw std::invalid_argument("eigh: matrix must be square");
  double asym = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      asym = std::max(asym, std::abs(a(i, j) - a(j, i)));
  if (asym > tolerances().symmetry)
    throw std::invalid_argument("eigh: matrix asymmetry " + std::to_string(asym) +
                                " exceeds tolerance");
  for (double x : a.data())
    if (!std::isfinite(x)) throw std::invalid_argument("eigh: non-finite entry");

  SpectralDecomposition s;
  s.eigenvalues.assign(n, 0.0);
  s.eigenvectors = a;
  if (n == 1) {
    s.eigenvalues[0] = a(0, 0);
    s.eigenvectors(0, 0) = 1.0;
    return s;
  }
  std::vector<double> e(n, 0.0);
  tred2(s.eigenvectors, s.eigenvalues, e);
  tql2(s.eigenvectors, s.eigenvalues, e);
  return s;
}

std::size_t zero_multiplicity(const SpectralDecomposition& s) {
  double cut = tolerances().zero_eigenvalue(s.size());
  std::size_t m = 0;
  while (m < s.size() && s.eigenvalues[m] < cut) ++m;
  return m;
}

double eigengap(const SpectralDecomposition& s, std::size_t i, std::size_t j) {
  if (i < 1 || i >= j || j > s.size())
    throw std::invalid_argument("eigengap: need 1 <= i < j <= n");
  return std::max(0.0, s.eigenvalues[j - 1] - s.eigenvalues[i - 1]);
}

void sign_fix(std::span<double> v) {
  double cut = tolerances().sign_zero;
  for (double x : v) {
    if (std::abs(x) > cut) {
      if (x < 0)
        for (auto& y : v) y = -y;
      return;
    }
  }
  throw std::runtime_error("sign_fix: every entry is within " + std::to_string(cut) + " of zero");
}

SpectralDecomposition canonicalize_zero_space(SpectralDecomposition s) {
  const Tolerances& tol = tolerances();
  std::size_t n = s.size();
  std::size_t m = zero_multiplicity(s);
  if (m == 0) return s;

  std::vector<std::vector<double>> basis;
  basis.reserve(m);
  basis.emplace_back(n, 1.0 / std::sqrt(static_cast<double>(n)));

  // Project coordinate indicators onto the kernel span and keep Gram-Schmidt
  // survivors, in vertex order; the result depends only on the span.
  for (std::size_t vtx = 0; vtx < n && basis.size() < m; ++vtx) {
    std::vector<double> c(n, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      double w = s.eigenvectors(vtx, j);
      for (std::size_t i = 0; i < n; ++i) c[i] += w * s.eigenvectors(i, j);
    }
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) {
        double t = dot(c, b);
        for (std::size_t i = 0; i < n; ++i) c[i] -= t * b[i];
      }
    double nc = norm2(c);
    if (nc < tol.skip_residual) continue;
    for (auto& x : c) x /= nc;
    sign_fix(c);
    basis.push_back(std::move(c));
  }
  if (basis.size() != m)
    throw std::runtime_error("canonicalize_zero_space: could not complete a kernel basis");
  for (std::size_t j = 0; j < m; ++j) s.eigenvectors.set_col(j, basis[j]);
  return s;
}

SpectralDecomposition decompose(const LaplacianMatrix& lap) {
  SpectralDecomposition s = eigh(lap.m);
  if (lap.variant == LaplacianVariant::Unnormalized) s = canonicalize_zero_space(s);
  return s;
}

}
