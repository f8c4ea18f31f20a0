#pragma once

// Shared helpers for the unit tests: independent oracles and random inputs.

#include <complex>
#include <random>
#include <vector>

#include "hlc/linalg.hpp"

namespace hlc_test {

using hlc::Complex;
using hlc::ComplexMatrix;

/// Characteristic polynomial det(lambda I - A) by Faddeev-LeVerrier:
/// coefficients c[0..n] of lambda^n + c[1] lambda^{n-1} + ... + c[n].
inline std::vector<Complex> charpoly(const ComplexMatrix& a) {
  const long n = a.rows();
  std::vector<Complex> c(static_cast<std::size_t>(n + 1));
  c[0] = 1.0;
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  for (long k = 1; k <= n; ++k) {
    m = a * m + c[static_cast<std::size_t>(k - 1)] * id;
    c[static_cast<std::size_t>(k)] = -(a * m).trace() / static_cast<double>(k);
  }
  return c;
}

inline Complex eval_poly(const std::vector<Complex>& c, Complex x) {
  Complex v = 0.0;
  for (const auto& ck : c) v = v * x + ck;
  return v;
}

inline ComplexMatrix random_matrix(std::mt19937_64& rng, long rows, long cols) {
  std::normal_distribution<double> g;
  ComplexMatrix m(rows, cols);
  for (long i = 0; i < rows; ++i)
    for (long k = 0; k < cols; ++k) m(i, k) = Complex(g(rng), g(rng));
  return m;
}

inline ComplexMatrix random_hermitian(std::mt19937_64& rng, long n) {
  const ComplexMatrix g = random_matrix(rng, n, n);
  return (g + g.adjoint()) / 2.0;
}

/// d x 2 filter scaled so its largest singular value is `top` (<= 1).
inline ComplexMatrix random_filter(std::mt19937_64& rng, long d, double top = 1.0) {
  const ComplexMatrix f = random_matrix(rng, d, 2);
  Eigen::JacobiSVD<ComplexMatrix> svd(f);
  return f * (top / svd.singularValues()(0));
}

}  // namespace hlc_test
