#include "wishart/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "wishart/errors.hpp"

namespace wishart::linalg {

double ScaledDeterminant::value() const {
  return std::ldexp(mantissa, static_cast<int>(exponent));
}

ScaledDeterminant determinant(Matrix<double> a) {
  if (a.rows() != a.cols()) throw InvalidArgument("determinant of a non-square matrix");
  const std::size_t n = a.rows();
  ScaledDeterminant det{1.0, 0};
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a(r, c)) > std::abs(a(piv, c))) piv = r;
    if (a(piv, c) == 0.0) return {0.0, 0};
    if (piv != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a(piv, k), a(c, k));
      det.mantissa = -det.mantissa;
    }
    int e = 0;
    det.mantissa = std::frexp(det.mantissa * a(c, c), &e);
    det.exponent += e;
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a(r, c) / a(c, c);
      if (f == 0.0) continue;
      for (std::size_t k = c + 1; k < n; ++k) a(r, k) -= f * a(c, k);
    }
  }
  return det;
}

std::vector<double> jacobi_eigenvalues(Matrix<double> a, int max_sweeps) {
  if (a.rows() != a.cols()) throw InvalidArgument("jacobi_eigenvalues needs a square matrix");
  const std::size_t n = a.rows();

  double norm2 = 0.0;
  for (double v : a.data()) norm2 += v * v;
  const double target = 1e-12 * std::sqrt(norm2);

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  int sweep = 0;
  while (off_norm() > target) {
    if (sweep++ >= max_sweeps) {
      throw JacobiNonConvergence("cyclic Jacobi did not converge in " +
                                 std::to_string(max_sweeps) + " sweeps");
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation angle from the symmetric Schur decomposition of the 2x2 block.
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }

  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

}  // namespace wishart::linalg
