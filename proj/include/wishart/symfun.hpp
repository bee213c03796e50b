#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace wishart::symfun {

using cdouble = std::complex<double>;

/// Elementary symmetric functions E_0..E_p of a list of values.
class SymTable {
 public:
  SymTable() : e_{1.0} {}
  explicit SymTable(std::vector<double> e) : e_(std::move(e)) {}

  /// E_k; zero for k < 0 and k > p.
  double operator()(int k) const noexcept {
    if (k < 0 || k >= static_cast<int>(e_.size())) return 0.0;
    return e_[static_cast<std::size_t>(k)];
  }
  int p() const noexcept { return static_cast<int>(e_.size()) - 1; }
  std::span<const double> values() const noexcept { return e_; }

 private:
  std::vector<double> e_;
};

/// Builds E_k by the product recurrence E_k^(m) = E_k^(m-1) + l_m E_{k-1}^(m-1).
/// Only additions of same-sign terms for positive inputs, so no cancellation.
SymTable elementary_symmetric(std::span<const double> values);

/// Copy of `values` without entry j (0-based). Throws IndexError.
std::vector<double> leave_out(std::span<const double> values, std::size_t j);

/// Copy of `values` without entries j and l (distinct, 0-based).
std::vector<double> leave_out2(std::span<const double> values, std::size_t j, std::size_t l);

/// g(x; s) = exp(-i x s) * prod_j (1 + i s l_j).
cdouble g_lambda(std::span<const double> values, double x, cdouble s);

/// First n Taylor coefficients in s of g(x; s), split into the degree < n
/// polynomial and the remaining tail.
class TruncatedExponentialProduct {
 public:
  TruncatedExponentialProduct(std::vector<double> values, double x, std::vector<cdouble> coeffs)
      : values_(std::move(values)), x_(x), coeffs_(std::move(coeffs)) {}

  double x() const noexcept { return x_; }
  std::span<const cdouble> coeffs() const noexcept { return coeffs_; }
  std::size_t order() const noexcept { return coeffs_.size(); }

  /// g^{[<n]}(x; s): sum of the stored terms, Neumaier-compensated.
  cdouble lower(cdouble s) const;
  /// g^{[>=n]}(x; s) = g(x; s) - g^{[<n]}(x; s).
  cdouble upper(cdouble s) const;

 private:
  std::vector<double> values_;
  double x_;
  std::vector<cdouble> coeffs_;
};

/// coeff_t = sum_{k+m=t} i^k E_k (-i x)^m / m!  for t < n. Requires n >= 1.
TruncatedExponentialProduct g_taylor_coeffs(std::span<const double> values, double x, std::size_t n);

/// prod_{j > j'} (1/l_j - 1/l_j'), the determinant of D with D_{k,j} = l_j^{-k+1}.
/// Throws DegenerateSpectrum if two values are closer than the degeneracy tolerance.
double vandermonde_det(std::span<const double> values);

}  // namespace wishart::symfun
