#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace wishart {

/// Dyson index of the ensemble: real (1) or complex (2) data matrices.
enum class Beta : int { Real = 1, Complex = 2 };

Beta beta_from_int(int beta);

/// Smallest accepted relative gap (l[j+1]-l[j])/l[j+1] between neighbouring
/// eigenvalues. Confluent spectra are rejected, not perturbed.
inline constexpr double kDegeneracyTol = 1e-8;

/// Negative density values above -kErrFloor are quadrature round-off and get
/// clamped to zero.
inline constexpr double kErrFloor = 1e-9;

/// Population correlation eigenvalues together with the ensemble parameters.
/// Only `validate_spectrum` constructs one, so the invariants (positive,
/// strictly increasing, p <= n, non-degenerate) always hold.
class EmpiricalSpectrum {
 public:
  Beta beta() const noexcept { return beta_; }
  int n() const noexcept { return n_; }
  int p() const noexcept { return static_cast<int>(lambdas_.size()); }
  std::span<const double> lambdas() const noexcept { return lambdas_; }
  double lambda(std::size_t j) const { return lambdas_.at(j); }
  double largest() const noexcept { return lambdas_.back(); }

  /// Same eigenvalues, different time-series length (used by the large-n
  /// checks). Re-validates p <= n.
  EmpiricalSpectrum with_n(int n) const;

  /// Same n and beta, eigenvalues multiplied by `factor` > 0.
  EmpiricalSpectrum scaled(double factor) const;

  friend bool operator==(const EmpiricalSpectrum&, const EmpiricalSpectrum&) = default;

 private:
  friend EmpiricalSpectrum validate_spectrum(int, int, std::vector<double>);
  EmpiricalSpectrum(Beta beta, int n, std::vector<double> lambdas)
      : beta_(beta), n_(n), lambdas_(std::move(lambdas)) {}

  Beta beta_;
  int n_;
  std::vector<double> lambdas_;
};

/// Sorts and checks raw input. Throws NonPositiveEigenvalue,
/// DegenerateSpectrum, DimensionError or InvalidArgument.
EmpiricalSpectrum validate_spectrum(int beta, int n, std::vector<double> raw);

/// The real-case density needs n > p + 3; throws RealCaseTooSmallN otherwise.
void require_real_density_domain(const EmpiricalSpectrum& spectrum);

/// Sampled one-point function with per-point absolute error estimates.
struct DensityCurve {
  std::vector<double> grid;
  std::vector<double> values;
  std::vector<double> errors;
  /// Set when two independent evaluation routes disagree beyond tolerance.
  bool conditioning_warning = false;
};

/// Applies the err_floor rule in place: values in [-kErrFloor, 0) become 0
/// with |value| added to the error; negative grid points get exactly 0.
void clamp_roundoff(DensityCurve& curve);

/// x +- i*eps with eps > 0.
struct ComplexShift {
  double x;
  double eps;

  ComplexShift(double x_, double eps_);
};

}  // namespace wishart
