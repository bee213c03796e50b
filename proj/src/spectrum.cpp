#include "wishart/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wishart/errors.hpp"

namespace wishart {

Beta beta_from_int(int beta) {
  if (beta == 1) return Beta::Real;
  if (beta == 2) return Beta::Complex;
  throw InvalidArgument("beta must be 1 (real) or 2 (complex), got " + std::to_string(beta));
}

EmpiricalSpectrum validate_spectrum(int beta, int n, std::vector<double> raw) {
  const Beta b = beta_from_int(beta);
  if (raw.empty()) throw InvalidArgument("spectrum must contain at least one eigenvalue");
  if (n < 1) throw DimensionError("n must be a positive integer");
  for (double v : raw) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      std::ostringstream os;
      os << "eigenvalue " << v << " is not a positive finite number";
      throw NonPositiveEigenvalue(os.str());
    }
  }
  if (raw.size() > static_cast<std::size_t>(n)) {
    std::ostringstream os;
    os << "p = " << raw.size() << " exceeds n = " << n;
    throw DimensionError(os.str());
  }
  std::sort(raw.begin(), raw.end());
  for (std::size_t j = 0; j + 1 < raw.size(); ++j) {
    const double gap = (raw[j + 1] - raw[j]) / raw[j + 1];
    if (gap < kDegeneracyTol) {
      std::ostringstream os;
      os.precision(17);
      os << "eigenvalues " << raw[j] << " and " << raw[j + 1] << " have relative gap " << gap
         << " below " << kDegeneracyTol;
      throw DegenerateSpectrum(os.str());
    }
  }
  return EmpiricalSpectrum(b, n, std::move(raw));
}

EmpiricalSpectrum EmpiricalSpectrum::with_n(int n) const {
  return validate_spectrum(static_cast<int>(beta_), n, lambdas_);
}

EmpiricalSpectrum EmpiricalSpectrum::scaled(double factor) const {
  if (!(factor > 0.0)) throw InvalidArgument("scale factor must be positive");
  std::vector<double> l = lambdas_;
  for (double& v : l) v *= factor;
  return validate_spectrum(static_cast<int>(beta_), n_, std::move(l));
}

void require_real_density_domain(const EmpiricalSpectrum& spectrum) {
  if (spectrum.n() <= spectrum.p() + 3) {
    std::ostringstream os;
    os << "real-case density needs n > p + 3 (n = " << spectrum.n() << ", p = " << spectrum.p()
       << ")";
    throw RealCaseTooSmallN(os.str());
  }
}

void clamp_roundoff(DensityCurve& curve) {
  for (std::size_t i = 0; i < curve.values.size(); ++i) {
    if (curve.grid[i] < 0.0) {
      curve.values[i] = 0.0;
      continue;
    }
    double& v = curve.values[i];
    if (v < 0.0 && v >= -kErrFloor) {
      curve.errors[i] += -v;
      v = 0.0;
    }
  }
}

ComplexShift::ComplexShift(double x_, double eps_) : x(x_), eps(eps_) {
  if (!(eps_ > 0.0)) throw InvalidArgument("imaginary offset eps must be positive");
}

}  // namespace wishart
