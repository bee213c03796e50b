#include "wishart/checks.hpp"

#include "wishart/errors.hpp"
#include "wishart/real_density.hpp"

namespace wishart::checks {

double z1_unit_check(const EmpiricalSpectrum& spectrum, std::complex<double> x0,
                     const quad::QuadratureConfig& cfg) {
  return std::abs(z1_eq56(spectrum, x0, x0, cfg).value - 1.0);
}

std::vector<double> clt_limit_check(const EmpiricalSpectrum& spectrum, std::complex<double> x0,
                                    std::complex<double> x1, std::span<const int> n_sequence,
                                    const quad::QuadratureConfig& cfg) {
  if (!(x0.imag() > 0.0)) throw InvalidArgument("clt_limit_check needs Im x0 > 0");
  std::complex<double> limit = 1.0;
  for (double l : spectrum.lambdas()) limit *= (x1 - l) / (x0 - l);

  std::vector<double> out;
  out.reserve(n_sequence.size());
  for (int n : n_sequence) {
    const auto s = spectrum.with_n(n);
    const double scale = static_cast<double>(n);
    out.push_back(std::abs(z1_eq56(s, scale * x0, scale * x1, cfg).value - limit));
  }
  return out;
}

double conjugate_symmetry_check(const EmpiricalSpectrum& spectrum, std::complex<double> x0,
                                double x1, const quad::QuadratureConfig& cfg) {
  const auto a = z1_eq56(spectrum, x0, x1, cfg).value;
  const auto b = z1_eq56(spectrum, std::conj(x0), x1, cfg).value;
  return std::abs(b - std::conj(a));
}

}  // namespace wishart::checks
