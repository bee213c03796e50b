#include "wishart/symfun.hpp"

#include <cmath>
#include <sstream>

#include "wishart/errors.hpp"
#include "wishart/spectrum.hpp"

namespace wishart::symfun {

namespace {

constexpr cdouble kI{0.0, 1.0};

// Neumaier's variant of Kahan summation, applied to real and imaginary parts.
class CompensatedSum {
 public:
  void add(cdouble v) {
    add_part(sum_re_, comp_re_, v.real());
    add_part(sum_im_, comp_im_, v.imag());
  }
  cdouble value() const { return {sum_re_ + comp_re_, sum_im_ + comp_im_}; }

 private:
  static void add_part(double& sum, double& comp, double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  double sum_re_ = 0.0, comp_re_ = 0.0, sum_im_ = 0.0, comp_im_ = 0.0;
};

}  // namespace

SymTable elementary_symmetric(std::span<const double> values) {
  std::vector<double> e(values.size() + 1, 0.0);
  e[0] = 1.0;
  for (std::size_t m = 0; m < values.size(); ++m) {
    for (std::size_t k = m + 1; k >= 1; --k) e[k] += values[m] * e[k - 1];
  }
  return SymTable(std::move(e));
}

std::vector<double> leave_out(std::span<const double> values, std::size_t j) {
  if (j >= values.size()) {
    throw IndexError("leave_out index " + std::to_string(j) + " out of range for size " +
                     std::to_string(values.size()));
  }
  std::vector<double> out;
  out.reserve(values.size() - 1);
  for (std::size_t i = 0; i < values.size(); ++i)
    if (i != j) out.push_back(values[i]);
  return out;
}

std::vector<double> leave_out2(std::span<const double> values, std::size_t j, std::size_t l) {
  if (j >= values.size() || l >= values.size() || j == l) {
    throw IndexError("leave_out2 needs two distinct indices below " +
                     std::to_string(values.size()));
  }
  std::vector<double> out;
  out.reserve(values.size() - 2);
  for (std::size_t i = 0; i < values.size(); ++i)
    if (i != j && i != l) out.push_back(values[i]);
  return out;
}

cdouble g_lambda(std::span<const double> values, double x, cdouble s) {
  cdouble g = std::exp(-kI * x * s);
  for (double v : values) g *= 1.0 + kI * s * v;
  return g;
}

TruncatedExponentialProduct g_taylor_coeffs(std::span<const double> values, double x,
                                            std::size_t n) {
  if (n == 0) throw InvalidArgument("g_taylor_coeffs needs n >= 1");
  const SymTable e = elementary_symmetric(values);

  // Polynomial part: i^k E_k, k = 0..p. Exponential part: (-i x)^m / m!.
  std::vector<cdouble> poly(values.size() + 1);
  cdouble ik{1.0, 0.0};
  for (std::size_t k = 0; k < poly.size(); ++k) {
    poly[k] = ik * e(static_cast<int>(k));
    ik *= kI;
  }
  std::vector<cdouble> expo(n);
  expo[0] = 1.0;
  for (std::size_t m = 1; m < n; ++m) expo[m] = expo[m - 1] * (-kI * x) / static_cast<double>(m);

  std::vector<cdouble> coeffs(n);
  for (std::size_t t = 0; t < n; ++t) {
    CompensatedSum acc;
    for (std::size_t k = 0; k < poly.size() && k <= t; ++k) acc.add(poly[k] * expo[t - k]);
    coeffs[t] = acc.value();
  }
  return TruncatedExponentialProduct(std::vector<double>(values.begin(), values.end()), x,
                                     std::move(coeffs));
}

cdouble TruncatedExponentialProduct::lower(cdouble s) const {
  CompensatedSum acc;
  cdouble power{1.0, 0.0};
  for (const cdouble& c : coeffs_) {
    acc.add(c * power);
    power *= s;
  }
  return acc.value();
}

cdouble TruncatedExponentialProduct::upper(cdouble s) const {
  return g_lambda(values_, x_, s) - lower(s);
}

double vandermonde_det(std::span<const double> values) {
  double det = 1.0;
  for (std::size_t j = 0; j < values.size(); ++j) {
    for (std::size_t jp = 0; jp < j; ++jp) {
      const double hi = std::max(values[j], values[jp]);
      if (std::abs(values[j] - values[jp]) < kDegeneracyTol * hi) {
        std::ostringstream os;
        os << "values " << values[jp] << " and " << values[j] << " are degenerate";
        throw DegenerateSpectrum(os.str());
      }
      det *= 1.0 / values[j] - 1.0 / values[jp];
    }
  }
  return det;
}

}  // namespace wishart::symfun
