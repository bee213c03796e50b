#include "wishart/complex_density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wishart/errors.hpp"
#include "wishart/linalg.hpp"
#include "wishart/parallel.hpp"
#include "wishart/symfun.hpp"

namespace wishart {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_complex(const EmpiricalSpectrum& s) {
  if (s.beta() != Beta::Complex)
    throw InvalidArgument("the closed-form density applies to beta = 2 only");
}

// log(x^m / m!), with x^0 = 1 also at x = 0.
double log_power_over_factorial(double x, int m) {
  if (m == 0) return 0.0;
  if (x == 0.0) return kNegInf;
  return m * std::log(x) - std::lgamma(m + 1.0);
}

// Signed term kept as (sign, log|value|).
struct LogTerm {
  double sign;
  double log_abs;
};

double sum_log_terms(const std::vector<LogTerm>& terms) {
  double top = kNegInf;
  for (const auto& t : terms)
    if (t.sign != 0.0) top = std::max(top, t.log_abs);
  if (top == kNegInf) return 0.0;
  double acc = 0.0;
  for (const auto& t : terms)
    if (t.sign != 0.0) acc += t.sign * std::exp(t.log_abs - top);
  return acc * std::exp(top);
}

}  // namespace

double s2_residue_sum(const EmpiricalSpectrum& spectrum, double x) {
  require_complex(spectrum);
  if (x < 0.0) return 0.0;
  const auto lam = spectrum.lambdas();
  const int n = spectrum.n();
  const int p = spectrum.p();

  std::vector<LogTerm> terms;
  terms.reserve(static_cast<std::size_t>(p * p));
  for (int j = 0; j < p; ++j) {
    const double lj = lam[j];
    double denom_sign = 1.0, denom_log = 0.0;
    for (int l = 0; l < p; ++l) {
      if (l == j) continue;
      const double f = 1.0 - lam[l] / lj;
      if (std::abs(f) < kDegeneracyTol) throw DegenerateSpectrum("coinciding eigenvalues in residue sum");
      denom_sign *= f < 0.0 ? -1.0 : 1.0;
      denom_log += std::log(std::abs(f));
    }
    const double prefactor = -x / lj - n * std::log(lj) - denom_log;
    const auto e = symfun::elementary_symmetric(symfun::leave_out(lam, static_cast<std::size_t>(j)));
    for (int k = 1; k <= p; ++k) {
      const double ek = e(k - 1);
      const double sign = ((k - 1) % 2 ? -1.0 : 1.0) * denom_sign;
      terms.push_back({sign, prefactor + std::log(ek) + log_power_over_factorial(x, n - k)});
    }
  }
  return sum_log_terms(terms) / p;
}

double s2_determinant_ratio(const EmpiricalSpectrum& spectrum, double x) {
  require_complex(spectrum);
  if (x < 0.0) return 0.0;
  const auto lam = spectrum.lambdas();
  const int n = spectrum.n();
  const auto p = static_cast<std::size_t>(spectrum.p());
  const std::size_t dim = p + 1;

  // Entry logs and signs of [[0, B], [C, D]].
  std::vector<double> lg(dim * dim, kNegInf), sg(dim * dim, 0.0);
  auto at = [dim](std::size_t r, std::size_t c) { return r * dim + c; };
  for (std::size_t j = 1; j <= p; ++j) {
    const double lj = lam[j - 1];
    lg[at(0, j)] = -x / lj - n * std::log(lj);
    sg[at(0, j)] = 1.0;
  }
  for (std::size_t k = 1; k <= p; ++k) {
    lg[at(k, 0)] = log_power_over_factorial(x, n - static_cast<int>(k));
    sg[at(k, 0)] = lg[at(k, 0)] == kNegInf ? 0.0 : -1.0;
    for (std::size_t j = 1; j <= p; ++j) {
      lg[at(k, j)] = (1.0 - static_cast<double>(k)) * std::log(lam[j - 1]);
      sg[at(k, j)] = 1.0;
    }
  }

  // Equilibrate the D block by rows then columns, carrying each factor onto
  // the border; finally normalize the border row and column on their own.
  double log_scale = 0.0;
  for (std::size_t r = 1; r < dim; ++r) {
    double top = kNegInf;
    for (std::size_t c = 1; c < dim; ++c) top = std::max(top, lg[at(r, c)]);
    for (std::size_t c = 0; c < dim; ++c) lg[at(r, c)] -= top;
    log_scale += top;
  }
  for (std::size_t c = 1; c < dim; ++c) {
    double top = kNegInf;
    for (std::size_t r = 1; r < dim; ++r) top = std::max(top, lg[at(r, c)]);
    for (std::size_t r = 0; r < dim; ++r) lg[at(r, c)] -= top;
    log_scale += top;
  }
  for (bool row : {true, false}) {
    double top = kNegInf;
    for (std::size_t i = 1; i < dim; ++i) top = std::max(top, row ? lg[at(0, i)] : lg[at(i, 0)]);
    if (top == kNegInf) return 0.0;
    for (std::size_t i = 1; i < dim; ++i) (row ? lg[at(0, i)] : lg[at(i, 0)]) -= top;
    log_scale += top;
  }
  linalg::Matrix<double> m(dim, dim);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c)
      m(r, c) = sg[at(r, c)] == 0.0 ? 0.0 : sg[at(r, c)] * std::exp(lg[at(r, c)]);

  const auto det = linalg::determinant(m);
  if (det.mantissa == 0.0) return 0.0;

  // log|det D| from the product formula.
  double vd_sign = 1.0, vd_log = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t jp = 0; jp < j; ++jp) {
      if (std::abs(lam[j] - lam[jp]) < kDegeneracyTol * std::max(lam[j], lam[jp]))
        throw DegenerateSpectrum("coinciding eigenvalues in determinant form");
      const double d = 1.0 / lam[j] - 1.0 / lam[jp];
      vd_sign *= d < 0.0 ? -1.0 : 1.0;
      vd_log += std::log(std::abs(d));
    }
  }
  const double sign = (det.mantissa < 0.0 ? -1.0 : 1.0) * vd_sign;
  const double log_abs = std::log(std::abs(det.mantissa)) +
                         static_cast<double>(det.exponent) * std::log(2.0) + log_scale - vd_log;
  return sign * std::exp(log_abs) / static_cast<double>(p);
}

DensityCurve s2_curve(const EmpiricalSpectrum& spectrum, std::span<const double> grid) {
  require_complex(spectrum);
  DensityCurve curve;
  curve.grid.assign(grid.begin(), grid.end());
  curve.values.resize(grid.size());
  curve.errors.resize(grid.size());
  for (double x : grid)
    if (!std::isfinite(x)) throw InvalidArgument("grid points must be finite");

  parallel_for(grid.size(), [&](std::size_t i) {
    const double res = s2_residue_sum(spectrum, grid[i]);
    const double det = s2_determinant_ratio(spectrum, grid[i]);
    curve.values[i] = res;
    curve.errors[i] = std::abs(res - det);
  });

  double peak = 0.0, worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    peak = std::max(peak, std::abs(curve.values[i]));
    worst = std::max(worst, curve.errors[i]);
  }
  curve.conditioning_warning = worst > kFormDisagreementTol * peak;
  clamp_roundoff(curve);
  return curve;
}

}  // namespace wishart
