#include "wishart/real_density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wishart/errors.hpp"
#include "wishart/parallel.hpp"

namespace wishart {

namespace {

void require_real(const EmpiricalSpectrum& s) {
  if (s.beta() != Beta::Real) throw InvalidArgument("the real-case formulas need beta = 1");
}

// log of the normalized weight r^((n-3)/2) e^(-r/2) / peak.
double log_weight(int n, double r, double log_peak) {
  const double a = 0.5 * (n - 3);
  if (r == 0.0) return a == 0.0 ? -log_peak : -INFINITY;
  return a * std::log(r) - 0.5 * r - log_peak;
}

struct EsfTables {
  std::vector<double> all;                 // E_k(l)
  std::vector<symfun::SymTable> drop1;     // E(l without j)
  std::vector<symfun::SymTable> drop2;     // E(l without j, l), row-major
};

EsfTables esf_tables(std::span<const double> lam) {
  const std::size_t p = lam.size();
  EsfTables t;
  auto e = symfun::elementary_symmetric(lam);
  t.all.assign(e.values().begin(), e.values().end());
  for (std::size_t j = 0; j < p; ++j)
    t.drop1.push_back(symfun::elementary_symmetric(symfun::leave_out(lam, j)));
  t.drop2.resize(p * p);
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t l = 0; l < p; ++l)
      if (j != l) t.drop2[j * p + l] = symfun::elementary_symmetric(symfun::leave_out2(lam, j, l));
  return t;
}

}  // namespace

CellPartition cell_partition(const EmpiricalSpectrum& spectrum, double x) {
  if (!(x > 0.0)) throw InvalidArgument("cell partition needs x > 0");
  const auto lam = spectrum.lambdas();
  const int p = spectrum.p();
  CellPartition cp;
  cp.x = x;
  for (int m = 0; m < p; ++m) cp.boundaries.push_back(x / lam[p - 1 - m]);
  cp.cells.push_back({0.0, cp.boundaries.front()});
  for (int m = 1; m < p; ++m) cp.cells.push_back({cp.boundaries[m - 1], cp.boundaries[m]});
  cp.cells.push_back({cp.boundaries.back(), INFINITY});
  for (int la = 0; la <= p; ++la)
    for (int lb = 0; lb <= p; ++lb)
      if ((la + lb) % 2 == 1) cp.odd_pairs.push_back({la, lb, ((la + lb - 1) / 2) % 2 ? -1 : 1});
  return cp;
}

double weight_log_peak(int n) {
  if (n <= 3) return 0.0;
  return 0.5 * (n - 3) * (std::log(n - 3.0) - 1.0);
}

double weight_tail(int n, double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw InvalidArgument("weight_tail ratio must lie in (0, 1)");
  const double target = std::log(ratio);
  const double a = n - 3.0;
  if (a <= 0.0) return -2.0 * target;
  auto g = [a](double r) { return 0.5 * a * std::log(r / a) - 0.5 * (r - a); };
  double lo = a, hi = 2.0 * a;
  while (g(hi) > target) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > target ? lo : hi) = mid;
  }
  return hi;
}

// ---------------------------------------------------------------- Z1Integrand

Z1Integrand::Z1Integrand(const EmpiricalSpectrum& spectrum, cdouble x0, cdouble x1)
    : lambdas_(spectrum.lambdas().begin(), spectrum.lambdas().end()),
      n_(spectrum.n()),
      p_(spectrum.p()),
      x0_(x0),
      x1_(x1),
      log_peak_(weight_log_peak(spectrum.n())) {
  require_real(spectrum);
  if (n_ < 3) throw InvalidArgument("the generating-function integral needs n >= 3");
  if (x0.imag() == 0.0 && x0.real() >= 0.0)
    throw InvalidArgument("x0 must lie off the positive real axis");
  if (!std::isfinite(x0.real()) || !std::isfinite(x0.imag()) || !std::isfinite(x1.real()) ||
      !std::isfinite(x1.imag()))
    throw InvalidArgument("x0 and x1 must be finite");

  const auto p = static_cast<std::size_t>(p_);
  const auto t = esf_tables(lambdas_);
  b1_.resize(p + 1);
  p_kj_.assign((p + 1) * p, 0.0);
  m_kjl_.assign((p + 1) * p * p, 0.0);
  for (std::size_t k = 0; k <= p; ++k) {
    const int ki = static_cast<int>(k);
    b1_[k] = static_cast<double>(n_) * (n_ - 1) * t.all[k];
    for (std::size_t j = 0; j < p; ++j) {
      const double lj2 = lambdas_[j] * lambdas_[j];
      p_kj_[k * p + j] = (n_ - 1) * lj2 * t.drop1[j](ki - 1);
      for (std::size_t l = 0; l < p; ++l) {
        if (l == j) continue;
        const double ll2 = lambdas_[l] * lambdas_[l];
        m_kjl_[(k * p + j) * p + l] = lj2 * ll2 * t.drop2[j * p + l](ki - 2);
      }
    }
  }
}

cdouble Z1Integrand::sqrt_factor(double lambda, double r) const {
  const cdouble z = x0_ - lambda * r;
  if (x0_.imag() == 0.0) return {0.0, std::sqrt(-z.real())};
  return std::sqrt(z);
}

cdouble Z1Integrand::inverse_sqrt_product(double ra, double rb) const {
  cdouble prod{1.0, 0.0};
  for (double l : lambdas_) prod *= sqrt_factor(l, ra) * sqrt_factor(l, rb);
  return 1.0 / prod;
}

Z1Integrand::Node Z1Integrand::node(double r) const {
  const auto p = static_cast<std::size_t>(p_);
  Node nd;
  cdouble inv{1.0, 0.0};
  for (double l : lambdas_) inv /= sqrt_factor(l, r);
  nd.base = std::exp(log_weight(n_, r, log_peak_)) * inv;
  nd.u.resize(p);
  for (std::size_t j = 0; j < p; ++j) nd.u[j] = r / (x0_ - lambdas_[j] * r);
  nd.s.assign(p + 1, cdouble{});
  nd.v.assign((p + 1) * p, cdouble{});
  for (std::size_t k = 0; k <= p; ++k) {
    for (std::size_t j = 0; j < p; ++j) {
      nd.s[k] += p_kj_[k * p + j] * nd.u[j];
      cdouble acc{};
      for (std::size_t l = 0; l < p; ++l) acc += m_kjl_[(k * p + j) * p + l] * nd.u[l];
      nd.v[k * p + j] = acc;
    }
  }
  return nd;
}

void Z1Integrand::eval(const Node& a, const Node& b, double ra, double rb,
                         std::span<cdouble> acc, double weight) const {
  const auto p = static_cast<std::size_t>(p_);
  const cdouble w = (weight * std::abs(ra - rb)) * a.base * b.base;
  for (std::size_t k = 0; k <= p; ++k) {
    cdouble val = b1_[k] + a.s[k] + b.s[k];
    for (std::size_t j = 0; j < p; ++j) val += a.u[j] * b.v[k * p + j];
    acc[k] += w * val;
  }
}

void Z1Integrand::bracket_terms(double ra, double rb, std::span<cdouble> out) const {
  std::fill(out.begin(), out.end(), cdouble{});
  eval(node(ra), node(rb), ra, rb, out, 1.0);
}

std::vector<cdouble> Z1Integrand::k_coefficients(cdouble x1) const {
  std::vector<cdouble> c(static_cast<std::size_t>(p_) + 1);
  for (int k = 0; k <= p_; ++k) {
    const double mag = std::exp(2.0 * log_peak_ - std::lgamma(n_ - k + 1.0));
    c[static_cast<std::size_t>(k)] = (k % 2 ? -mag : mag) * std::pow(x1, p_ - k);
  }
  return c;
}

std::vector<cdouble> Z1Integrand::k_coefficients_dx1(cdouble x1) const {
  std::vector<cdouble> c(static_cast<std::size_t>(p_) + 1);
  for (int k = 0; k < p_; ++k) {
    const double mag = (p_ - k) * std::exp(2.0 * log_peak_ - std::lgamma(n_ - k + 1.0));
    c[static_cast<std::size_t>(k)] = (k % 2 ? -mag : mag) * std::pow(x1, p_ - k - 1);
  }
  return c;
}

cdouble Z1Integrand::operator()(double ra, double rb) const {
  std::vector<cdouble> terms(static_cast<std::size_t>(p_) + 1);
  bracket_terms(ra, rb, terms);
  const auto coef = k_coefficients(x1_);
  cdouble sum{};
  for (std::size_t k = 0; k < terms.size(); ++k) sum += coef[k] * terms[k];
  return sum / 8.0;
}

// ---------------------------------------------------------------------- Z_1

std::vector<double> z1_breakpoints(const EmpiricalSpectrum& spectrum, cdouble x0) {
  const double r_max = weight_tail(spectrum.n());
  constexpr int kBasePanels = 24;
  const double h0 = r_max / kBasePanels;
  std::vector<double> br;
  for (int i = 0; i <= kBasePanels; ++i) br.push_back(h0 * i);
  for (int m = 1; m <= 10; ++m) br.push_back(h0 * std::ldexp(1.0, -m));
  for (double l : spectrum.lambdas()) {
    const double c = x0.real() / l;
    const double w = std::abs(x0.imag()) / l;
    if (c <= 0.0 || c >= r_max || w == 0.0) continue;
    br.push_back(c);
    for (double d = w; d < h0; d *= 2.0) {
      if (c - d > 0.0) br.push_back(c - d);
      if (c + d < r_max) br.push_back(c + d);
    }
  }
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end()), br.end());
  return br;
}

Z1Result z1_eq56(const EmpiricalSpectrum& spectrum, cdouble x0, cdouble x1,
                 const quad::QuadratureConfig& cfg, int max_refinements) {
  const Z1Integrand f(spectrum, x0, x1);
  quad::GridOptions opt;
  opt.symmetric = true;
  opt.max_refinements = max_refinements;
  const std::size_t dim = static_cast<std::size_t>(spectrum.p()) + 1;
  auto r = quad::integrate_2d_grid(f, z1_breakpoints(spectrum, x0), dim, cfg, opt);

  Z1Result out;
  out.k_integrals = std::move(r.value);
  for (auto& v : out.k_integrals) v /= 8.0;
  const auto coef = f.k_coefficients(x1);
  double coef_mag = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    out.value += coef[k] * out.k_integrals[k];
    coef_mag += std::abs(coef[k]);
  }
  out.err_estimate = coef_mag * r.err_estimate / 8.0;
  out.evaluations = r.evaluations;
  return out;
}

cdouble z1_at(const EmpiricalSpectrum& spectrum, const Z1Result& z, cdouble x1) {
  // x0 only enters the integrals, so any admissible value builds the coefficients.
  const Z1Integrand f(spectrum, cdouble(-1.0, 0.0), x1);
  const auto coef = f.k_coefficients(x1);
  if (coef.size() != z.k_integrals.size()) throw InvalidArgument("Z1 result does not match spectrum");
  cdouble sum{};
  for (std::size_t k = 0; k < coef.size(); ++k) sum += coef[k] * z.k_integrals[k];
  return sum;
}

double s1_epsilon_oracle(const EmpiricalSpectrum& spectrum, double x, double eps, double h,
                         const quad::QuadratureConfig& cfg) {
  if (!(eps > 0.0) || !(h > 0.0)) throw InvalidArgument("eps and h must be positive");
  require_real_density_domain(spectrum);
  const auto z = z1_eq56(spectrum, cdouble(x, -eps), cdouble(x, 0.0), cfg);
  const cdouble d = (z1_at(spectrum, z, x + h) - z1_at(spectrum, z, x - h)) / (2.0 * h);
  return d.imag() / (std::numbers::pi * spectrum.p());
}

double richardson_eps(double at_eps, double at_half, double at_quarter) {
  return (8.0 * at_quarter - 6.0 * at_half + at_eps) / 3.0;
}

// ---------------------------------------------------------------------- S_1

S1Coefficients s1_coefficients(const EmpiricalSpectrum& spectrum, double x) {
  require_real(spectrum);
  if (!(x > 0.0)) throw InvalidArgument("s1 coefficients need x > 0");
  const auto lam = spectrum.lambdas();
  const int n = spectrum.n();
  const int p = spectrum.p();
  const auto pp = static_cast<std::size_t>(p);
  const double two_peak = 2.0 * weight_log_peak(n);

  std::vector<double> c(pp + 1, 0.0);
  for (int k = 0; k < p; ++k) {
    const double mag =
        (p - k) * std::exp((p - k - 1) * std::log(x) + two_peak - std::lgamma(n - k + 1.0));
    c[static_cast<std::size_t>(k)] = k % 2 ? -mag : mag;
  }

  const auto t = esf_tables(lam);
  S1Coefficients out;
  out.a1.assign(pp, 0.0);
  out.a2.assign(pp * pp, 0.0);
  for (int k = 0; k <= p; ++k) {
    const double ck = c[static_cast<std::size_t>(k)];
    out.a0 += static_cast<double>(n) * (n - 1) * ck * t.all[static_cast<std::size_t>(k)];
    for (std::size_t j = 0; j < pp; ++j) {
      out.a1[j] += (n - 1) * lam[j] * lam[j] * ck * t.drop1[j](k - 1);
      for (std::size_t l = 0; l < pp; ++l)
        if (l != j)
          out.a2[j * pp + l] +=
              lam[j] * lam[j] * lam[l] * lam[l] * ck * t.drop2[j * pp + l](k - 2);
    }
  }
  return out;
}

namespace {

int cell_index(std::span<const double> lam, double x, double r) {
  int l = 0;
  for (double v : lam)
    if (v * r > x) ++l;
  return l;
}

// Normalized weight divided by prod_{i != skip} sqrt|x - l_i r|.
double cell_weight(std::span<const double> lam, int n, double log_peak, double x, double r,
                   std::size_t skip = static_cast<std::size_t>(-1)) {
  double v = std::exp(log_weight(n, r, log_peak));
  for (std::size_t i = 0; i < lam.size(); ++i)
    if (i != skip) v /= std::sqrt(std::abs(x - lam[i] * r));
  return v;
}

}  // namespace

double s1_integrand(const EmpiricalSpectrum& spectrum, const S1Coefficients& c, double x,
                    double ra, double rb) {
  const auto lam = spectrum.lambdas();
  const auto p = lam.size();
  const int la = cell_index(lam, x, ra);
  const int lb = cell_index(lam, x, rb);
  if ((la + lb) % 2 == 0) return 0.0;
  const double sign = ((la + lb - 1) / 2) % 2 ? -1.0 : 1.0;
  const double lp = weight_log_peak(spectrum.n());

  std::vector<double> ua(p), ub(p);
  for (std::size_t j = 0; j < p; ++j) {
    ua[j] = ra / (x - lam[j] * ra);
    ub[j] = rb / (x - lam[j] * rb);
  }
  double bracket = c.a0;
  for (std::size_t j = 0; j < p; ++j) {
    bracket += c.a1[j] * (ua[j] + ub[j]);
    for (std::size_t l = 0; l < p; ++l)
      if (l != j) bracket += c.a2[j * p + l] * ua[j] * ub[l];
  }
  return sign * std::abs(ra - rb) * cell_weight(lam, spectrum.n(), lp, x, ra) *
         cell_weight(lam, spectrum.n(), lp, x, rb) * bracket;
}

namespace {

// I[m][t] = FP int_cell r^m T_t(r) dr, T_0 = weight, T_{j+1} = weight * r/(x - l_j r).
struct CellIntegrals {
  std::vector<double> value;  // index m * (p + 1) + t
  std::vector<double> err;
};

CellIntegrals cell_integrals(const EmpiricalSpectrum& spectrum, double x, const quad::Interval& cell,
                             int cell_l, double r_tail, const quad::QuadratureConfig& cfg) {
  const auto lam = spectrum.lambdas();
  const int n = spectrum.n();
  const int p = spectrum.p();
  const auto pp = static_cast<std::size_t>(p);
  const double lp = weight_log_peak(n);

  // Eigenvalue index owning each finite cell end (none for 0 and the tail).
  const std::size_t none = pp;
  const std::size_t lo_owner = cell_l >= 1 ? pp - static_cast<std::size_t>(cell_l) : none;
  const std::size_t hi_owner = cell_l <= p - 1 ? pp - 1 - static_cast<std::size_t>(cell_l) : none;
  const double hi = std::isfinite(cell.hi) ? cell.hi : std::max(r_tail, 2.0 * cell.lo);
  const double mid = 0.5 * (cell.lo + hi);

  struct Segment {
    double a, b;
    double singular_end;  // boundary touched, or NaN
    std::size_t owner;
    quad::EndpointFlags flags;
  };
  const Segment segs[2] = {
      {cell.lo, mid, cell.lo, lo_owner, {true, false}},
      {mid, hi, std::isfinite(cell.hi) ? hi : NAN, hi_owner, {false, std::isfinite(cell.hi)}}};

  CellIntegrals out;
  out.value.assign(2 * (pp + 1), 0.0);
  out.err.assign(2 * (pp + 1), 0.0);
  for (int m = 0; m < 2; ++m) {
    for (std::size_t t = 0; t <= pp; ++t) {
      double val = 0.0, err = 0.0;
      for (const auto& s : segs) {
        const bool hadamard = t > 0 && s.owner == t - 1;
        if (!hadamard) {
          auto f = [&, m, t](double r) {
            double v = std::pow(r, m) * cell_weight(lam, n, lp, x, r);
            if (t > 0) v *= r / (x - lam[t - 1] * r);
            return v;
          };
          auto r = quad::integrate_1d(f, {s.a, s.b}, s.flags, cfg);
          val += r.value;
          err += r.err_estimate;
          continue;
        }
        const std::size_t j = t - 1;
        const double b = s.singular_end;
        const double far = s.a == b ? s.b : s.a;
        const double sigma = far > b ? 1.0 : -1.0;
        const double scale = -sigma * std::pow(lam[j], -1.5);
        auto psi = [&, m, j, scale](double r) {
          return scale * std::pow(r, m + 1) * cell_weight(lam, n, lp, x, r, j);
        };
        auto dpsi = [&, m, j](double r) {
          double logd = (m + 1) / r + 0.5 * (n - 3) / r - 0.5;
          for (std::size_t i = 0; i < pp; ++i)
            if (i != j) logd += 0.5 * lam[i] / (x - lam[i] * r);
          return psi(r) * logd;
        };
        auto r = quad::finite_part_endpoint(psi, dpsi, b, far, cfg);
        val += r.value;
        err += r.err_estimate;
      }
      out.value[static_cast<std::size_t>(m) * (pp + 1) + t] = val;
      out.err[static_cast<std::size_t>(m) * (pp + 1) + t] = err;
    }
  }
  return out;
}

}  // namespace

S1Value s1_exact(const EmpiricalSpectrum& spectrum, double x, const quad::QuadratureConfig& cfg) {
  require_real(spectrum);
  require_real_density_domain(spectrum);
  if (!std::isfinite(x)) throw InvalidArgument("s1_exact needs finite x");
  if (x <= 0.0) return {};
  cfg.validate();

  const int p = spectrum.p();
  const auto pp = static_cast<std::size_t>(p);
  const auto cp = cell_partition(spectrum, x);
  const auto co = s1_coefficients(spectrum, x);
  const double r_tail = weight_tail(spectrum.n());

  std::vector<CellIntegrals> cells;
  for (int l = 0; l <= p; ++l)
    cells.push_back(cell_integrals(spectrum, x, cp.cells[static_cast<std::size_t>(l)], l, r_tail, cfg));

  auto idx = [pp](int m, std::size_t t) { return static_cast<std::size_t>(m) * (pp + 1) + t; };
  double total = 0.0, total_err = 0.0;
  for (const auto& pair : cp.odd_pairs) {
    const auto& A = cells[static_cast<std::size_t>(pair.l_a)];
    const auto& B = cells[static_cast<std::size_t>(pair.l_b)];
    double v = 0.0, e = 0.0;
    // coef * (A[ma][ta] B[mb][tb] - A[mb'][ta] B[..]) expanded term by term.
    auto term = [&](double coef, int ma, std::size_t ta, int mb, std::size_t tb, double sgn) {
      const double ia = A.value[idx(ma, ta)], ib = B.value[idx(mb, tb)];
      v += sgn * coef * ia * ib;
      e += std::abs(coef) * (std::abs(ia) * B.err[idx(mb, tb)] + A.err[idx(ma, ta)] * std::abs(ib));
    };
    term(co.a0, 1, 0, 0, 0, 1.0);
    term(co.a0, 0, 0, 1, 0, -1.0);
    for (std::size_t j = 0; j < pp; ++j) {
      const double a1 = co.a1[j];
      term(a1, 1, j + 1, 0, 0, 1.0);
      term(a1, 0, j + 1, 1, 0, -1.0);
      term(a1, 1, 0, 0, j + 1, 1.0);
      term(a1, 0, 0, 1, j + 1, -1.0);
      for (std::size_t l = 0; l < pp; ++l) {
        if (l == j) continue;
        const double a2 = co.a2[j * pp + l];
        term(a2, 1, j + 1, 0, l + 1, 1.0);
        term(a2, 0, j + 1, 1, l + 1, -1.0);
      }
    }
    // |ra - rb| = s (ra - rb) with s = +1 when cell A lies to the right.
    const double s = pair.l_a > pair.l_b ? 1.0 : -1.0;
    total += pair.sign * s * v;
    total_err += e;
  }
  const double norm = 1.0 / (8.0 * std::numbers::pi * p);
  return {total * norm, total_err * norm};
}

DensityCurve s1_curve(const EmpiricalSpectrum& spectrum, std::span<const double> grid,
                      const quad::QuadratureConfig& cfg) {
  require_real(spectrum);
  require_real_density_domain(spectrum);
  for (double x : grid)
    if (!std::isfinite(x)) throw InvalidArgument("grid points must be finite");
  DensityCurve curve;
  curve.grid.assign(grid.begin(), grid.end());
  curve.values.resize(grid.size());
  curve.errors.resize(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    const auto v = s1_exact(spectrum, grid[i], cfg);
    curve.values[i] = v.value;
    curve.errors[i] = v.err_estimate;
  });
  clamp_roundoff(curve);
  return curve;
}

}  // namespace wishart
