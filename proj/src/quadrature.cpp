#include "wishart/quadrature.hpp"

#include <array>
#include <mutex>
#include <numbers>

namespace wishart::quad {

void QuadratureConfig::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
    throw InvalidArgument("quadrature tolerances must be positive");
  if (panel_order < 4) throw InvalidArgument("panel_order must be at least 4");
  if (max_levels < 1) throw InvalidArgument("max_levels must be at least 1");
}

namespace {

GaussRule compute_rule(int order) {
  // Newton iteration on P_n starting from the Chebyshev-like guess.
  GaussRule rule;
  const auto n = static_cast<std::size_t>(order);
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (std::size_t k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / static_cast<double>(k);
      }
      dp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute the derivative at the converged node for the weight.
    double p0 = 1.0, p1 = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / static_cast<double>(k);
    }
    dp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
    const double wt = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = wt;
    rule.weights[n - 1 - i] = wt;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  constexpr int kMax = 128;
  if (order < 1 || order > kMax) throw InvalidArgument("Gauss-Legendre order out of range");
  static std::array<GaussRule, kMax + 1> cache;
  static std::array<std::once_flag, kMax + 1> flags;
  std::call_once(flags[static_cast<std::size_t>(order)],
                 [order] { cache[static_cast<std::size_t>(order)] = compute_rule(order); });
  return cache[static_cast<std::size_t>(order)];
}

QuadResult<double> integrate_2d_cell(const std::function<double(double, double)>& f,
                                     Interval cell_a, Interval cell_b, bool diagonal_split,
                                     const QuadratureConfig& cfg, EndpointFlags flags_a,
                                     EndpointFlags flags_b) {
  cfg.validate();
  // Inner integrals run ten times tighter so their noise stays below the
  // outer error estimate.
  QuadratureConfig inner_cfg = cfg;
  inner_cfg.abs_tol *= 0.1;
  inner_cfg.rel_tol *= 0.1;

  std::size_t evaluations = 0;
  double inner_err = 0.0;
  auto inner = [&](double ra) {
    auto row = [&f, ra](double rb) { return f(ra, rb); };
    std::vector<Interval> pieces;
    if (diagonal_split && ra > cell_b.lo && ra < cell_b.hi) {
      pieces = {{cell_b.lo, ra}, {ra, cell_b.hi}};
    } else {
      pieces = {cell_b};
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < pieces.size(); ++k) {
      EndpointFlags fl{};
      if (pieces[k].lo == cell_b.lo) fl.lower = flags_b.lower;
      if (pieces[k].hi == cell_b.hi) fl.upper = flags_b.upper;
      auto r = detail::integrate_1d_generic<double>(row, pieces[k], fl, inner_cfg, 0.0);
      sum += r.value;
      evaluations += r.evaluations;
      inner_err = std::max(inner_err, r.err_estimate);
    }
    return sum;
  };

  // Outer breakpoints at the ends of cell_b that fall inside cell_a.
  std::vector<double> cuts{cell_a.lo};
  if (diagonal_split) {
    for (double c : {cell_b.lo, cell_b.hi})
      if (c > cell_a.lo && c < cell_a.hi) cuts.push_back(c);
  }
  cuts.push_back(cell_a.hi);
  std::sort(cuts.begin(), cuts.end());

  QuadResult<double> out;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    EndpointFlags fl{};
    if (cuts[k] == cell_a.lo) fl.lower = flags_a.lower;
    if (cuts[k + 1] == cell_a.hi) fl.upper = flags_a.upper;
    auto r = detail::integrate_1d_generic<double>(inner, Interval{cuts[k], cuts[k + 1]}, fl, cfg,
                                                  0.0);
    out.value += r.value;
    out.err_estimate += r.err_estimate;
  }
  out.err_estimate += inner_err * std::abs(cell_a.width());
  out.evaluations = evaluations;
  return out;
}

namespace {

// (r - i0)^{-1/2} evaluated away from r = 0.
cdouble inv_sqrt_lower(double r) {
  if (r > 0.0) return {1.0 / std::sqrt(r), 0.0};
  return {0.0, 1.0 / std::sqrt(-r)};
}

}  // namespace

QuadResult<cdouble> principal_value_window(const std::function<double(double)>& g, double center,
                                           double delta_minus, double delta_plus,
                                           const QuadratureConfig& cfg,
                                           const std::optional<std::function<double(double)>>& dg) {
  if (!(delta_minus > 0.0) || !(delta_plus > 0.0))
    throw InvalidArgument("principal_value_window needs positive half-widths");
  const double h = 1e-5 * (delta_minus + delta_plus);
  auto deriv = [&](double r) {
    if (dg) return (*dg)(r);
    return (g(r + h) - g(r - h)) / (2.0 * h);
  };

  QuadResult<cdouble> out;
  out.value = -(g(center + delta_plus) * inv_sqrt_lower(delta_plus) -
                g(center - delta_minus) * inv_sqrt_lower(-delta_minus));

  // int_0^{dp} g'(c + r)/sqrt(r) dr and i * int_0^{dm} g'(c - t)/sqrt(t) dt.
  auto right = detail::integrate_1d_generic<double>(
      [&](double r) { return deriv(center + r) / std::sqrt(r); }, Interval{0.0, delta_plus},
      EndpointFlags{true, false}, cfg, 0.0);
  auto left = detail::integrate_1d_generic<double>(
      [&](double t) { return deriv(center - t) / std::sqrt(t); }, Interval{0.0, delta_minus},
      EndpointFlags{true, false}, cfg, 0.0);
  out.value += cdouble{right.value, left.value};
  out.err_estimate = right.err_estimate + left.err_estimate;
  out.evaluations = right.evaluations + left.evaluations + 2;
  return out;
}

QuadResult<double> finite_part_endpoint(const std::function<double(double)>& psi,
                                        const std::function<double(double)>& dpsi, double b,
                                        double far, const QuadratureConfig& cfg) {
  const double delta = std::abs(far - b);
  if (!(delta > 0.0)) throw InvalidArgument("finite_part_endpoint needs far != b");
  const double dir = far > b ? 1.0 : -1.0;
  auto r = detail::integrate_1d_generic<double>(
      [&](double t) { return 2.0 * dir * dpsi(b + dir * t) / std::sqrt(t); }, Interval{0.0, delta},
      EndpointFlags{true, false}, cfg, 0.0);
  r.value += -2.0 * psi(far) / std::sqrt(delta);
  r.evaluations += 1;
  return r;
}

}  // namespace wishart::quad
