#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <type_traits>
#include <valarray>
#include <vector>

#include "wishart/errors.hpp"

namespace wishart::quad {

using cdouble = std::complex<double>;

struct QuadratureConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  /// Maximum bisection depth of a single panel.
  int max_levels = 12;
  /// Gauss-Legendre nodes per panel.
  int panel_order = 16;

  /// Throws InvalidArgument unless tolerances > 0, panel_order >= 4, max_levels >= 1.
  void validate() const;
  double tolerance(double magnitude) const { return std::max(abs_tol, rel_tol * magnitude); }
};

template <class T>
struct QuadResult {
  T value{};
  double err_estimate = 0.0;
  std::size_t evaluations = 0;
};

struct Interval {
  double lo;
  double hi;
  double width() const { return hi - lo; }
};

/// Integrable r^{-1/2}-type singularity at an endpoint; removed by r = end +- t^2.
struct EndpointFlags {
  bool lower = false;
  bool upper = false;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached rule of the given order (1..128). Thread-safe.
const GaussRule& gauss_legendre(int order);

namespace detail {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const cdouble& v) { return std::abs(v); }
template <class T>
double magnitude(const std::valarray<T>& v) {
  double m = 0.0;
  for (const T& x : v) m = std::max(m, std::abs(x));
  return m;
}

/// Fixed Gauss rule on [a, b]. `zero` fixes the shape of vector results.
template <class V, class F>
V gauss_panel(F& f, double a, double b, const GaussRule& rule, const V& zero) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  V acc = zero;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    acc += f(mid + half * rule.nodes[i]) * (rule.weights[i] * half);
  }
  return acc;
}

/// Globally adaptive bisection. Each segment carries the sum over its two
/// halves (the accepted value) and the distance to the one-panel value on the
/// whole segment (the error estimate). The worst segment is split until the
/// summed estimate meets the tolerance; a segment at max_levels depth is
/// frozen instead of split.
template <class V, class F>
QuadResult<V> adaptive_gauss(F&& f, double a, double b, const QuadratureConfig& cfg,
                             const V& zero) {
  cfg.validate();
  const GaussRule& rule = gauss_legendre(cfg.panel_order);
  const std::size_t per_panel = rule.nodes.size();

  struct Segment {
    double a, b;
    int level;
    V left, right;
    double err;
  };
  auto make = [&](double lo, double hi, int level, const V& whole) {
    const double m = 0.5 * (lo + hi);
    Segment s{lo, hi, level, gauss_panel<V>(f, lo, m, rule, zero),
              gauss_panel<V>(f, m, hi, rule, zero), 0.0};
    V diff = s.left;
    diff += s.right;
    diff -= whole;
    s.err = magnitude(diff);
    return s;
  };
  auto by_err = [](const Segment& x, const Segment& y) { return x.err < y.err; };

  QuadResult<V> result;
  result.value = zero;
  if (a == b) return result;

  std::vector<Segment> heap;
  std::vector<Segment> frozen;
  heap.push_back(make(a, b, 0, gauss_panel<V>(f, a, b, rule, zero)));
  std::size_t evals = 3 * per_panel;

  auto exact_totals = [&](V& value, double& err) {
    value = zero;
    err = 0.0;
    for (const auto* set : {&heap, &frozen}) {
      for (const auto& s : *set) {
        value += s.left;
        value += s.right;
        err += s.err;
      }
    }
  };

  V value = zero;
  double err = 0.0;
  exact_totals(value, err);
  while (true) {
    if (err <= cfg.tolerance(magnitude(value))) {
      exact_totals(value, err);
      if (err <= cfg.tolerance(magnitude(value))) break;
    }
    if (heap.empty()) {
      exact_totals(value, err);
      if (err <= cfg.tolerance(magnitude(value))) break;
      throw QuadratureNonConvergence("adaptive Gauss-Legendre reached max_levels with error " +
                                     std::to_string(err) + " on [" + std::to_string(a) + ", " +
                                     std::to_string(b) + "]");
    }
    std::pop_heap(heap.begin(), heap.end(), by_err);
    Segment worst = std::move(heap.back());
    heap.pop_back();
    if (worst.level >= cfg.max_levels) {
      frozen.push_back(std::move(worst));
      continue;
    }
    const double m = 0.5 * (worst.a + worst.b);
    Segment lo = make(worst.a, m, worst.level + 1, worst.left);
    Segment hi = make(m, worst.b, worst.level + 1, worst.right);
    evals += 4 * per_panel;
    value -= worst.left;
    value -= worst.right;
    value += lo.left;
    value += lo.right;
    value += hi.left;
    value += hi.right;
    err += lo.err + hi.err - worst.err;
    heap.push_back(std::move(lo));
    std::push_heap(heap.begin(), heap.end(), by_err);
    heap.push_back(std::move(hi));
    std::push_heap(heap.begin(), heap.end(), by_err);
  }
  result.value = value;
  result.err_estimate = err;
  result.evaluations = evals;
  return result;
}

/// integrate_1d for any value type; see the non-template overloads below.
template <class V, class F>
QuadResult<V> integrate_1d_generic(F&& f, Interval iv, EndpointFlags flags,
                                   const QuadratureConfig& cfg, const V& zero) {
  if (!(std::isfinite(iv.lo) && std::isfinite(iv.hi)))
    throw InvalidArgument("integrate_1d needs a finite interval");
  if (iv.hi < iv.lo) {
    auto r = integrate_1d_generic<V>(f, Interval{iv.hi, iv.lo},
                                     EndpointFlags{flags.upper, flags.lower}, cfg, zero);
    r.value *= -1.0;
    return r;
  }
  QuadResult<V> out;
  out.value = zero;
  auto accumulate = [&](const QuadResult<V>& part) {
    out.value += part.value;
    out.err_estimate += part.err_estimate;
    out.evaluations += part.evaluations;
  };
  if (!flags.lower && !flags.upper) return adaptive_gauss<V>(f, iv.lo, iv.hi, cfg, zero);

  double split_lo = iv.lo, split_hi = iv.hi;
  if (flags.lower && flags.upper) {
    split_lo = split_hi = 0.5 * (iv.lo + iv.hi);
  } else if (flags.lower) {
    split_lo = iv.hi;
  } else {
    split_hi = iv.lo;
  }
  if (flags.lower) {
    const double lo = iv.lo;
    auto g = [&f, lo](double t) { return f(lo + t * t) * (2.0 * t); };
    accumulate(adaptive_gauss<V>(g, 0.0, std::sqrt(split_lo - lo), cfg, zero));
  }
  if (flags.upper) {
    const double hi = iv.hi;
    auto g = [&f, hi](double t) { return f(hi - t * t) * (2.0 * t); };
    accumulate(adaptive_gauss<V>(g, 0.0, std::sqrt(hi - split_hi), cfg, zero));
  }
  if (!(flags.lower && flags.upper) && split_lo < split_hi)
    accumulate(adaptive_gauss<V>(f, split_lo, split_hi, cfg, zero));
  return out;
}

}  // namespace detail

/// Adaptive Gauss-Legendre on a finite interval. Flagged endpoints get the
/// substitution r = end +- t^2 (the interval is split at its midpoint when
/// both are flagged), which turns dr/sqrt|r - end| into a smooth integrand.
/// Error estimate: one-panel vs two-panel comparison per segment.
/// Throws QuadratureNonConvergence when the tolerance is not met at max_levels.
/// The value type (double or complex) follows the integrand's return type.
template <class F, class V = std::decay_t<std::invoke_result_t<F&, double>>>
QuadResult<V> integrate_1d(F&& f, Interval iv, EndpointFlags flags, const QuadratureConfig& cfg) {
  return detail::integrate_1d_generic<V>(f, iv, flags, cfg, V{});
}

/// Iterated adaptive Gauss-Legendre over cell_a x cell_b (outer r_a, inner r_b).
/// With diagonal_split the inner integral is split at r_b = r_a and the outer
/// one at the ends of cell_b, so the |r_a - r_b| kink sits on panel edges.
/// Endpoint flags act per axis as in integrate_1d.
QuadResult<double> integrate_2d_cell(const std::function<double(double, double)>& f,
                                     Interval cell_a, Interval cell_b, bool diagonal_split,
                                     const QuadratureConfig& cfg, EndpointFlags flags_a = {},
                                     EndpointFlags flags_b = {});

/// Vector-valued tensor-product integration over [0, R]^2 on a fixed panel
/// grid shared by both axes, with global refinement (every panel bisected)
/// until two successive grids agree.
///
/// The kernel supplies per-node precomputation so separable factors are
/// evaluated once per 1D node:
///   NodeData node(double r) const;
///   void eval(const NodeData& a, const NodeData& b, double ra, double rb,
///             std::span<cdouble> accumulate_into, double weight) const;
/// Panel pairs on the diagonal are split along r_a = r_b with the collapsed
/// map (u, v) -> (o + u h, o + u v h). If `symmetric`, only r_b <= r_a is
/// visited and the result doubled.
struct GridOptions {
  bool symmetric = false;
  /// Global bisection passes allowed beyond the initial grid.
  int max_refinements = 3;
};

template <class Kernel>
QuadResult<std::vector<cdouble>> integrate_2d_grid(const Kernel& kernel,
                                                   std::vector<double> breaks, std::size_t dim,
                                                   const QuadratureConfig& cfg,
                                                   GridOptions options = {});

/// Regularized value of (1/2) * int_{-dm}^{dp} g(c + r) (r - i0)^{-3/2} dr via
/// partial integration:
///   -[g(c + r) (r - i0)^{-1/2}]_{-dm}^{dp} + int g'(c + r) (r - i0)^{-1/2} dr,
/// where (r - i0)^{-1/2} = 1/sqrt(r) for r > 0 and i/sqrt(|r|) for r < 0.
/// g' defaults to a central difference with step 1e-5 * (dm + dp).
QuadResult<cdouble> principal_value_window(
    const std::function<double(double)>& g, double center, double delta_minus,
    double delta_plus, const QuadratureConfig& cfg,
    const std::optional<std::function<double(double)>>& dg = std::nullopt);

/// One-sided Hadamard finite part of int psi(r) |r - b|^{-3/2} dr over the
/// segment between b and `far`:
///   -2 psi(far)/sqrt(delta) + 2 int (d psi / d|r - b|) / sqrt|r - b| dr.
/// `dpsi` is the ordinary derivative d psi / dr.
QuadResult<double> finite_part_endpoint(const std::function<double(double)>& psi,
                                        const std::function<double(double)>& dpsi, double b,
                                        double far, const QuadratureConfig& cfg);

}  // namespace wishart::quad

#include "wishart/quadrature_grid.inl"
