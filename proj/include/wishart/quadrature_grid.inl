// Implementation of quad::integrate_2d_grid; included from quadrature.hpp.
#pragma once

#include <string>

#include "wishart/parallel.hpp"

namespace wishart::quad {

namespace detail {

template <class Kernel>
std::vector<cdouble> grid_pass(const Kernel& kernel, const std::vector<double>& breaks,
                               std::size_t dim, const GaussRule& rule, bool symmetric,
                               std::size_t& evaluations) {
  using NodeData = decltype(kernel.node(0.0));
  const std::size_t q = rule.nodes.size();
  const std::size_t panels = breaks.size() - 1;

  std::vector<double> x(panels * q), w(panels * q);
  for (std::size_t i = 0; i < panels; ++i) {
    const double half = 0.5 * (breaks[i + 1] - breaks[i]);
    const double mid = 0.5 * (breaks[i + 1] + breaks[i]);
    for (std::size_t a = 0; a < q; ++a) {
      x[i * q + a] = mid + half * rule.nodes[a];
      w[i * q + a] = half * rule.weights[a];
    }
  }
  std::vector<NodeData> nodes(x.size());
  parallel_for(x.size(), [&](std::size_t k) { nodes[k] = kernel.node(x[k]); });

  // Unit-interval rule for the collapsed triangle map.
  std::vector<double> u(q), uw(q);
  for (std::size_t a = 0; a < q; ++a) {
    u[a] = 0.5 * (rule.nodes[a] + 1.0);
    uw[a] = 0.5 * rule.weights[a];
  }

  // One partial sum per outer panel, reduced in index order afterwards.
  std::vector<std::vector<cdouble>> partial(panels, std::vector<cdouble>(dim));
  parallel_for(panels, [&](std::size_t i) {
    std::span<cdouble> acc(partial[i]);
    for (std::size_t k = 0; k < panels; ++k) {
      if (k == i || (symmetric && k > i)) continue;
      for (std::size_t a = i * q; a < (i + 1) * q; ++a)
        for (std::size_t b = k * q; b < (k + 1) * q; ++b)
          kernel.eval(nodes[a], nodes[b], x[a], x[b], acc, w[a] * w[b]);
    }
    // Diagonal panel: triangle r_b < r_a, and r_a < r_b unless symmetric.
    const double o = breaks[i];
    const double h = breaks[i + 1] - breaks[i];
    for (std::size_t a = 0; a < q; ++a) {
      const std::size_t outer = i * q + a;  // o + u_a h is panel node a
      for (std::size_t b = 0; b < q; ++b) {
        const double inner = o + u[a] * u[b] * h;
        const NodeData nd = kernel.node(inner);
        const double jac = uw[a] * uw[b] * u[a] * h * h;
        kernel.eval(nodes[outer], nd, x[outer], inner, acc, jac);
        if (!symmetric) kernel.eval(nd, nodes[outer], inner, x[outer], acc, jac);
      }
    }
  });

  std::vector<cdouble> total(dim);
  for (const auto& part : partial)
    for (std::size_t c = 0; c < dim; ++c) total[c] += part[c];
  if (symmetric)
    for (auto& v : total) v *= 2.0;

  const std::size_t diag = panels * q * q;
  const std::size_t off = symmetric ? panels * (panels - 1) / 2 * q * q : panels * (panels - 1) * q * q;
  evaluations += off + (symmetric ? diag : 2 * diag) + x.size();
  return total;
}

}  // namespace detail

template <class Kernel>
QuadResult<std::vector<cdouble>> integrate_2d_grid(const Kernel& kernel,
                                                   std::vector<double> breaks, std::size_t dim,
                                                   const QuadratureConfig& cfg,
                                                   GridOptions options) {
  cfg.validate();
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  if (breaks.size() < 2) throw InvalidArgument("integrate_2d_grid needs at least one panel");
  const GaussRule& rule = gauss_legendre(cfg.panel_order);

  QuadResult<std::vector<cdouble>> result;
  std::vector<cdouble> prev =
      detail::grid_pass(kernel, breaks, dim, rule, options.symmetric, result.evaluations);
  double err = 0.0;
  for (int level = 1; level <= options.max_refinements; ++level) {
    std::vector<double> finer;
    finer.reserve(2 * breaks.size());
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
      finer.push_back(breaks[i]);
      finer.push_back(0.5 * (breaks[i] + breaks[i + 1]));
    }
    finer.push_back(breaks.back());
    breaks = std::move(finer);

    std::vector<cdouble> cur =
        detail::grid_pass(kernel, breaks, dim, rule, options.symmetric, result.evaluations);
    err = 0.0;
    double scale = 0.0;
    for (std::size_t c = 0; c < dim; ++c) {
      err = std::max(err, std::abs(cur[c] - prev[c]));
      scale = std::max(scale, std::abs(cur[c]));
    }
    prev = std::move(cur);
    if (err <= cfg.tolerance(scale)) {
      result.value = std::move(prev);
      result.err_estimate = err;
      return result;
    }
  }
  throw QuadratureNonConvergence("2D panel grid did not converge after " +
                                 std::to_string(options.max_refinements) +
                                 " refinements; last difference " + std::to_string(err));
}

}  // namespace wishart::quad
