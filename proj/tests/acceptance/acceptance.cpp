// One line per acceptance criterion; exit status is the number of failures.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "wishart/checks.hpp"
#include "wishart/cli.hpp"
#include "wishart/complex_density.hpp"
#include "wishart/montecarlo.hpp"
#include "wishart/quadrature.hpp"
#include "wishart/real_density.hpp"
#include "wishart/symfun.hpp"

using namespace wishart;
using cd = std::complex<double>;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<double> linspace(double a, double b, std::size_t count) {
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i)
    g[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
  return g;
}

double sum_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

// Composite Gauss-Legendre on equal panels: nodes and weights.
void panel_rule(double a, double b, int panels, std::vector<double>& x, std::vector<double>& w) {
  const auto& rule = quad::gauss_legendre(16);
  const double h = (b - a) / panels;
  for (int i = 0; i < panels; ++i)
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      x.push_back(a + h * (i + 0.5 + 0.5 * rule.nodes[k]));
      w.push_back(0.5 * h * rule.weights[k]);
    }
}

// Laplace expansion along the first row, in extended precision: the
// matrices are Vandermonde-like and lose about nine digits in double.
using Rows = std::vector<std::vector<long double>>;
long double cofactor_det(const Rows& m) {
  const std::size_t n = m.size();
  if (n == 0) return 1.0;
  if (n == 1) return m[0][0];
  long double det = 0.0L;
  for (std::size_t c = 0; c < n; ++c) {
    Rows minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<long double> row;
      for (std::size_t k = 0; k < n; ++k)
        if (k != c) row.push_back(m[r][k]);
      minor.push_back(row);
    }
    det += ((c % 2) ? -1.0L : 1.0L) * m[0][c] * cofactor_det(minor);
  }
  return det;
}

std::size_t rightmost_max(const std::vector<double>& v) {
  std::size_t idx = 0;
  for (std::size_t i = 1; i + 1 < v.size(); ++i)
    if (v[i] > v[i - 1] && v[i] >= v[i + 1]) idx = i;
  return idx;
}

const std::vector<double> kTen{1.0, 0.49, 0.4225, 0.36, 0.25, 0.09, 0.0729, 0.0529, 0.04, 0.0225};

Outcome ac1() {
  double worst = 0.0;
  for (int n : {2, 5, 20}) {
    auto s = validate_spectrum(2, n, {1.0});
    for (double x : linspace(0.0, 3.0 * n, 3001)) {
      const double expect =
          x == 0.0 ? (n == 1 ? 1.0 : 0.0) : std::exp((n - 1) * std::log(x) - x - std::lgamma(n));
      worst = std::max(worst, std::abs(s2_residue_sum(s, x) - expect));
    }
  }
  return {worst < 1e-10, fmt("max |S2 - Gamma| = %.2e (tol 1e-10)", worst)};
}

Outcome ac2() {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> pick_p(1, 8), extra(0, 60);
  std::uniform_real_distribution<double> start(0.1, 3.0), ratio(1.1, 2.0);
  double worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const int p = pick_p(rng);
    std::vector<double> l{start(rng)};
    while (static_cast<int>(l.size()) < p) l.push_back(l.back() * ratio(rng));
    auto s = validate_spectrum(2, p + extra(rng), l);
    const auto grid = linspace(0.0, 1.5 * s.n() * s.largest(), 200);
    std::vector<double> a(grid.size()), b(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      a[i] = s2_residue_sum(s, grid[i]);
      b[i] = s2_determinant_ratio(s, grid[i]);
    }
    const double peak = *std::max_element(a.begin(), a.end());
    for (std::size_t i = 0; i < grid.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]) / peak);
  }
  return {worst < 1e-8, fmt("50 spectra, sup relative disagreement %.2e (tol 1e-8)", worst)};
}

Outcome ac3() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  double worst = 0.0;
  int checked = 0;
  for (int p = 1; p <= 6; ++p) {
    for (int rep = 0; rep < 5; ++rep) {
      std::vector<double> v;
      while (static_cast<int>(v.size()) < p) {
        const double c = u(rng);
        bool ok = true;
        for (double x : v) ok = ok && std::abs(x - c) > 0.05 * std::max(x, c);
        if (ok) v.push_back(c);
      }
      Rows d(p, std::vector<long double>(p));
      for (int k = 0; k < p; ++k)
        for (int j = 0; j < p; ++j) d[k][j] = std::pow(static_cast<long double>(v[j]), -k);
      const long double det = cofactor_det(d);
      for (int k = 0; k < p; ++k)
        for (int j = 0; j < p; ++j) {
          Rows minor;
          for (int r = 0; r < p; ++r) {
            if (r == k) continue;
            std::vector<long double> row;
            for (int c = 0; c < p; ++c)
              if (c != j) row.push_back(d[r][c]);
            minor.push_back(row);
          }
          const auto oracle = static_cast<double>(cofactor_det(minor) / det);
          double denom = 1.0;
          for (int l = 0; l < p; ++l)
            if (l != j) denom *= 1.0 - v[l] / v[j];
          const double value =
              (j % 2 ? -1.0 : 1.0) * symfun::elementary_symmetric(symfun::leave_out(v, j))(k) / denom;
          worst = std::max(worst, std::abs(value - oracle) / std::abs(oracle));
          ++checked;
        }
    }
  }
  return {worst < 1e-10, fmt("%d minor ratios, max relative error %.2e (tol 1e-10)", checked, worst)};
}

Outcome ac4() {
  double worst = 0.0;
  for (auto s : {validate_spectrum(1, 10, {0.5, 1.0}), validate_spectrum(1, 15, {0.3, 0.7, 1.5})})
    for (cd x0 : {cd(1.0, 2.0), cd(-5.0, 0.0), cd(0.3, 0.1)})
      worst = std::max(worst, checks::z1_unit_check(s, x0));
  return {worst < 1e-6, fmt("max |Z1(x0,x0) - 1| = %.2e (tol 1e-6)", worst)};
}

Outcome ac5() {
  auto s = validate_spectrum(1, 50, {0.5, 1.0, 2.0});
  const std::vector<int> ns{50, 100, 200, 400};
  const auto dev = checks::clt_limit_check(s, cd(3.0, 1.0), cd(2.0, 1.0), ns);
  return {dev.back() < 5e-2 && dev.back() < dev.front(),
          fmt("deviation n=50: %.3e, 100: %.3e, 200: %.3e, 400: %.3e (need < 5e-2 and < n=50)",
              dev[0], dev[1], dev[2], dev[3])};
}

Outcome ac6() {
  bool ok = true;
  double worst_abs = 0.0, worst_rel = 0.0;
  for (auto s : {validate_spectrum(1, 10, {0.5, 1.0}), validate_spectrum(1, 14, {0.3, 0.7, 1.5})}) {
    const double scale = s.n() * s.largest();
    const double eps = 1e-3 * scale, h = 1e-4 * scale;
    for (int k = 0; k < 20; ++k) {
      const double x = 1.3 * scale * (k + 0.5) / 20.0;
      const double exact = s1_exact(s, x).value;
      const double oracle = richardson_eps(s1_epsilon_oracle(s, x, eps, h),
                                           s1_epsilon_oracle(s, x, eps / 2, h),
                                           s1_epsilon_oracle(s, x, eps / 4, h));
      const double diff = std::abs(exact - oracle);
      ok = ok && diff <= std::max(1e-3, 1e-2 * std::abs(oracle));
      worst_abs = std::max(worst_abs, diff);
      worst_rel = std::max(worst_rel, diff / std::abs(oracle));
    }
  }
  return {ok, fmt("40 points, max abs diff %.2e, max rel diff %.2e (tol max(1e-3, 1%%))", worst_abs,
                  worst_rel)};
}

Outcome ac7() {
  struct Case {
    EmpiricalSpectrum s;
    double norm_tol;
    double mom_tol;
  };
  const std::vector<Case> cases{
      {validate_spectrum(2, 10, {0.5, 1.0}), 1e-6, 1e-4},
      {validate_spectrum(2, 30, {0.2, 0.6, 1.1, 2.5}), 1e-6, 1e-4},
      {validate_spectrum(1, 10, {0.5, 1.0}), 1e-3, 1e-2},
      {validate_spectrum(1, 14, {0.3, 0.7, 1.5}), 1e-3, 1e-2},
  };
  bool ok = true;
  std::string detail;
  for (const auto& c : cases) {
    const double n = c.s.n();
    const double top = c.s.largest() * (n + 10.0 * std::sqrt(n) + 20.0);
    std::vector<double> x, w;
    panel_rule(0.0, top, 60, x, w);
    const DensityCurve curve = c.s.beta() == Beta::Real ? s1_curve(c.s, x) : s2_curve(c.s, x);
    double norm = 0.0, mom = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      norm += w[i] * curve.values[i];
      mom += w[i] * x[i] * curve.values[i];
    }
    const double expected = n * sum_of(c.s.lambdas()) / c.s.p();
    const double dn = std::abs(norm - 1.0), dm = std::abs(mom - expected) / expected;
    ok = ok && dn < c.norm_tol && dm < c.mom_tol;
    detail += fmt("%sb%d p%d: |norm-1| %.1e, moment rel %.1e", detail.empty() ? "" : "; ",
                  static_cast<int>(c.s.beta()), c.s.p(), dn, dm);
  }
  return {ok, detail};
}

Outcome ac8() {
  auto s = validate_spectrum(1, 50, kTen);
  const auto h = mc::mc_histogram(s, 100000, mc::BinSpec{0, 0.7}, 1);
  const auto cmp = mc::compare_histogram(h, s);
  const auto grid = cli::make_grid(cli::GridSpec{}, s);
  const auto curve = s1_curve(s, grid);
  const double peak = grid[rightmost_max(curve.values)];
  return {cmp.fraction_within_3sigma >= 0.95 && peak >= 45.0 && peak <= 55.0,
          fmt("%zu/%zu bins within 3 sigma (%.3f, need >= 0.95), max |z| %.2f; rightmost max at %.2f",
              cmp.within_3sigma, cmp.bins_used, cmp.fraction_within_3sigma, cmp.max_abs_z, peak)};
}

// Position of the rightmost maximum and its right half-width at half height.
std::pair<double, double> last_peak(int n) {
  auto s = validate_spectrum(1, n, kTen);
  const auto coarse = linspace(0.0, 1.3 * n, 400);
  const auto cc = s1_curve(s, coarse);
  const std::size_t i = rightmost_max(cc.values);
  const auto fine = linspace(coarse[i - 1], coarse[i + 1], 201);
  const auto cf = s1_curve(s, fine);
  const std::size_t j = static_cast<std::size_t>(
      std::max_element(cf.values.begin(), cf.values.end()) - cf.values.begin());
  const double xp = fine[j], yp = cf.values[j];
  const auto right = linspace(xp, 1.3 * n + 20.0 * std::sqrt(n), 2001);
  const auto cr = s1_curve(s, right);
  double half = right.back();
  for (std::size_t k = 1; k < right.size(); ++k)
    if (cr.values[k] < 0.5 * yp) {
      const double t = (cr.values[k - 1] - 0.5 * yp) / (cr.values[k - 1] - cr.values[k]);
      half = right[k - 1] + t * (right[k] - right[k - 1]);
      break;
    }
  return {xp, half - xp};
}

Outcome ac9() {
  const auto [x50, w50] = last_peak(50);
  const auto [x200, w200] = last_peak(200);
  const double r50 = w50 / x50, r200 = w200 / x200;
  return {x200 >= 190.0 && x200 <= 210.0 && r200 < r50,
          fmt("n=200 peak at %.2f, half-width/position %.4f; n=50 peak at %.2f, %.4f", x200, r200,
              x50, r50)};
}

Outcome ac10() {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-1.0, 1.0), width(1.0, 2.0), centre(-3.0, 3.0);
  std::uniform_int_distribution<int> degree(1, 6);
  const double eps = 1e-6;
  quad::QuadratureConfig tight;
  tight.abs_tol = 1e-13;
  tight.rel_tol = 1e-13;
  double worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const int deg = degree(rng);
    const double c = centre(rng), dm = width(rng), dp = width(rng);
    const double span = std::max(dm, dp);
    // Coefficients scaled so that sum |a_i| span^i <= 1 on the window.
    std::vector<double> a(deg + 1);
    for (int i = 0; i <= deg; ++i) a[i] = u(rng) / ((deg + 1) * std::pow(span, i));
    auto g = [&](double r) {
      double v = 0.0;
      for (int i = deg; i >= 0; --i) v = v * (r - c) + a[i];
      return v;
    };
    const auto pv = quad::principal_value_window(g, c, dm, dp, {});

    // (1/2) int g(c + r) (r - i eps)^{-3/2} dr, cut geometrically toward r = 0.
    auto f = [&](double r) { return 0.5 * g(c + r) * std::pow(cd(r, -eps), -1.5); };
    std::vector<double> cuts{0.0};
    for (double t = 1e-2 * eps; t < dp; t *= 4.0) cuts.push_back(t);
    cuts.push_back(dp);
    std::vector<double> left;
    for (double t = 1e-2 * eps; t < dm; t *= 4.0) left.push_back(-t);
    left.push_back(-dm);
    cuts.insert(cuts.begin(), left.rbegin(), left.rend());
    cd direct{};
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      direct += quad::integrate_1d(f, {cuts[i], cuts[i + 1]}, {}, tight).value;
    worst = std::max(worst, std::abs(pv.value - direct));
  }
  return {worst < 1e-6, fmt("20 polynomials, max |window - shifted| = %.2e (tol 1e-6)", worst)};
}

Outcome ac11() {
  const char* path = "acceptance_p10.json";
  {
    FILE* f = std::fopen(path, "wb");
    std::fputs(R"({"beta": 1, "n": 50, "lambda": [1, 0.49, 0.4225, 0.36, 0.25, 0.09, 0.0729, 0.0529, 0.04, 0.0225]})",
               f);
    std::fclose(f);
  }
  auto run_mc = [&] {
    const char* argv[] = {"wishart", "mc",     "--spectrum",  path,  "--samples",
                          "20000",   "--seed", "424242",      "--bin-width", "0.7"};
    std::ostringstream out, err;
    const int code = cli::run(10, argv, out, err);
    return code == 0 ? out.str() : std::string{};
  };
  std::vector<std::string> outputs;
  for (const char* threads : {"1", "2", "4", ""}) {
    if (*threads) setenv("WISHART_THREADS", threads, 1);
    else unsetenv("WISHART_THREADS");
    outputs.push_back(run_mc());
    outputs.push_back(run_mc());
  }
  unsetenv("WISHART_THREADS");
  std::remove(path);
  bool same = !outputs.front().empty();
  for (const auto& o : outputs) same = same && o == outputs.front();
  return {same, fmt("%zu runs (threads 1, 2, 4, default; twice each), %zu bytes, identical: %s",
                    outputs.size(), outputs.front().size(), same ? "yes" : "no")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"AC1 complex p=1 Gamma closed form", ac1},
      {"AC2 residue sum vs determinant ratio", ac2},
      {"AC3 minor ratio identity", ac3},
      {"AC4 Z1(x0,x0) = 1", ac4},
      {"AC5 large-n limit", ac5},
      {"AC6 s1_exact vs shifted-contour oracle", ac6},
      {"AC7 normalization and first moment", ac7},
      {"AC8 p=10 n=50 curve vs Monte-Carlo", ac8},
      {"AC9 p=10 n=200 peak", ac9},
      {"AC10 principal value window", ac10},
      {"AC11 Monte-Carlo determinism", ac11},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome r;
    try {
      r = check();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s: %s [%.1f s]\n", r.pass ? "PASS" : "FAIL", name, r.detail.c_str(), secs);
    std::fflush(stdout);
    failures += r.pass ? 0 : 1;
  }
  return failures;
}
