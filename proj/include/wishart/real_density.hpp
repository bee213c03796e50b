#pragma once

#include <complex>
#include <span>
#include <vector>

#include "wishart/quadrature.hpp"
#include "wishart/spectrum.hpp"
#include "wishart/symfun.hpp"

namespace wishart {

using cdouble = std::complex<double>;

/// The p+1 intervals of the positive half-line cut at x/l_j, and the cell
/// pairs whose square-root product jumps across the real x-axis.
struct CellPartition {
  struct OddPair {
    int l_a;
    int l_b;
    /// (-1)^((l_a + l_b - 1)/2)
    int sign;
  };

  double x = 0.0;
  /// x/l_p < ... < x/l_1 (ascending).
  std::vector<double> boundaries;
  /// cells[l] = U_l; U_p has hi = +inf. U_l holds exactly l factors with l_i r > x.
  std::vector<quad::Interval> cells;
  std::vector<OddPair> odd_pairs;
};

/// Requires x > 0.
CellPartition cell_partition(const EmpiricalSpectrum& spectrum, double x);

/// log of the peak of r^((n-3)/2) e^(-r/2); 0 for n = 3. Every weight below is
/// divided by exp of this, and the k-sum coefficients carry it back.
double weight_log_peak(int n);

/// Point where the normalized weight r^((n-3)/2) e^(-r/2) has fallen to
/// `ratio` of its peak (right of the peak).
double weight_tail(int n, double ratio = 1e-16);

/// Integrand of the double integral for Z_1(x0, x1) at fixed (x0, x1),
/// including the 1/8 prefactor. Each square root uses the principal branch
/// per factor; on the negative real axis x0 is read as x0 + i0.
class Z1Integrand {
 public:
  /// Requires beta = 1, n >= 3, x0 off the positive real axis.
  Z1Integrand(const EmpiricalSpectrum& spectrum, cdouble x0, cdouble x1);

  cdouble x0() const noexcept { return x0_; }
  cdouble x1() const noexcept { return x1_; }
  int p() const noexcept { return p_; }

  /// prod_i 1 / sqrt((x0 - l_i ra)(x0 - l_i rb)).
  cdouble inverse_sqrt_product(double ra, double rb) const;

  /// Full integrand value at (ra, rb), weight normalization undone.
  cdouble operator()(double ra, double rb) const;

  /// Bracket term for each k = 0..p times the normalized weight (no k-sum
  /// coefficient, no 1/8). Symmetric in (ra, rb).
  void bracket_terms(double ra, double rb, std::span<cdouble> out) const;

  /// (-1)^k x1^(p-k) / (n-k)! times exp(2 * weight_log_peak(n)).
  std::vector<cdouble> k_coefficients(cdouble x1) const;
  /// Derivative of k_coefficients with respect to x1.
  std::vector<cdouble> k_coefficients_dx1(cdouble x1) const;

  /// Per-node data for the grid integrator.
  struct Node {
    cdouble base;                 // normalized weight times inverse square roots
    std::vector<cdouble> s;       // per k: sum_j P_kj u_j
    std::vector<cdouble> u;       // u_j = r / (x0 - l_j r)
    std::vector<cdouble> v;       // per k, j: (M_k u)_j, row-major
  };
  Node node(double r) const;
  void eval(const Node& a, const Node& b, double ra, double rb, std::span<cdouble> acc,
            double weight) const;

 private:
  cdouble sqrt_factor(double lambda, double r) const;

  std::vector<double> lambdas_;
  int n_;
  int p_;
  cdouble x0_;
  cdouble x1_;
  double log_peak_;
  std::vector<double> b1_;  // n(n-1) E_k
  std::vector<double> p_kj_;  // (n-1) l_j^2 E_{k-1}(without j)
  std::vector<double> m_kjl_; // l_j^2 l_l^2 E_{k-2}(without j, l), zero for j = l
};

struct Z1Result {
  cdouble value;
  /// Double integrals of the normalized bracket terms, k = 0..p, including 1/8.
  std::vector<cdouble> k_integrals;
  double err_estimate = 0.0;
  std::size_t evaluations = 0;
};

/// Breakpoints on [0, R] graded geometrically toward 0 and toward each
/// Re(x0)/l_i, at widths starting from |Im x0|/l_i.
std::vector<double> z1_breakpoints(const EmpiricalSpectrum& spectrum, cdouble x0);

/// Z_1(x0, x1) by panel-grid quadrature over [0, R]^2. Requires beta = 1,
/// n >= 3, x0 off the positive real axis. Throws QuadratureNonConvergence.
Z1Result z1_eq56(const EmpiricalSpectrum& spectrum, cdouble x0, cdouble x1,
                 const quad::QuadratureConfig& cfg = {}, int max_refinements = 4);

/// Z_1 at another x1 from the per-k integrals of an earlier run.
cdouble z1_at(const EmpiricalSpectrum& spectrum, const Z1Result& z, cdouble x1);

/// (1/(pi p)) Im d/dx1 Z_1(x - i eps, x1) at x1 = x, the derivative by a
/// central difference of step h. Uses Z_1(conj x0) = conj Z_1(x0).
double s1_epsilon_oracle(const EmpiricalSpectrum& spectrum, double x, double eps, double h,
                         const quad::QuadratureConfig& cfg = {});

/// Second-order Richardson limit from values at eps, eps/2, eps/4.
double richardson_eps(double at_eps, double at_half, double at_quarter);

/// Smooth prefactors of the discontinuity integrand: the x1-derivative of
/// the k-sum distributed over the three bracket terms, times exp(2 * log peak).
struct S1Coefficients {
  double a0 = 0.0;
  std::vector<double> a1;  // per j
  std::vector<double> a2;  // per (j, l), row-major, zero on the diagonal
};
S1Coefficients s1_coefficients(const EmpiricalSpectrum& spectrum, double x);

/// Pointwise value of the discontinuity integrand for ra, rb in cells with
/// odd l_a + l_b, normalized weights, without 1/(8 pi p).
double s1_integrand(const EmpiricalSpectrum& spectrum, const S1Coefficients& c, double x,
                    double ra, double rb);

struct S1Value {
  double value = 0.0;
  double err_estimate = 0.0;
};

/// S_1(x) from the odd-cell double integral; 0 for x <= 0. The 3/2-power
/// singularities at the cell boundaries are taken as one-sided finite parts.
/// Throws RealCaseTooSmallN unless n > p + 3.
S1Value s1_exact(const EmpiricalSpectrum& spectrum, double x, const quad::QuadratureConfig& cfg = {});

/// Pointwise s1_exact on `grid`, in parallel.
DensityCurve s1_curve(const EmpiricalSpectrum& spectrum, std::span<const double> grid,
                      const quad::QuadratureConfig& cfg = {});

}  // namespace wishart
