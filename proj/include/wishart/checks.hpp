#pragma once

#include <complex>
#include <span>
#include <vector>

#include "wishart/quadrature.hpp"
#include "wishart/spectrum.hpp"

namespace wishart::checks {

/// |Z_1(x0, x0) - 1|. x0 must avoid the positive real axis.
double z1_unit_check(const EmpiricalSpectrum& spectrum, std::complex<double> x0,
                     const quad::QuadratureConfig& cfg = {});

/// Large-n limit: for each n, |Z_1(n x0, n x1) - prod_l (x1 - l_l)/(x0 - l_l)|
/// with the spectrum's n replaced. Requires Im x0 > 0.
std::vector<double> clt_limit_check(const EmpiricalSpectrum& spectrum, std::complex<double> x0,
                                    std::complex<double> x1, std::span<const int> n_sequence,
                                    const quad::QuadratureConfig& cfg = {});

/// |Z_1(conj x0, x1) - conj Z_1(x0, x1)| for real x1, both sides integrated
/// independently.
double conjugate_symmetry_check(const EmpiricalSpectrum& spectrum, std::complex<double> x0,
                                double x1, const quad::QuadratureConfig& cfg = {});

}  // namespace wishart::checks
