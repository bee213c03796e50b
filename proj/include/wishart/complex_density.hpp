#pragma once

#include <span>
#include <vector>

#include "wishart/spectrum.hpp"

namespace wishart {

/// One-point function of the complex ensemble as a sum over the simple poles
/// at s = i/l_j. Requires beta = 2. Zero for x < 0.
double s2_residue_sum(const EmpiricalSpectrum& spectrum, double x);

/// Same function as a ratio of a bordered (p+1)x(p+1) determinant to det D,
/// D_{kj} = l_j^{1-k}. Rows and columns are equilibrated in log space before
/// pivoted elimination.
double s2_determinant_ratio(const EmpiricalSpectrum& spectrum, double x);

/// Relative disagreement (to the curve maximum) above which the curve is
/// flagged as ill-conditioned.
inline constexpr double kFormDisagreementTol = 1e-8;

/// Residue-sum values on `grid`; errors are |residue - determinant|.
/// Points are evaluated in parallel.
DensityCurve s2_curve(const EmpiricalSpectrum& spectrum, std::span<const double> grid);

}  // namespace wishart
