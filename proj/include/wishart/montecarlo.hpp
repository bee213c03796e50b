#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <variant>
#include <vector>

#include "wishart/linalg.hpp"
#include "wishart/quadrature.hpp"
#include "wishart/spectrum.hpp"

namespace wishart::mc {

/// Philox4x32-10 counter-based generator: a pure function of (counter, key).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Two standard normals (Box-Muller) from the block at `block` of the stream
/// identified by (seed, sample_index).
std::array<double, 2> normal_pair(std::uint64_t seed, std::uint64_t sample_index,
                                  std::uint64_t block);

using RealMatrix = linalg::Matrix<double>;
using ComplexMatrix = linalg::Matrix<std::complex<double>>;
using SampleMatrix = std::variant<RealMatrix, ComplexMatrix>;

/// p x n data matrix with row variances l_j: real entries for beta = 1,
/// complex entries with Re, Im ~ N(0, l_j/2) for beta = 2. Entry (j, k) uses
/// normals 2e, 2e + 1 (complex) or e (real) of the stream, e = j n + k.
SampleMatrix sample_w(const EmpiricalSpectrum& spectrum, std::uint64_t seed,
                      std::uint64_t sample_index);

/// Eigenvalues of W W^dagger, ascending. The complex case diagonalizes the
/// 2p x 2p real embedding of the Hermitian product and averages the
/// resulting eigenvalue pairs.
std::vector<double> eigenvalues_wwdag(const SampleMatrix& w);

/// Either a bin count or a bin width (exactly one positive).
struct BinSpec {
  int count = 0;
  double width = 0.0;
};

struct SpectrumHistogram {
  std::vector<double> bin_edges;
  std::vector<std::uint64_t> counts;
  std::vector<double> density;
  std::vector<double> sigma;
  std::uint64_t seed = 0;
  std::uint64_t samples = 0;
  int p = 0;
};

/// Histogram of all sampled eigenvalues on [0, 1.02 * largest]. Bit-identical
/// for a given (spectrum, samples, bins, seed) whatever the thread count.
SpectrumHistogram mc_histogram(const EmpiricalSpectrum& spectrum, std::uint64_t samples,
                               BinSpec bins, std::uint64_t seed);

struct HistogramComparison {
  /// Bin average of the analytic density.
  std::vector<double> analytic;
  /// (density - analytic) / sigma; NaN where the count is below min_count.
  std::vector<double> z;
  std::size_t bins_used = 0;
  std::size_t within_3sigma = 0;
  double fraction_within_3sigma = 0.0;
  double max_abs_z = 0.0;
};

/// Compares a histogram with the analytic one-point function of `analytic`
/// (beta picks the formula) averaged over each bin by Gauss-Legendre.
HistogramComparison compare_histogram(const SpectrumHistogram& hist,
                                      const EmpiricalSpectrum& analytic,
                                      const quad::QuadratureConfig& cfg = {},
                                      int nodes_per_bin = 4, std::uint64_t min_count = 20);

}  // namespace wishart::mc
