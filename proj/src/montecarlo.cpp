#include "wishart/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "wishart/complex_density.hpp"
#include "wishart/errors.hpp"
#include "wishart/parallel.hpp"
#include "wishart/real_density.hpp"

namespace wishart::mc {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t prod = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(prod >> 32);
  lo = static_cast<std::uint32_t>(prod);
}

// 53-bit uniform in (0, 1].
double unit_open_closed(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, ctr[0], hi0, lo0);
    mulhilo(kM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

std::array<double, 2> normal_pair(std::uint64_t seed, std::uint64_t sample_index,
                                  std::uint64_t block) {
  const auto r = philox4x32(
      {static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
       static_cast<std::uint32_t>(sample_index), static_cast<std::uint32_t>(sample_index >> 32)},
      {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
  const double u1 = unit_open_closed(r[0], r[1]);
  const double u2 = unit_open_closed(r[2], r[3]);
  const double rad = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  return {rad * std::cos(theta), rad * std::sin(theta)};
}

SampleMatrix sample_w(const EmpiricalSpectrum& spectrum, std::uint64_t seed,
                      std::uint64_t sample_index) {
  const auto p = static_cast<std::size_t>(spectrum.p());
  const auto n = static_cast<std::size_t>(spectrum.n());
  if (spectrum.beta() == Beta::Real) {
    RealMatrix w(p, n);
    std::array<double, 2> pair{};
    for (std::size_t e = 0; e < p * n; ++e) {
      if (e % 2 == 0) pair = normal_pair(seed, sample_index, e / 2);
      const std::size_t j = e / n;
      w(j, e % n) = std::sqrt(spectrum.lambda(j)) * pair[e % 2];
    }
    return w;
  }
  ComplexMatrix w(p, n);
  for (std::size_t e = 0; e < p * n; ++e) {
    const auto pair = normal_pair(seed, sample_index, e);
    const std::size_t j = e / n;
    const double sd = std::sqrt(0.5 * spectrum.lambda(j));
    w(j, e % n) = {sd * pair[0], sd * pair[1]};
  }
  return w;
}

std::vector<double> eigenvalues_wwdag(const SampleMatrix& w) {
  if (const auto* re = std::get_if<RealMatrix>(&w)) {
    const std::size_t p = re->rows(), n = re->cols();
    if (p > n) throw DimensionError("W must have p <= n");
    RealMatrix h(p, p);
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += (*re)(i, k) * (*re)(j, k);
        h(i, j) = h(j, i) = s;
      }
    return linalg::jacobi_eigenvalues(h);
  }
  const auto& c = std::get<ComplexMatrix>(w);
  const std::size_t p = c.rows(), n = c.cols();
  if (p > n) throw DimensionError("W must have p <= n");
  RealMatrix emb(2 * p, 2 * p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      std::complex<double> s{};
      for (std::size_t k = 0; k < n; ++k) s += c(i, k) * std::conj(c(j, k));
      // [[Re H, -Im H], [Im H, Re H]] with H(j, i) = conj H(i, j).
      emb(i, j) = emb(j, i) = emb(p + i, p + j) = emb(p + j, p + i) = s.real();
      const double im = i == j ? 0.0 : s.imag();
      emb(p + i, j) = emb(j, p + i) = im;
      emb(p + j, i) = emb(i, p + j) = -im;
    }
  const auto doubled = linalg::jacobi_eigenvalues(emb);
  std::vector<double> ev(p);
  for (std::size_t i = 0; i < p; ++i) ev[i] = 0.5 * (doubled[2 * i] + doubled[2 * i + 1]);
  return ev;
}

SpectrumHistogram mc_histogram(const EmpiricalSpectrum& spectrum, std::uint64_t samples,
                               BinSpec bins, std::uint64_t seed) {
  if (samples == 0) throw InvalidArgument("samples must be at least 1");
  if ((bins.count > 0) == (bins.width > 0.0))
    throw InvalidArgument("give either a positive bin count or a positive bin width");
  const auto p = static_cast<std::size_t>(spectrum.p());

  std::vector<double> ev(samples * p);
  parallel_for(samples, [&](std::size_t s) {
    const auto v = eigenvalues_wwdag(sample_w(spectrum, seed, s));
    std::copy(v.begin(), v.end(), ev.begin() + static_cast<std::ptrdiff_t>(s * p));
  });

  double top = 0.0;
  for (double& v : ev) {
    v = std::max(v, 0.0);  // round-off below zero belongs in the first bin
    top = std::max(top, v);
  }
  const double range = 1.02 * top;
  if (!(range > 0.0)) throw InvalidArgument("all sampled eigenvalues are zero");

  SpectrumHistogram h;
  h.seed = seed;
  h.samples = samples;
  h.p = spectrum.p();
  std::size_t nbins;
  double width;
  if (bins.count > 0) {
    nbins = static_cast<std::size_t>(bins.count);
    width = range / static_cast<double>(nbins);
  } else {
    width = bins.width;
    nbins = static_cast<std::size_t>(std::ceil(range / width));
  }
  for (std::size_t i = 0; i <= nbins; ++i) h.bin_edges.push_back(width * static_cast<double>(i));
  h.counts.assign(nbins, 0);
  for (double v : ev) {
    auto b = static_cast<std::size_t>(v / width);
    h.counts[std::min(b, nbins - 1)] += 1;
  }
  const double norm = 1.0 / (static_cast<double>(samples) * static_cast<double>(p) * width);
  for (std::uint64_t c : h.counts) {
    h.density.push_back(static_cast<double>(c) * norm);
    h.sigma.push_back(std::sqrt(static_cast<double>(c)) * norm);
  }
  return h;
}

HistogramComparison compare_histogram(const SpectrumHistogram& hist,
                                      const EmpiricalSpectrum& analytic,
                                      const quad::QuadratureConfig& cfg, int nodes_per_bin,
                                      std::uint64_t min_count) {
  const std::size_t nbins = hist.counts.size();
  if (hist.bin_edges.size() != nbins + 1) throw InvalidArgument("malformed histogram");
  const auto& rule = quad::gauss_legendre(nodes_per_bin);
  const std::size_t q = rule.nodes.size();

  std::vector<double> nodes(nbins * q);
  for (std::size_t b = 0; b < nbins; ++b) {
    const double lo = hist.bin_edges[b], hi = hist.bin_edges[b + 1];
    for (std::size_t i = 0; i < q; ++i)
      nodes[b * q + i] = 0.5 * (lo + hi) + 0.5 * (hi - lo) * rule.nodes[i];
  }
  const DensityCurve curve = analytic.beta() == Beta::Real ? s1_curve(analytic, nodes, cfg)
                                                           : s2_curve(analytic, nodes);

  HistogramComparison out;
  out.analytic.resize(nbins);
  out.z.assign(nbins, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t b = 0; b < nbins; ++b) {
    double avg = 0.0;
    for (std::size_t i = 0; i < q; ++i) avg += 0.5 * rule.weights[i] * curve.values[b * q + i];
    out.analytic[b] = avg;
    if (hist.counts[b] < min_count) continue;
    const double z = (hist.density[b] - avg) / hist.sigma[b];
    out.z[b] = z;
    ++out.bins_used;
    if (std::abs(z) <= 3.0) ++out.within_3sigma;
    out.max_abs_z = std::max(out.max_abs_z, std::abs(z));
  }
  out.fraction_within_3sigma =
      out.bins_used ? static_cast<double>(out.within_3sigma) / static_cast<double>(out.bins_used) : 0.0;
  return out;
}

}  // namespace wishart::mc
