#include "wishart/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "wishart/checks.hpp"
#include "wishart/complex_density.hpp"
#include "wishart/errors.hpp"
#include "wishart/montecarlo.hpp"
#include "wishart/real_density.hpp"

namespace wishart::cli {

using ojson = nlohmann::ordered_json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fmt17(double v) {
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

ojson histogram_json(const mc::SpectrumHistogram& h) {
  ojson j;
  j["bin_edges"] = h.bin_edges;
  j["counts"] = h.counts;
  j["density"] = h.density;
  j["sigma"] = h.sigma;
  j["seed"] = h.seed;
  j["samples"] = h.samples;
  return j;
}

mc::BinSpec bin_spec(const JobConfig& job) {
  if (job.bins > 0 && job.bin_width > 0.0)
    throw InvalidArgument("--bins and --bin-width are mutually exclusive");
  if (job.bins > 0) return {job.bins, 0.0};
  if (job.bin_width > 0.0) return {0, job.bin_width};
  return {40, 0.0};
}

std::vector<double> linspace(double a, double b, std::size_t count) {
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i)
    g[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
  return g;
}

ojson complex_json(std::complex<double> z) { return ojson::array({z.real(), z.imag()}); }

}  // namespace

EmpiricalSpectrum parse_spectrum_json(const std::string& text) {
  ojson doc;
  try {
    doc = ojson::parse(text);
  } catch (const ojson::parse_error& e) {
    throw InputError(std::string("spectrum file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InputError("spectrum document must be a JSON object");
  for (const char* key : {"beta", "n", "lambda"})
    if (!doc.contains(key)) throw InputError(std::string("spectrum document lacks \"") + key + "\"");
  if (!doc["beta"].is_number_integer() || !doc["n"].is_number_integer())
    throw InputError("\"beta\" and \"n\" must be integers");
  if (!doc["lambda"].is_array()) throw InputError("\"lambda\" must be an array");
  std::vector<double> lambdas;
  for (const auto& v : doc["lambda"]) {
    if (!v.is_number()) throw InputError("\"lambda\" entries must be numbers");
    lambdas.push_back(v.get<double>());
  }
  return validate_spectrum(doc["beta"].get<int>(), doc["n"].get<int>(), std::move(lambdas));
}

EmpiricalSpectrum load_spectrum(const std::string& path) {
  return parse_spectrum_json(read_file(path));
}

GridSpec parse_grid(const std::string& text) {
  if (text == "auto") return {};
  GridSpec g;
  g.automatic = false;
  char c1 = 0, c2 = 0, tail = 0;
  std::istringstream in(text);
  in.imbue(std::locale::classic());
  if (!(in >> g.x_min >> c1 >> g.x_max >> c2 >> g.points) || c1 != ':' || c2 != ':' ||
      (in >> tail))
    throw InvalidArgument("grid must be MIN:MAX:N or auto, got '" + text + "'");
  if (g.points < 2) throw InvalidArgument("grid needs at least 2 points");
  if (!(g.x_min < g.x_max)) throw InvalidArgument("grid needs MIN < MAX");
  return g;
}

std::vector<double> make_grid(const GridSpec& grid, const EmpiricalSpectrum& spectrum) {
  if (grid.automatic) return linspace(0.0, 1.3 * spectrum.n() * spectrum.largest(), 400);
  return linspace(grid.x_min, grid.x_max, static_cast<std::size_t>(grid.points));
}

CommandOutput cmd_density(const JobConfig& job) {
  const auto s = load_spectrum(job.spectrum_path);
  const auto grid = make_grid(job.grid, s);
  const DensityCurve curve =
      s.beta() == Beta::Real ? s1_curve(s, grid, job.quad) : s2_curve(s, grid);
  std::string csv = "x,S,err\n";
  for (std::size_t i = 0; i < grid.size(); ++i)
    csv += fmt17(grid[i]) + "," + fmt17(curve.values[i]) + "," + fmt17(curve.errors[i]) + "\n";
  return {csv, true};
}

CommandOutput cmd_mc(const JobConfig& job) {
  const auto s = load_spectrum(job.spectrum_path);
  const auto h = mc::mc_histogram(s, job.samples, bin_spec(job), job.seed);
  return {histogram_json(h).dump(2) + "\n", true};
}

CommandOutput cmd_compare(const JobConfig& job) {
  const auto s = load_spectrum(job.spectrum_path);
  const auto analytic = job.analytic_spectrum_path.empty()
                            ? s
                            : load_spectrum(job.analytic_spectrum_path);
  const auto h = mc::mc_histogram(s, job.samples, bin_spec(job), job.seed);
  const auto cmp = mc::compare_histogram(h, analytic, job.quad);

  ojson bins = ojson::array();
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    ojson row;
    row["lo"] = h.bin_edges[b];
    row["hi"] = h.bin_edges[b + 1];
    row["count"] = h.counts[b];
    row["density"] = h.density[b];
    row["sigma"] = h.sigma[b];
    row["analytic"] = cmp.analytic[b];
    row["z"] = std::isnan(cmp.z[b]) ? ojson(nullptr) : ojson(cmp.z[b]);
    bins.push_back(row);
  }
  const bool pass = cmp.bins_used > 0 && cmp.fraction_within_3sigma >= 0.95;
  ojson report;
  report["seed"] = h.seed;
  report["samples"] = h.samples;
  report["bins_used"] = cmp.bins_used;
  report["within_3sigma"] = cmp.within_3sigma;
  report["fraction_within_3sigma"] = cmp.fraction_within_3sigma;
  report["max_abs_z"] = cmp.max_abs_z;
  report["pass"] = pass;
  report["bins"] = bins;
  return {report.dump(2) + "\n", pass};
}

CommandOutput cmd_validate(const JobConfig& job) {
  const auto s = load_spectrum(job.spectrum_path);
  if (s.beta() != Beta::Real) throw InvalidArgument("validate needs a beta = 1 spectrum");
  require_real_density_domain(s);
  const double lp = s.largest();
  const int n = s.n();
  bool all = true;
  ojson checks = ojson::array();
  auto add = [&](ojson c, bool pass) {
    c["pass"] = pass;
    all = all && pass;
    checks.push_back(std::move(c));
  };

  {
    ojson pts = ojson::array();
    double worst = 0.0;
    for (std::complex<double> x0 : {std::complex<double>(1.0, 2.0), std::complex<double>(-5.0, 0.0),
                                    std::complex<double>(0.3, 0.1)}) {
      const double d = checks::z1_unit_check(s, x0 * lp, job.quad);
      worst = std::max(worst, d);
      pts.push_back({{"x0", complex_json(x0 * lp)}, {"deviation", d}});
    }
    add({{"name", "z1_unit"}, {"tolerance", 1e-6}, {"max_deviation", worst}, {"points", pts}},
        worst < 1e-6);
  }
  {
    const std::complex<double> x0(1.5 * lp, 0.5 * lp), x1(lp, 0.5 * lp);
    const std::array<int, 4> ns{50, 100, 200, 400};
    const auto dev = checks::clt_limit_check(s, x0, x1, ns, job.quad);
    add({{"name", "clt_limit"},
         {"x0", complex_json(x0)},
         {"x1", complex_json(x1)},
         {"n", ns},
         {"deviation", dev},
         {"tolerance", 5e-2}},
        dev.back() < dev.front() && dev.back() < 5e-2);
  }
  {
    ojson pts = ojson::array();
    bool ok = true;
    const double scale = n * lp;
    const double eps = 1e-3 * scale, h = 1e-4 * scale;
    for (int k = 0; k < 5; ++k) {
      const double x = scale * (0.15 + 0.25 * k);
      const double exact = s1_exact(s, x, job.quad).value;
      const double oracle = richardson_eps(s1_epsilon_oracle(s, x, eps, h, job.quad),
                                           s1_epsilon_oracle(s, x, eps / 2, h, job.quad),
                                           s1_epsilon_oracle(s, x, eps / 4, h, job.quad));
      const double diff = std::abs(exact - oracle);
      const bool pass = diff <= std::max(1e-3, 1e-2 * std::abs(oracle));
      ok = ok && pass;
      pts.push_back({{"x", x}, {"s1_exact", exact}, {"oracle", oracle}, {"difference", diff}});
    }
    add({{"name", "s1_vs_epsilon_oracle"}, {"points", pts}}, ok);
  }
  {
    const double x_max = lp * (n + 10.0 * std::sqrt(static_cast<double>(n)) + 20.0);
    const auto grid = linspace(0.0, x_max, 4001);
    const auto curve = s1_curve(s, grid, job.quad);
    double norm = 0.0, mom = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      const double w = 0.5 * (grid[i + 1] - grid[i]);
      norm += w * (curve.values[i] + curve.values[i + 1]);
      mom += w * (grid[i] * curve.values[i] + grid[i + 1] * curve.values[i + 1]);
    }
    const auto l = s.lambdas();
    const double expected = n * std::accumulate(l.begin(), l.end(), 0.0) / s.p();
    add({{"name", "normalization"}, {"integral", norm}, {"tolerance", 1e-3}},
        std::abs(norm - 1.0) < 1e-3);
    add({{"name", "first_moment"},
         {"integral", mom},
         {"expected", expected},
         {"relative_tolerance", 1e-2}},
        std::abs(mom - expected) < 1e-2 * expected);
  }

  ojson report;
  report["pass"] = all;
  report["checks"] = checks;
  return {report.dump(2) + "\n", all};
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  JobConfig job;
  std::string grid_text = "auto";
  CLI::App app{"Spectral density of correlated Wishart matrices"};
  app.require_subcommand(1);

  auto common = [&](CLI::App* sub) {
    sub->add_option("--spectrum", job.spectrum_path, "spectrum JSON file")->required();
    sub->add_option("--out", job.output_path, "output file (default stdout)");
    sub->add_option("--abs-tol", job.quad.abs_tol, "absolute quadrature tolerance");
    sub->add_option("--rel-tol", job.quad.rel_tol, "relative quadrature tolerance");
  };
  auto sampling = [&](CLI::App* sub) {
    sub->add_option("--samples", job.samples, "number of sampled matrices");
    sub->add_option("--bins", job.bins, "number of histogram bins");
    sub->add_option("--bin-width", job.bin_width, "histogram bin width");
    sub->add_option("--seed", job.seed, "random seed");
  };
  auto* density = app.add_subcommand("density", "one-point function on a grid (CSV)");
  common(density);
  density->add_option("--grid", grid_text, "MIN:MAX:N or auto");
  auto* mcmd = app.add_subcommand("mc", "Monte-Carlo eigenvalue histogram (JSON)");
  common(mcmd);
  sampling(mcmd);
  auto* compare = app.add_subcommand("compare", "histogram against the analytic curve (JSON)");
  common(compare);
  sampling(compare);
  compare->add_option("--analytic-spectrum", job.analytic_spectrum_path,
                      "spectrum for the analytic side (default: --spectrum)");
  auto* validate = app.add_subcommand("validate", "self-consistency checks (JSON)");
  common(validate);

  auto error_json = [&](const std::string& kind, const std::string& message) {
    err << ojson{{"error", kind}, {"message", message}}.dump() << "\n";
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    error_json("UsageError", e.what());
    return 2;
  }

  try {
    job.command = app.get_subcommands().front()->get_name();
    job.grid = parse_grid(grid_text);
    job.quad.validate();
    CommandOutput result;
    if (job.command == "density") result = cmd_density(job);
    else if (job.command == "mc") result = cmd_mc(job);
    else if (job.command == "compare") result = cmd_compare(job);
    else result = cmd_validate(job);

    if (job.output_path.empty()) {
      out << result.text;
    } else {
      std::ofstream f(job.output_path, std::ios::binary);
      if (!f) throw InputError("cannot write " + job.output_path);
      f << result.text;
      if (!f) throw InputError("write failed for " + job.output_path);
    }
    return result.passed ? 0 : 3;
  } catch (const Error& e) {
    error_json(e.kind(), e.what());
  } catch (const std::exception& e) {
    error_json("InternalError", e.what());
  }
  return 1;
}

}  // namespace wishart::cli
