#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wishart/quadrature.hpp"
#include "wishart/spectrum.hpp"

namespace wishart::cli {

struct GridSpec {
  bool automatic = true;
  double x_min = 0.0;
  double x_max = 0.0;
  int points = 0;
};

struct JobConfig {
  std::string command;  // density | mc | compare | validate
  std::string spectrum_path;
  /// compare only: spectrum used for the analytic curve (defaults to spectrum_path).
  std::string analytic_spectrum_path;
  GridSpec grid;
  std::uint64_t samples = 100000;
  int bins = 0;
  double bin_width = 0.0;
  std::uint64_t seed = 1;
  std::string output_path;
  quad::QuadratureConfig quad;
};

/// {"beta": 1|2, "n": int, "lambda": [...]}; throws InputError or the
/// spectrum validation errors.
EmpiricalSpectrum parse_spectrum_json(const std::string& text);
EmpiricalSpectrum load_spectrum(const std::string& path);

/// "MIN:MAX:N" or "auto".
GridSpec parse_grid(const std::string& text);
/// auto = [0, 1.3 n l_p] with 400 points.
std::vector<double> make_grid(const GridSpec& grid, const EmpiricalSpectrum& spectrum);

struct CommandOutput {
  std::string text;
  bool passed = true;
};

CommandOutput cmd_density(const JobConfig& job);
CommandOutput cmd_mc(const JobConfig& job);
CommandOutput cmd_compare(const JobConfig& job);
CommandOutput cmd_validate(const JobConfig& job);

/// Parses arguments, runs the command and writes its output to --out (or
/// `out`). Errors go to `err` as one JSON object. Returns the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wishart::cli
