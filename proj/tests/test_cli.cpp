#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "wishart/cli.hpp"
#include "wishart/errors.hpp"

using namespace wishart;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "wishart");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "wishart_cli_tests";
  fs::create_directories(dir);
  return dir;
}

std::string write_file(const std::string& name, const std::string& text) {
  const fs::path path = scratch_dir() / name;
  std::ofstream(path, std::ios::binary) << text;
  return path.string();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Csv {
  std::vector<double> x, s, err;
};

Csv parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  REQUIRE(line == "x,S,err");
  Csv c;
  while (std::getline(in, line)) {
    double a, b, e;
    char c1, c2;
    std::istringstream row(line);
    REQUIRE(static_cast<bool>(row >> a >> c1 >> b >> c2 >> e));
    c.x.push_back(a);
    c.s.push_back(b);
    c.err.push_back(e);
  }
  return c;
}

const std::string kTen =
    R"({"beta": 1, "n": 50, "lambda": [1, 0.49, 0.4225, 0.36, 0.25, 0.09, 0.0729, 0.0529, 0.04, 0.0225]})";

}  // namespace

TEST_CASE("spectrum documents") {
  auto s = cli::parse_spectrum_json(R"({"beta": 2, "n": 7, "lambda": [3, 1]})");
  CHECK(s.beta() == Beta::Complex);
  CHECK(s.n() == 7);
  CHECK(s.lambda(0) == 1.0);
  CHECK_THROWS_AS(cli::parse_spectrum_json("{"), InputError);
  CHECK_THROWS_AS(cli::parse_spectrum_json(R"({"beta": 1, "n": 7})"), InputError);
  CHECK_THROWS_AS(cli::parse_spectrum_json(R"({"beta": 1, "n": 7, "lambda": ["a"]})"), InputError);
  CHECK_THROWS_AS(cli::parse_spectrum_json(R"({"beta": 1, "n": 1, "lambda": [1, 2]})"),
                  DimensionError);
  CHECK_THROWS_AS(cli::load_spectrum((scratch_dir() / "missing.json").string()), InputError);
}

TEST_CASE("grid strings") {
  auto g = cli::parse_grid("-1:4.5:12");
  CHECK_FALSE(g.automatic);
  CHECK(g.x_min == -1.0);
  CHECK(g.x_max == 4.5);
  CHECK(g.points == 12);
  CHECK(cli::parse_grid("auto").automatic);
  CHECK_THROWS_AS(cli::parse_grid("1:2"), InvalidArgument);
  CHECK_THROWS_AS(cli::parse_grid("1:2:1"), InvalidArgument);
  CHECK_THROWS_AS(cli::parse_grid("3:2:10"), InvalidArgument);
  CHECK_THROWS_AS(cli::parse_grid("1:2:10x"), InvalidArgument);

  auto s = cli::parse_spectrum_json(R"({"beta": 2, "n": 10, "lambda": [0.5, 2]})");
  const auto grid = cli::make_grid(cli::GridSpec{}, s);
  CHECK(grid.size() == 400);
  CHECK(grid.front() == 0.0);
  CHECK(grid.back() == doctest::Approx(26.0));
}

TEST_CASE("density for p=10, n=50") {
  const auto spec = write_file("p10.json", kTen);
  const auto out = (scratch_dir() / "p10.csv").string();
  auto r = run_cli({"density", "--spectrum", spec, "--out", out});
  REQUIRE(r.code == 0);
  const std::string text = read_file(out);
  CHECK(text.find('\r') == std::string::npos);
  const Csv c = parse_csv(text);
  REQUIRE(c.x.size() == 400);
  std::size_t rightmost = 0;
  for (std::size_t i = 1; i + 1 < c.s.size(); ++i)
    if (c.s[i] > c.s[i - 1] && c.s[i] >= c.s[i + 1]) rightmost = i;
  CHECK(c.x[rightmost] >= 45.0);
  CHECK(c.x[rightmost] <= 55.0);
}

TEST_CASE("complex single-eigenvalue density is a Gamma density") {
  const auto spec = write_file("gamma.json", R"({"beta": 2, "n": 5, "lambda": [1]})");
  auto r = run_cli({"density", "--spectrum", spec, "--grid", "-2:20:45"});
  REQUIRE(r.code == 0);
  const Csv c = parse_csv(r.out);
  REQUIRE(c.x.size() == 45);
  for (std::size_t i = 0; i < c.x.size(); ++i) {
    const double x = c.x[i];
    const double expect = x <= 0.0 ? 0.0 : std::exp(4.0 * std::log(x) - x - std::lgamma(5.0));
    CHECK(std::abs(c.s[i] - expect) < 1e-12);
    if (x < 0.0) CHECK(c.s[i] == 0.0);
  }
}

TEST_CASE("histogram output") {
  const auto spec = write_file("p10_mc.json", kTen);
  auto r = run_cli({"mc", "--spectrum", spec, "--samples", "100000", "--bin-width", "0.7",
                    "--seed", "5"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  const auto counts = j["counts"].get<std::vector<std::uint64_t>>();
  CHECK(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}) == 1000000);
  CHECK(j["bin_edges"][1].get<double>() == doctest::Approx(0.7));
  CHECK(j["seed"] == 5);
  CHECK(j["samples"] == 100000);
  // Parsed objects sort their keys, so check the order in the raw text.
  CHECK(r.out.find("\"bin_edges\"") < r.out.find("\"counts\""));
  CHECK(r.out.find("\"counts\"") < r.out.find("\"density\""));
  CHECK(r.out.find("\"sigma\"") < r.out.find("\"seed\""));

  auto one = run_cli({"mc", "--spectrum", spec, "--samples", "1", "--bins", "5"});
  REQUIRE(one.code == 0);
  const auto c1 = json::parse(one.out)["counts"].get<std::vector<std::uint64_t>>();
  CHECK(std::accumulate(c1.begin(), c1.end(), std::uint64_t{0}) == 10);

  auto again = run_cli({"mc", "--spectrum", spec, "--samples", "1", "--bins", "5"});
  CHECK(again.out == one.out);

  auto both = run_cli({"mc", "--spectrum", spec, "--bins", "5", "--bin-width", "0.5"});
  CHECK(both.code == 1);
  CHECK(json::parse(both.err)["error"] == "InvalidArgument");
}

TEST_CASE("comparison reports") {
  const auto good = write_file("cmp.json", R"({"beta": 2, "n": 4, "lambda": [1, 2]})");
  const auto wrong = write_file("cmp_wrong.json", R"({"beta": 2, "n": 4, "lambda": [1.5, 3]})");
  auto r = run_cli({"compare", "--spectrum", good, "--samples", "100000", "--bin-width", "0.25"});
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  CHECK(j["fraction_within_3sigma"].get<double>() >= 0.95);
  CHECK(j["pass"] == true);
  CHECK(j["bins_used"].get<int>() > 30);

  auto bad = run_cli({"compare", "--spectrum", good, "--analytic-spectrum", wrong, "--samples",
                      "100000", "--bin-width", "0.25"});
  CHECK(bad.code != 0);
  auto jb = json::parse(bad.out);
  CHECK(jb["fraction_within_3sigma"].get<double>() < 0.5);
  CHECK(jb["pass"] == false);

  const auto p10 = write_file("p10_cmp.json", kTen);
  auto f = run_cli({"compare", "--spectrum", p10, "--samples", "100000", "--bin-width", "0.7"});
  CHECK(f.code == 0);
  CHECK(json::parse(f.out)["fraction_within_3sigma"].get<double>() >= 0.95);
}

TEST_CASE("validation report") {
  const auto spec = write_file("val.json", R"({"beta": 1, "n": 10, "lambda": [0.5, 1]})");
  auto r = run_cli({"validate", "--spectrum", spec});
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  CHECK(j["pass"] == true);
  CHECK(j["checks"].size() == 5);
  for (const auto& c : j["checks"]) CHECK(c["pass"] == true);

  auto loose = run_cli({"validate", "--spectrum", spec, "--abs-tol", "1e-6", "--rel-tol", "1e-6"});
  auto tight = run_cli({"validate", "--spectrum", spec, "--abs-tol", "1e-12", "--rel-tol", "1e-12"});
  REQUIRE(tight.code == 0);
  const double dl = json::parse(loose.out)["checks"][0]["max_deviation"].get<double>();
  const double dt = json::parse(tight.out)["checks"][0]["max_deviation"].get<double>();
  CHECK(dt <= dl + 1e-15);

  const auto small = write_file("val_small.json", R"({"beta": 1, "n": 5, "lambda": [0.5, 1]})");
  auto e = run_cli({"validate", "--spectrum", small});
  CHECK(e.code != 0);
  CHECK(e.out.empty());
  CHECK(json::parse(e.err)["error"] == "RealCaseTooSmallN");

  const auto cplx = write_file("val_c.json", R"({"beta": 2, "n": 10, "lambda": [0.5, 1]})");
  CHECK(run_cli({"validate", "--spectrum", cplx}).code != 0);
}

TEST_CASE("usage and file errors") {
  auto none = run_cli({});
  CHECK(none.code == 2);
  CHECK(json::parse(none.err)["error"] == "UsageError");
  auto missing = run_cli({"density"});
  CHECK(missing.code == 2);
  auto nofile = run_cli({"density", "--spectrum", (scratch_dir() / "nope.json").string()});
  CHECK(nofile.code == 1);
  CHECK(json::parse(nofile.err)["error"] == "InputError");
  const auto spec = write_file("grid.json", R"({"beta": 2, "n": 4, "lambda": [1]})");
  auto badgrid = run_cli({"density", "--spectrum", spec, "--grid", "5:1:10"});
  CHECK(badgrid.code == 1);
  CHECK(json::parse(badgrid.err)["error"] == "InvalidArgument");
  auto help = run_cli({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("density") != std::string::npos);
}
