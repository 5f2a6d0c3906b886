#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <functional>
#include <unistd.h>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "fracstar/cli/commands.hpp"
#include "fracstar/cli/config.hpp"

namespace fs = std::filesystem;
using fracstar::cli::ConfigError;
using fracstar::cli::parse_config;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("fracstar_cli_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "fracstar");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = fracstar::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream(file) << text;
}

std::string key_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "";
}

}  // namespace

TEST_CASE("real values accept multiples of pi") {
  using fracstar::cli::parse_real;
  CHECK(parse_real("x", "0.25") == 0.25);
  CHECK(parse_real("x", "pi") == doctest::Approx(M_PI).epsilon(1e-15));
  CHECK(parse_real("x", "0.1*pi") == doctest::Approx(0.1 * M_PI).epsilon(1e-15));
  CHECK(parse_real("x", "pi/2") == doctest::Approx(M_PI / 2).epsilon(1e-15));
  CHECK(key_of([] { parse_real("Omega", "pie"); }) == "Omega");
  CHECK(key_of([] { parse_real("Omega", ""); }) == "Omega");
}

TEST_CASE("defaults and layering") {
  const auto base = parse_config("simulate", std::nullopt, {});
  CHECK(base.system.alpha == 0.9);
  CHECK(base.system.N == 10);
  CHECK(base.paths == 3000);
  CHECK(base.system.sigma2 == 0.0);
  CHECK(base.grid.n_steps() == 1500);

  TempDir dir("layer");
  const fs::path file = dir.path / "run.cfg";
  write_text(file, "# comment line\nalpha = 0.6\nN = 4  # trailing comment\n\n");
  const auto layered = parse_config("simulate", file, {{"N", "7"}});
  CHECK(layered.system.alpha == 0.6);
  CHECK(layered.system.N == 7);

  write_text(file, "");
  const auto empty = parse_config("gain", file, {{"omega", "2"}});
  CHECK(empty.system.omega == 2.0);
  CHECK(empty.system.alpha == 0.9);

  // Command-specific defaults.
  CHECK(parse_config("scan-mfpt", std::nullopt, {}).paths == 500);
  CHECK(parse_config("scan-csr", std::nullopt, {}).series_param == fracstar::SeriesParam::omega);
}

TEST_CASE("a typical ensemble configuration is accepted") {
  TempDir dir("fig");
  const fs::path file = dir.path / "ensemble.cfg";
  write_text(file,
             "alpha = 0.9\nomega = 1\nepsilon = 1\nN = 10\nA0 = 1\nOmega = pi\nlambda = 1\n"
             "sigma2 = 1\ndt = 0.01\nt_end = 15\npaths = 3000\nseed = 7\n");
  const auto c = parse_config("simulate", file, {});
  CHECK(c.system.Omega == doctest::Approx(M_PI).epsilon(1e-15));
  CHECK(c.system.sigma2 == 1.0);
  CHECK(c.seed == 7);
}

TEST_CASE("invalid values name the offending key") {
  CHECK(key_of([] { parse_config("gain", std::nullopt, {{"alpha", "1.5"}}); }) == "alpha");
  CHECK(key_of([] { parse_config("gain", std::nullopt, {{"alpha", "0"}}); }) == "alpha");
  CHECK(key_of([] { parse_config("gain", std::nullopt, {{"N", "0"}}); }) == "N");
  CHECK(key_of([] { parse_config("gain", std::nullopt, {{"N", "2.5"}}); }) == "N");
  CHECK(key_of([] { parse_config("gain", std::nullopt, {{"lambda", "-1"}}); }) == "lambda");
  CHECK(key_of([] { parse_config("simulate", std::nullopt, {{"dt", "0"}}); }) == "dt");
  CHECK(key_of([] { parse_config("simulate", std::nullopt, {{"paths", "0"}}); }) == "paths");
  CHECK(key_of([] { parse_config("gain", std::nullopt, {{"bogus", "1"}}); }) == "bogus");
  CHECK(key_of([] { parse_config("gain", std::nullopt, {{"sigma", "1"}, {"sigma2", "1"}}); }) == "sigma");
  CHECK_THROWS_AS(parse_config("nope", std::nullopt, {}), std::invalid_argument);

  TempDir dir("bad");
  const fs::path file = dir.path / "bad.cfg";
  write_text(file, "alpha = 0.5\nalpha = 0.6\n");
  CHECK(key_of([&] { fracstar::cli::read_config_file(file); }) == "alpha");
  write_text(file, "gamma = 1\n");
  CHECK(key_of([&] { fracstar::cli::read_config_file(file); }) == "gamma");
}

TEST_CASE("sigma and sigma2 are two spellings of one setting") {
  const auto sd = parse_config("gain", std::nullopt, {{"sigma", "0.5"}});
  CHECK(sd.system.sigma2 == 0.25);
  CHECK(sd.sigma_given_as_sd);

  // A flag for one spelling replaces a file value given in the other.
  TempDir dir("sigma");
  const fs::path file = dir.path / "s.cfg";
  write_text(file, "sigma2 = 4\n");
  CHECK(parse_config("gain", file, {{"sigma", "1"}}).system.sigma2 == 1.0);
}

TEST_CASE("analytic commands print their values") {
  TempDir dir("gain");
  const auto g = invoke({"gain", "--alpha", "1", "--omega", "1", "--lambda", "1", "--Omega", "1", "--sigma2", "0",
                         "--out", dir.path.string()});
  CHECK(g.code == 0);
  CHECK(g.out.find("G = 0.707107, phi = -0.785398") != std::string::npos);
  CHECK(fs::exists(dir.path / "manifest.txt"));

  const auto s = invoke({"stability", "--alpha", "1", "--omega", "1", "--lambda", "1", "--sigma2", "0.5", "--out",
                         dir.path.string()});
  CHECK(s.code == 0);
  CHECK(s.out.find("stationary: yes (margin 1.5); global sync: yes") != std::string::npos);
}

TEST_CASE("exit codes") {
  TempDir dir("codes");
  CHECK(invoke({"--help"}).code == 0);
  CHECK(invoke({"--version"}).code == 0);
  CHECK(invoke({}).code == 1);
  CHECK(invoke({"frobnicate"}).code == 1);
  const auto bad = invoke({"gain", "--alpha", "1.5", "--out", dir.path.string()});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("alpha") != std::string::npos);
  CHECK(invoke({"gain", "--set", "alpha"}).code == 1);
  // A diverging integration is a runtime failure, not an input error.
  const auto blow = invoke({"simulate", "--omega", "1e4", "--paths", "2", "--t_end", "1", "--out",
                            dir.path.string()});
  CHECK(blow.code == 2);
}

TEST_CASE("phase scan writes its table") {
  TempDir dir("phase");
  const auto r = invoke({"scan-phase", "--set", "lambda_step=0.5", "--set", "sigma2_step=0.5", "--out",
                         dir.path.string()});
  REQUIRE(r.code == 0);
  std::ifstream in(dir.path / "phase.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "lambda,sigma2,class");
}

TEST_CASE("re-running from the manifest reproduces the output exactly") {
  TempDir first("first");
  TempDir second("second");
  const auto a = invoke({"simulate", "--N", "3", "--paths", "40", "--t_end", "2", "--sigma", "0.7", "--seed", "11",
                         "--out", first.path.string()});
  REQUIRE(a.code == 0);
  const auto b = invoke({"simulate", "--config", (first.path / "manifest.txt").string(), "--out",
                         second.path.string()});
  REQUIRE(b.code == 0);
  CHECK(slurp(first.path / "ensemble.csv") == slurp(second.path / "ensemble.csv"));
  CHECK(slurp(first.path / "ensemble.csv").size() > 100);
  const auto c = invoke({"simulate", "--config", (first.path / "manifest.txt").string(), "--workers", "3", "--out",
                         second.path.string()});
  REQUIRE(c.code == 0);
  CHECK(slurp(first.path / "ensemble.csv") == slurp(second.path / "ensemble.csv"));
}
