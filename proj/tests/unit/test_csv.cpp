#include <doctest.h>

#include <clocale>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "fracstar/csv.hpp"

namespace csv = fracstar::csv;

TEST_CASE("numbers round-trip bit for bit") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 20000; ++i) {
    const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    CHECK(csv::parse(csv::format(v)) == v);
  }
  for (const double v : {0.0, -0.0, 1.0, 0.1, 1e-310, std::numeric_limits<double>::max(),
                         std::numeric_limits<double>::denorm_min()}) {
    CHECK(csv::parse(csv::format(v)) == v);
    CHECK(std::signbit(csv::parse(csv::format(v))) == std::signbit(v));
  }
  CHECK(csv::format(0.1) == "0.1");
  CHECK(csv::format(std::nan("")) == "nan");
  CHECK(csv::format(std::optional<double>{}) == "nan");
  CHECK(csv::format(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(std::isnan(csv::parse("nan")));
  CHECK(csv::parse("-inf") == -std::numeric_limits<double>::infinity());
}

TEST_CASE("malformed numbers are rejected") {
  CHECK_THROWS_AS(csv::parse(""), std::invalid_argument);
  CHECK_THROWS_AS(csv::parse("1.5x"), std::invalid_argument);
  CHECK_THROWS_AS(csv::parse("one"), std::invalid_argument);
  CHECK_THROWS_AS(csv::parse("1,5"), std::invalid_argument);
}

TEST_CASE("formatting ignores the C locale") {
  const char* previous = std::setlocale(LC_NUMERIC, nullptr);
  const std::string saved = previous ? previous : "C";
  if (std::setlocale(LC_NUMERIC, "de_DE.UTF-8") != nullptr) {
    CHECK(csv::format(2.5) == "2.5");
    CHECK(csv::parse("2.5") == 2.5);
  }
  std::setlocale(LC_NUMERIC, saved.c_str());
}

TEST_CASE("phase diagram file") {
  fracstar::PhaseDiagram d;
  d.lambdas = {0.5, 1.0};
  d.sigma2s = {0.1, 0.2, 0.3};
  d.classes.resize(2, 3);
  d.classes << 2, 1, 0, 1, 1, 0;
  std::stringstream out;
  csv::write_phase(out, d);
  std::string header;
  std::getline(out, header);
  CHECK(header == "lambda,sigma2,class");
  out.seekg(0);
  const auto table = csv::read(out);
  CHECK(table.header == std::vector<std::string>{"lambda", "sigma2", "class"});
  REQUIRE(table.rows.size() == 6);
  CHECK(table.rows[1] == std::vector<double>{0.5, 0.2, 1.0});
  CHECK(table.rows[5] == std::vector<double>{1.0, 0.3, 0.0});
}

TEST_CASE("writer headers") {
  auto header_of = [](auto&& write) {
    std::stringstream s;
    write(s);
    std::string h;
    std::getline(s, h);
    return h;
  };
  CHECK(header_of([](std::ostream& s) { csv::write_gain_surface(s, {}); }) == "Omega,sigma2,G,stationary");
  CHECK(header_of([](std::ostream& s) { csv::write_sr_ratio(s, {}); }) == "alpha,ratio,n_stationary,n_total");
  CHECK(header_of([](std::ostream& s) { csv::write_curve(s, {}); }) == "x,G,series_id");
  CHECK(header_of([](std::ostream& s) { csv::write_mfpt(s, {}); }) ==
        "N,mfpt_mean,mfpt_stderr,censored_fraction,n_paths");
}

TEST_CASE("absent values are written as nan") {
  const std::vector<fracstar::GainCell> cells{{1.0, 3.0, std::nullopt, false, false}, {1.0, 0.5, 0.25, true, false}};
  std::stringstream s;
  csv::write_gain_surface(s, cells);
  const auto t = csv::read(s);
  REQUIRE(t.rows.size() == 2);
  CHECK(std::isnan(t.rows[0][2]));
  CHECK(t.rows[0][3] == 0.0);
  CHECK(t.rows[1] == std::vector<double>{1.0, 0.5, 0.25, 1.0});

  const std::vector<fracstar::SrRatio> ratios{{0.3, std::nullopt, 0, 10}};
  std::stringstream r;
  csv::write_sr_ratio(r, ratios);
  const auto rt = csv::read(r);
  CHECK(std::isnan(rt.rows[0][1]));
  CHECK(rt.rows[0][3] == 10.0);
}

TEST_CASE("ensemble file") {
  fracstar::EnsembleStats stats{.grid = fracstar::TimeGrid(0.5, 2),
                                .mean_S = Eigen::Vector3d(0.0, 0.1, 0.2),
                                .stderr_S = Eigen::Vector3d::Zero(),
                                .mean_absdev = Eigen::Vector3d(1.0, 0.5, 0.25),
                                .A_est = 0.0,
                                .phi_est = 0.0,
                                .G_est = std::nullopt,
                                .fit_residual = 0.0,
                                .n_paths = 4,
                                .seed = 1};
  fracstar::GainBreakdown g;
  g.A1 = 2.0;
  g.phi = 0.3;
  std::stringstream s;
  csv::write_ensemble(s, stats, g, 1.5);
  const auto t = csv::read(s);
  CHECK(t.header == std::vector<std::string>{"t", "mean_S", "theory_S", "mean_absdev"});
  REQUIRE(t.rows.size() == 3);
  CHECK(t.rows[2][0] == 1.0);
  CHECK(t.rows[2][2] == 2.0 * std::sin(1.5 * 1.0 + 0.3));

  std::stringstream none;
  csv::write_ensemble(none, stats, std::nullopt, 1.5);
  CHECK(std::isnan(csv::read(none).rows[1][2]));
}

TEST_CASE("reader errors") {
  std::stringstream ragged("a,b\n1,2\n3\n");
  CHECK_THROWS_AS(csv::read(ragged), std::invalid_argument);
  std::stringstream empty("");
  CHECK_THROWS_AS(csv::read(empty), std::invalid_argument);
}
