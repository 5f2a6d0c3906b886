#include "fracstar/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace fracstar::csv {

std::string format(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

std::string format(const std::optional<double>& value) {
  return value ? format(*value) : format(std::numeric_limits<double>::quiet_NaN());
}

double parse(std::string_view text) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double value = 0.0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size()) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  return value;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

}  // namespace

Table read(std::istream& in) {
  Table table;
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("csv input is empty");
  table.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != table.header.size()) throw std::invalid_argument("csv row width differs from header");
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(parse(f));
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_phase(std::ostream& out, const PhaseDiagram& diagram) {
  out << "lambda,sigma2,class\n";
  for (std::size_t i = 0; i < diagram.lambdas.size(); ++i) {
    for (std::size_t j = 0; j < diagram.sigma2s.size(); ++j) {
      out << format(diagram.lambdas[i]) << ',' << format(diagram.sigma2s[j]) << ','
          << diagram.classes(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) << '\n';
    }
  }
}

void write_gain_surface(std::ostream& out, std::span<const GainCell> cells) {
  out << "Omega,sigma2,G,stationary\n";
  for (const auto& c : cells) {
    out << format(c.Omega) << ',' << format(c.sigma2) << ',' << format(c.G) << ',' << (c.stationary ? 1 : 0) << '\n';
  }
}

void write_sr_ratio(std::ostream& out, std::span<const SrRatio> ratios) {
  out << "alpha,ratio,n_stationary,n_total\n";
  for (const auto& r : ratios) {
    out << format(r.alpha) << ',' << format(r.ratio) << ',' << r.n_stationary << ',' << r.n_total << '\n';
  }
}

void write_curve(std::ostream& out, std::span<const CurvePoint> points) {
  out << "x,G,series_id\n";
  for (const auto& p : points) out << format(p.x) << ',' << format(p.G) << ',' << p.series_id << '\n';
}

void write_mfpt(std::ostream& out, std::span<const MfptRow> rows) {
  out << "N,mfpt_mean,mfpt_stderr,censored_fraction,n_paths\n";
  for (const auto& r : rows) {
    const auto& e = r.estimate;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out << r.N << ',' << format(e.valid ? e.mean : nan) << ',' << format(e.valid ? e.stderr : nan) << ','
        << format(e.censored_fraction) << ',' << e.n_paths << '\n';
  }
}

void write_ensemble(std::ostream& out, const EnsembleStats& stats, const std::optional<GainBreakdown>& theory,
                    double Omega) {
  out << "t,mean_S,theory_S,mean_absdev\n";
  for (std::size_t k = 0; k < stats.grid.size(); ++k) {
    const double t = stats.grid.time(k);
    const auto i = static_cast<Eigen::Index>(k);
    const double expected =
        theory ? theory->A1 * std::sin(Omega * t + theory->phi) : std::numeric_limits<double>::quiet_NaN();
    out << format(t) << ',' << format(stats.mean_S(i)) << ',' << format(expected) << ','
        << format(stats.mean_absdev(i)) << '\n';
  }
}

}  // namespace fracstar::csv
