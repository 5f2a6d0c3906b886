#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fracstar/analytics.hpp"
#include "fracstar/monte_carlo.hpp"
#include "fracstar/scan.hpp"

namespace fracstar::csv {

/// Shortest representation that parses back to the same double; "nan" for
/// NaN, "inf"/"-inf" for infinities. Locale independent.
std::string format(double value);
std::string format(const std::optional<double>& value);

/// Inverse of format(); throws std::invalid_argument on malformed input.
double parse(std::string_view text);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

Table read(std::istream& in);

void write_phase(std::ostream& out, const PhaseDiagram& diagram);
void write_gain_surface(std::ostream& out, std::span<const GainCell> cells);
void write_sr_ratio(std::ostream& out, std::span<const SrRatio> ratios);
void write_curve(std::ostream& out, std::span<const CurvePoint> points);
void write_mfpt(std::ostream& out, std::span<const MfptRow> rows);

/// theory_S is A1 sin(Omega t + phi) when the mean field is stationary, NaN otherwise.
void write_ensemble(std::ostream& out, const EnsembleStats& stats, const std::optional<GainBreakdown>& theory,
                    double Omega);

}  // namespace fracstar::csv
