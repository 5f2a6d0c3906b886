#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fracstar/monte_carlo.hpp"
#include "fracstar/star_system.hpp"

namespace fracstar {

/// Closed interval sampled at min, min + step, ... up to max (inclusive within
/// rounding).
struct Axis {
  double min = 0.0;
  double max = 1.0;
  double step = 0.1;

  static Axis with_count(double min, double max, std::size_t count);
  void validate(const std::string& name) const;
  std::vector<double> values() const;
};

/// Caps the number of cells any scan may evaluate.
inline constexpr std::size_t kDefaultCellCap = 4'000'000;

enum class RegimeClass : int {
  Nonstationary = 0,
  StationaryNoSR = 1,
  StationaryWithSR = 2,
};

/// Classification of one parameter set from the stationarity and SR criteria alone.
RegimeClass classify(const SystemParams& p);

struct PhaseDiagram {
  std::vector<double> lambdas;
  std::vector<double> sigma2s;
  /// classes(i, j) for lambdas[i], sigma2s[j]
  Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic> classes;

  /// Fraction of stationary cells that also show SR; empty if none are stationary.
  std::optional<double> sr_fraction() const;
};

PhaseDiagram phase_diagram(const Axis& lambda, const Axis& sigma2, const SystemParams& fixed, std::size_t workers = 1,
                           std::size_t cell_cap = kDefaultCellCap);

/// Uniform sampling measure for the SR-ratio scan. sigma^2 is drawn as
/// u * (omega^2 + omega lambda^alpha) with u uniform in [sigma2_rel_min, sigma2_rel_max).
struct SamplingSpec {
  double omega_min = 0.5, omega_max = 2.0;
  double lambda_min = 0.1, lambda_max = 5.0;
  double Omega_min = 0.1, Omega_max = 3.141592653589793;
  double sigma2_rel_min = 0.0, sigma2_rel_max = 1.0;
  std::size_t samples = 100'000;
  std::uint64_t seed = 1;

  void validate() const;
};

struct SrRatio {
  double alpha = 0.0;
  std::optional<double> ratio;  ///< empty when no sample was stationary
  std::size_t n_stationary = 0;
  std::size_t n_total = 0;
};

/// For each alpha, the fraction of stationary samples that satisfy the SR criterion.
/// Each alpha draws its own stream derive_seed(seed, index).
std::vector<SrRatio> sr_ratio_vs_alpha(std::span<const double> alphas, const SamplingSpec& spec,
                                       std::size_t workers = 1);

struct GainCell {
  double Omega = 0.0;
  double sigma2 = 0.0;
  std::optional<double> G;  ///< empty for nonstationary or singular cells
  bool stationary = false;
  bool singular = false;
};

/// Row-major over Omega then sigma2.
std::vector<GainCell> gain_surface(const Axis& Omega, const Axis& sigma2, const SystemParams& fixed,
                                   std::size_t workers = 1, std::size_t cell_cap = kDefaultCellCap);

struct CurvePoint {
  double x = 0.0;
  std::optional<double> G;
  int series_id = 0;
};

/// Which parameter differs between the series of a curve scan; named after the config keys.
enum class SeriesParam { alpha, omega, Omega, lambda };

/// Parses "alpha", "omega", "Omega" or "lambda".
SeriesParam parse_series_param(const std::string& name);
std::string series_param_name(SeriesParam which);
SystemParams with_series_value(SystemParams p, SeriesParam which, double value);

/// G as a function of the forcing frequency, one series per value.
std::vector<CurvePoint> bsr_curve(const Axis& Omega, SeriesParam which, std::span<const double> values,
                                  const SystemParams& fixed);

/// G as a function of sigma (not sigma^2); points with sigma^2 at or above the
/// stationarity bound of their series are dropped.
std::vector<CurvePoint> csr_curve(const Axis& sigma, SeriesParam which, std::span<const double> values,
                                  const SystemParams& fixed);

/// Points of one series, in x order.
std::vector<CurvePoint> series(std::span<const CurvePoint> curve, int series_id);

/// Number of strict interior local extrema of a sampled curve (sign changes of
/// the first difference, ignoring flat steps).
std::size_t count_interior_extrema(std::span<const double> values);

struct MfptRow {
  int N = 1;
  MFPTEstimate estimate;
};

struct MfptScanSettings {
  TimeGrid grid{0.01, 1500};
  std::size_t n_paths = 500;
  std::uint64_t seed = 1;
  std::optional<PassageCriterion> passage;  ///< default_passage per N when empty
  InitSpec init = InitSpec::standard_normal();
  EnsembleOptions options;
};

/// estimate_mfpt for each N, every N using the same base seed.
std::vector<MfptRow> mfpt_vs_N(std::span<const int> Ns, const SystemParams& fixed, const MfptScanSettings& settings);

}  // namespace fracstar
