#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "fracstar/grid.hpp"
#include "fracstar/star_system.hpp"

namespace fracstar {

/// How each realization's initial positions are drawn.
struct InitSpec {
  enum class Kind { StandardNormal, Constant };

  Kind kind = Kind::StandardNormal;
  double value = 0.0;

  static InitSpec standard_normal() { return {}; }
  static InitSpec constant(double v) { return {Kind::Constant, v}; }

  Eigen::VectorXd draw(Eigen::Index dim, std::uint64_t seed) const;
};

struct EnsembleOptions {
  std::size_t workers = 1;
  /// Trailing fraction of the horizon used for the stationary sinusoid fit.
  double fit_fraction = 0.3;
  PathOptions path;
};

/// Least-squares fit y ~ a sin(Omega t) + b cos(Omega t) = A sin(Omega t + phase).
struct SinusoidFit {
  double sin_coef = 0.0;
  double cos_coef = 0.0;
  double amplitude = 0.0;
  double phase = 0.0;
  double residual = 0.0;  ///< RMS of the fit residual
};

SinusoidFit fit_sinusoid(const Eigen::Ref<const Eigen::VectorXd>& t, const Eigen::Ref<const Eigen::VectorXd>& y,
                         double Omega);

struct EnsembleStats {
  TimeGrid grid;
  Eigen::VectorXd mean_S;
  Eigen::VectorXd stderr_S;     ///< standard error of mean_S at each time
  Eigen::VectorXd mean_absdev;  ///< ensemble mean of max_i |Delta_i(t)|
  double A_est = 0.0;
  double phi_est = 0.0;
  std::optional<double> G_est;  ///< absent when A0 = 0
  double fit_residual = 0.0;
  std::size_t n_paths = 0;
  std::uint64_t seed = 0;
};

/// Ensemble-averaged deviations; column 0 is the main particle.
struct DeviationProfile {
  TimeGrid grid;
  Eigen::MatrixXd mean;
  Eigen::MatrixXd stderr;
  std::size_t n_paths = 0;
};

struct MFPTEstimate {
  double mean = 0.0;
  double stderr = 0.0;
  double censored_fraction = 0.0;
  std::size_t n_paths = 0;
  std::size_t n_passed = 0;
  /// False when every path was censored; mean and stderr are then meaningless.
  bool valid = false;
};

/// Synchronization band used for first-passage times: every particle within
/// `delta` of the mean field for `dwell` time units.
struct PassageCriterion {
  double delta = 0.05;
  double dwell = 1.0;
};

/// Default band 0.05 * max(1, A1), dwell 1.
PassageCriterion default_passage(const SystemParams& p);

/// A realization failed; carries the path index and the solver step.
class PathFailure : public std::runtime_error {
 public:
  PathFailure(std::size_t path, std::size_t step, const std::string& what)
      : std::runtime_error("path " + std::to_string(path) + ": " + what), path_(path), step_(step) {}

  std::size_t path() const noexcept { return path_; }
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t path_;
  std::size_t step_;
};

/// Paths are grouped in fixed blocks and reduced in path order, so results
/// are bit-identical for every worker count.
EnsembleStats run_ensemble(const SystemParams& p, const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed,
                           const InitSpec& init = InitSpec::standard_normal(), const EnsembleOptions& options = {});

DeviationProfile deviation_profile(const SystemParams& p, const TimeGrid& grid, std::size_t n_paths,
                                   std::uint64_t seed, const InitSpec& init = InitSpec::standard_normal(),
                                   const EnsembleOptions& options = {});

/// Earliest index k with spread(j) <= delta for all j in [k, k + dwell_steps];
/// empty when no such window fits inside the series.
std::optional<std::size_t> first_passage_index(const Eigen::Ref<const Eigen::VectorXd>& spread, double delta,
                                               std::size_t dwell_steps);

/// max_i |x_i(t) - S(t)| for every grid time.
Eigen::VectorXd synchronization_spread(const Trajectory<double>& particles);

MFPTEstimate estimate_mfpt(const SystemParams& p, const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed,
                           const PassageCriterion& passage, const InitSpec& init = InitSpec::standard_normal(),
                           const EnsembleOptions& options = {});

/// Seeds of path i: noise from derive_seed(seed, 2i), initial state from derive_seed(seed, 2i + 1).
std::uint64_t path_noise_seed(std::uint64_t seed, std::size_t path);
std::uint64_t path_init_seed(std::uint64_t seed, std::size_t path);

}  // namespace fracstar
