#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "fracstar/grid.hpp"

namespace fracstar {

/// Symmetric dichotomous noise switching between +sigma and -sigma with
/// autocorrelation sigma^2 exp(-lambda |tau|).
struct TelegraphParams {
  double sigma = 1.0;
  double lambda = 1.0;

  void validate() const;
  /// Rate of sign flips; a two-state chain flipping at rate mu decorrelates at 2 mu.
  double flip_rate() const noexcept { return 0.5 * lambda; }
};

/// Grid-aligned realization; values(k) is the noise at t_k.
struct NoisePath {
  TimeGrid grid;
  Eigen::VectorXd values;

  /// Noise-free path (all zeros), used when sigma = 0.
  static NoisePath silent(const TimeGrid& grid);
};

/// Samples a stationary path: the initial sign is a fair coin, flips arrive as
/// a Poisson process of rate lambda / 2 simulated by exponential waiting
/// times, and the sign is sampled-and-held at each grid point. Deterministic
/// in (params, grid, seed).
NoisePath sample_path(const TelegraphParams& params, const TimeGrid& grid, std::uint64_t seed);

/// Sample autocorrelation <xi(t) xi(t + lag)> averaged over every available
/// pair at each lag (no mean subtraction; the process mean is zero by
/// construction). Lags are time offsets and must land on the grid.
std::vector<double> empirical_acf(const NoisePath& path, std::span<const double> lags);

/// Ensemble version: pairs from every path are pooled. All paths must share one grid.
std::vector<double> empirical_acf(std::span<const NoisePath> ensemble, std::span<const double> lags);

/// Least-squares slope of -log(acf) against lag, i.e. the fitted decay rate.
/// Non-positive acf values are skipped.
double fit_decay_rate(std::span<const double> lags, std::span<const double> acf);

}  // namespace fracstar
