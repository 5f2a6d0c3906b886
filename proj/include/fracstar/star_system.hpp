#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>

#include <Eigen/Core>

#include "fracstar/fractional_solver.hpp"
#include "fracstar/grid.hpp"
#include "fracstar/telegraph.hpp"

namespace fracstar {

/// Parameters of N + 1 star-coupled fractional oscillators with a fluctuating
/// restoring rate omega + xi_t and common forcing A0 sin(Omega t).
///
/// The noise intensity is held as sigma2 = sigma^2 so that closed-form
/// criteria see exactly the value a user supplied.
struct SystemParams {
  double alpha = 0.9;
  double omega = 1.0;
  double epsilon = 1.0;
  int N = 10;
  double A0 = 1.0;
  double Omega = 3.141592653589793;
  double lambda = 1.0;
  double sigma2 = 0.0;

  void validate() const;

  double sigma() const noexcept { return std::sqrt(sigma2); }
  FractionalOrder order() const { return FractionalOrder(alpha); }
  TelegraphParams noise() const { return TelegraphParams{sigma(), lambda}; }
  Eigen::Index particles() const noexcept { return static_cast<Eigen::Index>(N) + 1; }
  double forcing(double t) const noexcept { return A0 * std::sin(Omega * t); }
};

/// Right-hand side of the star system for one shared noise value xi.
/// Component 0 is the main particle, components 1..N the general particles.
Eigen::VectorXd drift(const Eigen::Ref<const Eigen::VectorXd>& state, double xi, double t, const SystemParams& p);

/// Same, with an individual noise value per particle.
Eigen::VectorXd drift(const Eigen::Ref<const Eigen::VectorXd>& state, const Eigen::Ref<const Eigen::VectorXd>& xi,
                      double t, const SystemParams& p);

/// Mean field S = (x_0 + ... + x_N) / (N + 1).
template <typename Derived>
typename Derived::Scalar mean_field(const Eigen::MatrixBase<Derived>& state) {
  return state.mean();
}

/// Deviations Delta_i = x_i - S, as an expression over the input.
template <typename Derived>
auto deviations(const Eigen::MatrixBase<Derived>& state) {
  return (state.array() - mean_field(state)).matrix();
}

enum class NoiseMode {
  Shared,       ///< one path drives every particle
  PerParticle,  ///< independent path per particle; exploratory only
};

struct PathOptions {
  NoiseMode noise = NoiseMode::Shared;
  AbmOptions solver;
};

struct PathResult {
  Trajectory<double> particles;
  Eigen::VectorXd mean_field;
  /// One column per distinct noise path (a single column in shared mode).
  Eigen::MatrixXd noise;
};

/// One realization: samples the noise, then integrates the (N+1)-dimensional
/// random ODE with ABM. The noise is piecewise constant, and every drift
/// evaluation at t_k uses the grid value xi(t_k). `weights` must cover the grid
/// and have the system's alpha.
PathResult simulate_path(const SystemParams& p, const TimeGrid& grid, const Eigen::VectorXd& init, std::uint64_t seed,
                         const AbmWeights<double>& weights, const PathOptions& options = {});

PathResult simulate_path(const SystemParams& p, const TimeGrid& grid, const Eigen::VectorXd& init, std::uint64_t seed,
                         const PathOptions& options = {});

/// Receives (k, x(t_k)) for each step; returning false ends the realization.
using PathObserver = std::function<bool(std::size_t, const Eigen::VectorXd&)>;

/// Same realization as simulate_path with the same seed, streamed step by step
/// without storing the trajectory. Returns the index of the last computed step.
std::size_t stream_path(const SystemParams& p, const TimeGrid& grid, const Eigen::VectorXd& init, std::uint64_t seed,
                        const AbmWeights<double>& weights, const PathOptions& options, const PathObserver& observe);

}  // namespace fracstar
