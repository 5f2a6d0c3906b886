#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace fracstar {

/// Order of a Caputo derivative, restricted to (0, 1].
class FractionalOrder {
 public:
  explicit FractionalOrder(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
      throw std::invalid_argument("alpha must lie in (0, 1], got " + std::to_string(alpha));
    }
  }

  double value() const noexcept { return alpha_; }

 private:
  double alpha_;
};

/// Uniform grid t_k = k * dt, k = 0..n_steps, starting at t0 = 0.
class TimeGrid {
 public:
  TimeGrid(double dt, std::size_t n_steps) : dt_(dt), n_steps_(n_steps) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
      throw std::invalid_argument("time step must be positive and finite");
    }
    if (n_steps == 0) {
      throw std::invalid_argument("time grid needs at least one step");
    }
  }

  /// Grid covering [0, t_end]; t_end is rounded to the nearest multiple of dt.
  static TimeGrid covering(double dt, double t_end) {
    if (!(dt > 0.0) || !(t_end > 0.0)) {
      throw std::invalid_argument("dt and t_end must be positive");
    }
    const double steps = std::round(t_end / dt);
    return TimeGrid(dt, static_cast<std::size_t>(steps < 1.0 ? 1.0 : steps));
  }

  double dt() const noexcept { return dt_; }
  std::size_t n_steps() const noexcept { return n_steps_; }
  std::size_t size() const noexcept { return n_steps_ + 1; }
  double time(std::size_t k) const noexcept { return static_cast<double>(k) * dt_; }
  double horizon() const noexcept { return time(n_steps_); }

  /// Number of whole steps spanned by a time offset (rounded to nearest).
  std::size_t steps_for(double offset) const {
    if (!(offset >= 0.0)) throw std::invalid_argument("time offset must be non-negative");
    return static_cast<std::size_t>(std::llround(offset / dt_));
  }

  /// First index of the trailing window covering `fraction` of the horizon.
  std::size_t window_start(double fraction) const {
    if (!(fraction > 0.0 && fraction <= 1.0)) {
      throw std::invalid_argument("window fraction must lie in (0, 1]");
    }
    const auto first = static_cast<std::size_t>(std::ceil((1.0 - fraction) * static_cast<double>(n_steps_) - 1e-9));
    return first > n_steps_ ? n_steps_ : first;
  }

  Eigen::VectorXd times() const {
    const double dt = dt_;
    return Eigen::VectorXd::NullaryExpr(static_cast<Eigen::Index>(size()),
                                        [dt](Eigen::Index k) { return static_cast<double>(k) * dt; });
  }

  bool operator==(const TimeGrid&) const = default;

 private:
  double dt_;
  std::size_t n_steps_;
};

/// Solution samples on a grid; row k holds the state at t_k.
template <typename Scalar = double>
struct Trajectory {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  TimeGrid grid;
  Matrix values;

  Eigen::Index dim() const noexcept { return values.cols(); }
  auto state(std::size_t k) const { return values.row(static_cast<Eigen::Index>(k)).transpose(); }
  auto component(Eigen::Index i) const { return values.col(i); }
};

/// Raised when a drift evaluation produces a non-finite value.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(std::size_t step, const std::string& what)
      : std::runtime_error(what + " at step " + std::to_string(step)), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace fracstar
