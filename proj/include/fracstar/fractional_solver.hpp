#pragma once

// Caputo initial-value problems D^alpha x = f(t, x), 0 < alpha <= 1, on a
// uniform grid. abm_integrate is the product-integration Adams-Bashforth-
// Moulton predictor-corrector with a single corrector pass; gl_integrate is an
// implicit Grunwald-Letnikov scheme kept as an independent cross-check.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <type_traits>
#include <utility>

#include <Eigen/Core>

#include "fracstar/grid.hpp"

namespace fracstar {

template <typename Scalar>
using StateVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// ABM convolution weights for one (alpha, n_steps) pair.
///
/// Predictor weights b_k = (k+1)^a - k^a and corrector weights
/// c_k = (k+2)^(a+1) + k^(a+1) - 2 (k+1)^(a+1) depend only on the lag
/// k = n - j, so they are stored once in reversed order and every step reads a
/// contiguous block. The j = 0 corrector weight differs and is applied as a
/// separate rank-one correction. Immutable after construction.
template <typename Scalar = double>
class AbmWeights {
 public:
  using Table = Eigen::Matrix<Scalar, Eigen::Dynamic, 2>;

  AbmWeights(FractionalOrder order, std::size_t n_steps)
      : alpha_(static_cast<Scalar>(order.value())),
        n_steps_(n_steps),
        reversed_(static_cast<Eigen::Index>(n_steps), 2),
        start_(static_cast<Eigen::Index>(n_steps)) {
    if (n_steps == 0) throw std::invalid_argument("weight table needs at least one step");
    using std::expm1;
    using std::log1p;
    using std::pow;
    const Scalar a = alpha_;
    const Scalar b = a + Scalar(1);
    const auto last = static_cast<Eigen::Index>(n_steps) - 1;
    for (Eigen::Index k = 0; k <= last; ++k) {
      Scalar pred;
      Scalar corr;
      Scalar first;
      if (k == 0) {
        pred = Scalar(1);
        corr = pow(Scalar(2), b) - Scalar(2);
        first = a;
      } else {
        // Written around k^a so the second difference keeps its precision for large k.
        const auto kk = static_cast<Scalar>(k);
        const Scalar inv = Scalar(1) / kk;
        pred = pow(kk, a) * expm1(a * log1p(inv));
        corr = pow(kk, b) * (expm1(b * log1p(Scalar(2) * inv)) - Scalar(2) * expm1(b * log1p(inv)));
        first = pow(kk + Scalar(1), a) * (kk * expm1(-a * log1p(inv)) + a);
      }
      reversed_(last - k, 0) = pred;
      reversed_(last - k, 1) = corr;
      start_(k) = first - corr;
    }
  }

  Scalar alpha() const noexcept { return alpha_; }
  std::size_t n_steps() const noexcept { return n_steps_; }

  /// Weights for history rows j = first..k when advancing from t_k to t_{k+1}.
  auto block(std::size_t k, std::size_t first) const {
    const auto offset = static_cast<Eigen::Index>(n_steps_ - 1 - k + first);
    return reversed_.middleRows(offset, static_cast<Eigen::Index>(k + 1 - first));
  }

  /// a_{0,k+1} - c_k: the extra corrector weight carried by f_0.
  Scalar start_correction(std::size_t k) const { return start_(static_cast<Eigen::Index>(k)); }

 private:
  Scalar alpha_;
  std::size_t n_steps_;
  Table reversed_;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> start_;
};

struct AbmOptions {
  /// Number of most recent history samples kept in the convolution; 0 keeps
  /// the full history.
  std::size_t memory_window = 0;
};

namespace detail {

template <typename Scalar, typename Drift>
StateVector<Scalar> evaluate_drift(Drift& drift, std::size_t step, Scalar t, const StateVector<Scalar>& x) {
  StateVector<Scalar> fx = drift(t, x);
  if (fx.size() != x.size()) {
    throw std::invalid_argument("drift returned a vector of the wrong dimension");
  }
  if (!fx.allFinite()) throw IntegrationError(step, "non-finite drift value");
  return fx;
}

}  // namespace detail

/// Streaming form of abm_integrate: `observe(k, x_k)` sees every state as soon
/// as it is computed and returns false to stop early. Returns the index of the
/// last computed step. Only the drift history is stored.
template <typename Scalar, typename Drift, typename Observer>
std::size_t abm_stream(const AbmWeights<Scalar>& weights, const TimeGrid& grid,
                       const std::type_identity_t<StateVector<Scalar>>& x0, Drift&& drift, Observer&& observe,
                       const AbmOptions& options = {}) {
  using std::pow;
  using std::tgamma;
  const std::size_t n = grid.n_steps();
  if (weights.n_steps() < n) throw std::invalid_argument("weight table shorter than the time grid");

  const Scalar alpha = weights.alpha();
  const Scalar h_alpha = pow(static_cast<Scalar>(grid.dt()), alpha);
  const Scalar pred_scale = h_alpha / tgamma(alpha + Scalar(1));
  const Scalar corr_scale = h_alpha / tgamma(alpha + Scalar(2));
  const Eigen::Index dim = x0.size();
  if (dim == 0) throw std::invalid_argument("initial state is empty");

  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> history(static_cast<Eigen::Index>(n + 1), dim);
  history.row(0) = detail::evaluate_drift(drift, 0, Scalar(0), x0).transpose();
  if (!observe(std::size_t{0}, x0)) return 0;

  Eigen::Matrix<Scalar, 2, Eigen::Dynamic> sums(2, dim);
  StateVector<Scalar> next(dim);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t first =
        (options.memory_window > 0 && k + 1 > options.memory_window) ? k + 1 - options.memory_window : 0;
    const auto rows = static_cast<Eigen::Index>(k + 1 - first);
    sums.noalias() =
        weights.block(k, first).transpose() * history.middleRows(static_cast<Eigen::Index>(first), rows);
    if (first == 0) sums.row(1) += weights.start_correction(k) * history.row(0);

    const auto t_next = static_cast<Scalar>(grid.time(k + 1));
    const StateVector<Scalar> predicted = x0 + pred_scale * sums.row(0).transpose();
    const StateVector<Scalar> f_pred = detail::evaluate_drift(drift, k + 1, t_next, predicted);
    next = x0 + corr_scale * (f_pred + sums.row(1).transpose());

    history.row(static_cast<Eigen::Index>(k + 1)) = detail::evaluate_drift(drift, k + 1, t_next, next).transpose();
    if (!observe(k + 1, static_cast<const StateVector<Scalar>&>(next))) return k + 1;
  }
  return n;
}

/// Integrates the Caputo IVP with precomputed weights; the weight table may be
/// longer than the grid and is shared read-only between concurrent calls.
template <typename Scalar, typename Drift>
Trajectory<Scalar> abm_integrate(const AbmWeights<Scalar>& weights, const TimeGrid& grid,
                                 const std::type_identity_t<StateVector<Scalar>>& x0, Drift&& drift,
                                 const AbmOptions& options = {}) {
  Trajectory<Scalar> out{grid, typename Trajectory<Scalar>::Matrix(static_cast<Eigen::Index>(grid.size()), x0.size())};
  abm_stream(
      weights, grid, x0, std::forward<Drift>(drift),
      [&out](std::size_t k, const StateVector<Scalar>& x) {
        out.values.row(static_cast<Eigen::Index>(k)) = x.transpose();
        return true;
      },
      options);
  return out;
}

template <typename Scalar = double, typename Drift>
Trajectory<Scalar> abm_integrate(FractionalOrder order, const TimeGrid& grid,
                                 const std::type_identity_t<StateVector<Scalar>>& x0, Drift&& drift,
                                 const AbmOptions& options = {}) {
  const AbmWeights<Scalar> weights(order, grid.n_steps());
  return abm_integrate(weights, grid, x0, std::forward<Drift>(drift), options);
}

struct GlOptions {
  int max_iterations = 200;
  double tolerance = 1e-14;
};

/// Implicit Grunwald-Letnikov scheme applied to x - x0 (the Caputo form),
/// solved per step by fixed-point iteration. First order in dt.
template <typename Scalar = double, typename Drift>
Trajectory<Scalar> gl_integrate(FractionalOrder order, const TimeGrid& grid,
                                const std::type_identity_t<StateVector<Scalar>>& x0, Drift&& drift,
                                const GlOptions& options = {}) {
  using std::abs;
  using std::pow;
  const std::size_t n = grid.n_steps();
  const auto alpha = static_cast<Scalar>(order.value());
  const Scalar h_alpha = pow(static_cast<Scalar>(grid.dt()), alpha);
  const Eigen::Index dim = x0.size();
  if (dim == 0) throw std::invalid_argument("initial state is empty");

  // reversed(n - j) = g_j, g_j = (-1)^j binom(alpha, j)
  StateVector<Scalar> reversed(static_cast<Eigen::Index>(n + 1));
  Scalar g = Scalar(1);
  reversed(static_cast<Eigen::Index>(n)) = g;
  for (std::size_t j = 1; j <= n; ++j) {
    g *= Scalar(1) - (alpha + Scalar(1)) / static_cast<Scalar>(j);
    reversed(static_cast<Eigen::Index>(n - j)) = g;
  }

  Trajectory<Scalar> out{grid, typename Trajectory<Scalar>::Matrix(static_cast<Eigen::Index>(n + 1), dim)};
  typename Trajectory<Scalar>::Matrix shifted(static_cast<Eigen::Index>(n + 1), dim);
  out.values.row(0) = x0.transpose();
  shifted.row(0).setZero();
  detail::evaluate_drift(drift, 0, Scalar(0), x0);

  Eigen::Matrix<Scalar, 1, Eigen::Dynamic> memory(dim);
  for (std::size_t k = 1; k <= n; ++k) {
    const auto count = static_cast<Eigen::Index>(k);
    memory.noalias() = reversed.segment(static_cast<Eigen::Index>(n - k), count).transpose() * shifted.topRows(count);
    const auto t = static_cast<Scalar>(grid.time(k));

    StateVector<Scalar> x = out.values.row(count - 1).transpose();
    bool converged = false;
    for (int it = 0; it < options.max_iterations; ++it) {
      const StateVector<Scalar> fx = detail::evaluate_drift(drift, k, t, x);
      StateVector<Scalar> updated = x0 + h_alpha * fx - memory.transpose();
      const Scalar change = (updated - x).cwiseAbs().maxCoeff();
      const Scalar scale = Scalar(1) + updated.cwiseAbs().maxCoeff();
      x = std::move(updated);
      if (change <= static_cast<Scalar>(options.tolerance) * scale) {
        converged = true;
        break;
      }
    }
    if (!converged) throw IntegrationError(k, "fixed-point iteration did not converge");
    out.values.row(count) = x.transpose();
    shifted.row(count) = (x - x0).transpose();
  }
  return out;
}

}  // namespace fracstar
