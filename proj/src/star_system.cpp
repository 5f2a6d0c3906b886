#include "fracstar/star_system.hpp"

#include <stdexcept>
#include <string>

#include "fracstar/parallel.hpp"

namespace fracstar {

void SystemParams::validate() const {
  auto finite = [](double v, const char* name) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be finite");
  };
  finite(alpha, "alpha");
  finite(omega, "omega");
  finite(epsilon, "epsilon");
  finite(A0, "A0");
  finite(Omega, "Omega");
  finite(lambda, "lambda");
  finite(sigma2, "sigma2");
  (void)order();
  if (omega < 0.0) throw std::invalid_argument("omega must be non-negative");
  if (N < 1) throw std::invalid_argument("N must be at least 1");
  if (A0 < 0.0) throw std::invalid_argument("A0 must be non-negative");
  if (Omega < 0.0) throw std::invalid_argument("Omega must be non-negative");
  if (lambda < 0.0) throw std::invalid_argument("lambda must be non-negative");
  if (sigma2 < 0.0) throw std::invalid_argument("sigma2 must be non-negative");
}

Eigen::VectorXd drift(const Eigen::Ref<const Eigen::VectorXd>& state, double xi, double t, const SystemParams& p) {
  if (state.size() != p.particles()) throw std::invalid_argument("state dimension must be N + 1");
  const double force = p.forcing(t);
  const double hub = state(0);
  Eigen::VectorXd out = (-(p.omega + xi) * state.array() + force).matrix();
  out(0) += p.epsilon * (state.tail(p.N).sum() - p.N * hub);
  out.tail(p.N).array() += p.epsilon * (hub - state.tail(p.N).array());
  return out;
}

Eigen::VectorXd drift(const Eigen::Ref<const Eigen::VectorXd>& state, const Eigen::Ref<const Eigen::VectorXd>& xi,
                      double t, const SystemParams& p) {
  if (state.size() != p.particles() || xi.size() != p.particles()) {
    throw std::invalid_argument("state and noise dimensions must be N + 1");
  }
  const double force = p.forcing(t);
  const double hub = state(0);
  Eigen::VectorXd out = (-(p.omega + xi.array()) * state.array() + force).matrix();
  out(0) += p.epsilon * (state.tail(p.N).sum() - p.N * hub);
  out.tail(p.N).array() += p.epsilon * (hub - state.tail(p.N).array());
  return out;
}

namespace {

Eigen::MatrixXd sample_noise(const SystemParams& p, const TimeGrid& grid, std::uint64_t seed, NoiseMode mode) {
  const Eigen::Index columns = mode == NoiseMode::PerParticle ? p.particles() : 1;
  Eigen::MatrixXd noise(static_cast<Eigen::Index>(grid.size()), columns);
  for (Eigen::Index c = 0; c < columns; ++c) {
    const auto stream = columns == 1 ? seed : derive_seed(seed, static_cast<std::uint64_t>(c));
    noise.col(c) = p.sigma2 > 0.0 ? sample_path(p.noise(), grid, stream).values : NoisePath::silent(grid).values;
  }
  return noise;
}

template <typename Observer>
std::size_t integrate_path(const SystemParams& p, const TimeGrid& grid, const Eigen::VectorXd& init,
                           const Eigen::MatrixXd& noise, const AbmWeights<double>& weights, const PathOptions& options,
                           Observer&& observe) {
  p.validate();
  if (init.size() != p.particles()) throw std::invalid_argument("initial state must have N + 1 entries");
  if (weights.alpha() != p.alpha) throw std::invalid_argument("weight table built for a different alpha");

  const double dt = grid.dt();
  auto index_of = [dt](double t) { return static_cast<Eigen::Index>(std::llround(t / dt)); };
  if (noise.cols() == 1) {
    return abm_stream(
        weights, grid, init, [&](double t, const Eigen::VectorXd& x) { return drift(x, noise(index_of(t), 0), t, p); },
        observe, options.solver);
  }
  return abm_stream(
      weights, grid, init,
      [&](double t, const Eigen::VectorXd& x) { return drift(x, noise.row(index_of(t)).transpose(), t, p); }, observe,
      options.solver);
}

}  // namespace

PathResult simulate_path(const SystemParams& p, const TimeGrid& grid, const Eigen::VectorXd& init, std::uint64_t seed,
                         const AbmWeights<double>& weights, const PathOptions& options) {
  p.validate();
  Eigen::MatrixXd noise = sample_noise(p, grid, seed, options.noise);
  Trajectory<double> particles{grid, Eigen::MatrixXd(static_cast<Eigen::Index>(grid.size()), p.particles())};
  integrate_path(p, grid, init, noise, weights, options, [&](std::size_t k, const Eigen::VectorXd& x) {
    particles.values.row(static_cast<Eigen::Index>(k)) = x.transpose();
    return true;
  });

  Eigen::VectorXd mean = particles.values.rowwise().mean();
  return PathResult{std::move(particles), std::move(mean), std::move(noise)};
}

std::size_t stream_path(const SystemParams& p, const TimeGrid& grid, const Eigen::VectorXd& init, std::uint64_t seed,
                        const AbmWeights<double>& weights, const PathOptions& options, const PathObserver& observe) {
  p.validate();
  const Eigen::MatrixXd noise = sample_noise(p, grid, seed, options.noise);
  return integrate_path(p, grid, init, noise, weights, options, observe);
}

PathResult simulate_path(const SystemParams& p, const TimeGrid& grid, const Eigen::VectorXd& init, std::uint64_t seed,
                         const PathOptions& options) {
  const AbmWeights<double> weights(p.order(), grid.n_steps());
  return simulate_path(p, grid, init, seed, weights, options);
}

}  // namespace fracstar
