#include "fracstar/telegraph.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace fracstar {

void TelegraphParams::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("noise amplitude sigma must be positive");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("noise correlation rate lambda must be non-negative");
  }
}

NoisePath NoisePath::silent(const TimeGrid& grid) {
  return NoisePath{grid, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size()))};
}

NoisePath sample_path(const TelegraphParams& params, const TimeGrid& grid, std::uint64_t seed) {
  params.validate();
  std::mt19937_64 rng(seed);
  double sign = std::bernoulli_distribution(0.5)(rng) ? 1.0 : -1.0;

  NoisePath path{grid, Eigen::VectorXd(static_cast<Eigen::Index>(grid.size()))};
  if (params.lambda == 0.0) {
    path.values.setConstant(sign * params.sigma);
    return path;
  }

  std::exponential_distribution<double> wait(params.flip_rate());
  double next_flip = wait(rng);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double t = grid.time(k);
    while (next_flip <= t) {
      sign = -sign;
      next_flip += wait(rng);
    }
    path.values(static_cast<Eigen::Index>(k)) = sign * params.sigma;
  }
  return path;
}

namespace {

std::vector<std::size_t> lag_steps(const TimeGrid& grid, std::span<const double> lags) {
  std::vector<std::size_t> steps;
  steps.reserve(lags.size());
  for (double lag : lags) {
    if (!(lag >= 0.0) || lag > grid.horizon() + 1e-9 * grid.dt()) {
      throw std::domain_error("autocorrelation lag outside [0, horizon]");
    }
    const double ratio = lag / grid.dt();
    if (std::fabs(ratio - std::round(ratio)) > 1e-6) {
      throw std::domain_error("autocorrelation lag is not a multiple of the time step");
    }
    steps.push_back(grid.steps_for(lag));
  }
  return steps;
}

}  // namespace

std::vector<double> empirical_acf(const NoisePath& path, std::span<const double> lags) {
  return empirical_acf(std::span<const NoisePath>(&path, 1), lags);
}

std::vector<double> empirical_acf(std::span<const NoisePath> ensemble, std::span<const double> lags) {
  if (ensemble.empty()) throw std::invalid_argument("autocorrelation of an empty ensemble");
  const TimeGrid& grid = ensemble.front().grid;
  for (const auto& path : ensemble) {
    if (!(path.grid == grid)) throw std::invalid_argument("ensemble paths must share one grid");
  }
  const auto steps = lag_steps(grid, lags);
  const auto n = static_cast<Eigen::Index>(grid.size());

  std::vector<double> acf;
  acf.reserve(steps.size());
  for (std::size_t s : steps) {
    const auto lag = static_cast<Eigen::Index>(s);
    const Eigen::Index pairs = n - lag;
    double total = 0.0;
    for (const auto& path : ensemble) {
      total += path.values.head(pairs).dot(path.values.tail(pairs));
    }
    acf.push_back(total / (static_cast<double>(pairs) * static_cast<double>(ensemble.size())));
  }
  return acf;
}

double fit_decay_rate(std::span<const double> lags, std::span<const double> acf) {
  if (lags.size() != acf.size()) throw std::invalid_argument("lags and acf differ in length");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  double count = 0.0;
  for (std::size_t i = 0; i < lags.size(); ++i) {
    if (!(acf[i] > 0.0)) continue;
    const double y = -std::log(acf[i]);
    sx += lags[i];
    sy += y;
    sxx += lags[i] * lags[i];
    sxy += lags[i] * y;
    count += 1.0;
  }
  const double denom = count * sxx - sx * sx;
  if (count < 2.0 || denom == 0.0) throw std::domain_error("decay-rate fit needs two distinct positive samples");
  return (count * sxy - sx * sy) / denom;
}

}  // namespace fracstar
