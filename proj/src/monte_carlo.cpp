#include "fracstar/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "fracstar/analytics.hpp"
#include "fracstar/parallel.hpp"

namespace fracstar {

namespace {

constexpr std::size_t kBlockSize = 16;

/// Running mean and sum of squared deviations (Welford), merged across
/// blocks with Chan's pairwise update so that the result depends only on the
/// fixed block order.
struct Moments {
  std::size_t count = 0;
  Eigen::MatrixXd mean;
  Eigen::MatrixXd m2;

  Moments() = default;
  Moments(Eigen::Index rows, Eigen::Index cols) : mean(Eigen::MatrixXd::Zero(rows, cols)), m2(mean) {}

  void add(const Eigen::MatrixXd& x) {
    ++count;
    const Eigen::MatrixXd delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2.array() += delta.array() * (x - mean).array();
  }

  void merge(const Moments& other) {
    if (other.count == 0) return;
    const double n = static_cast<double>(count);
    const double m = static_cast<double>(other.count);
    const Eigen::MatrixXd delta = other.mean - mean;
    mean += delta * (m / (n + m));
    m2 += other.m2 + delta.cwiseAbs2() * (n * m / (n + m));
    count += other.count;
  }

  Eigen::MatrixXd standard_error() const {
    if (count < 2) return Eigen::MatrixXd::Zero(mean.rows(), mean.cols());
    const double n = static_cast<double>(count);
    return (m2.array().max(0.0) / ((n - 1.0) * n)).sqrt().matrix();
  }
};

struct BlockSums {
  Moments S;
  Eigen::VectorXd absdev;
  Moments dev;
};

void check_request(const SystemParams& p, std::size_t n_paths) {
  p.validate();
  if (n_paths == 0) throw std::invalid_argument("n_paths must be at least 1");
}

PathResult run_path(const SystemParams& p, const TimeGrid& grid, std::uint64_t seed, std::size_t path,
                    const InitSpec& init, const AbmWeights<double>& weights, const PathOptions& options) {
  const Eigen::VectorXd x0 = init.draw(p.particles(), path_init_seed(seed, path));
  try {
    return simulate_path(p, grid, x0, path_noise_seed(seed, path), weights, options);
  } catch (const IntegrationError& e) {
    throw PathFailure(path, e.step(), e.what());
  }
}

std::vector<BlockSums> simulate_blocks(const SystemParams& p, const TimeGrid& grid, std::size_t n_paths,
                                       std::uint64_t seed, const InitSpec& init, const EnsembleOptions& options,
                                       bool with_deviations) {
  const AbmWeights<double> weights(p.order(), grid.n_steps());
  const auto rows = static_cast<Eigen::Index>(grid.size());
  const std::size_t blocks = (n_paths + kBlockSize - 1) / kBlockSize;

  return parallel_map<BlockSums>(blocks, options.workers, [&](std::size_t b) {
    BlockSums sums{Moments(rows, 1), Eigen::VectorXd::Zero(rows), {}};
    if (with_deviations) sums.dev = Moments(rows, p.particles());
    const std::size_t end = std::min(n_paths, (b + 1) * kBlockSize);
    for (std::size_t i = b * kBlockSize; i < end; ++i) {
      const PathResult r = run_path(p, grid, seed, i, init, weights, options.path);
      const Eigen::MatrixXd dev = r.particles.values.colwise() - r.mean_field;
      sums.S.add(r.mean_field);
      sums.absdev += dev.cwiseAbs().rowwise().maxCoeff();
      if (with_deviations) sums.dev.add(dev);
    }
    return sums;
  });
}

BlockSums reduce(const std::vector<BlockSums>& blocks) {
  BlockSums total = blocks.front();
  for (std::size_t b = 1; b < blocks.size(); ++b) {
    total.S.merge(blocks[b].S);
    total.absdev += blocks[b].absdev;
    total.dev.merge(blocks[b].dev);
  }
  return total;
}

}  // namespace

Eigen::VectorXd InitSpec::draw(Eigen::Index dim, std::uint64_t seed) const {
  if (kind == Kind::Constant) return Eigen::VectorXd::Constant(dim, value);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd x(dim);
  for (Eigen::Index i = 0; i < dim; ++i) x(i) = normal(rng);
  return x;
}

std::uint64_t path_noise_seed(std::uint64_t seed, std::size_t path) { return derive_seed(seed, 2 * path); }
std::uint64_t path_init_seed(std::uint64_t seed, std::size_t path) { return derive_seed(seed, 2 * path + 1); }

SinusoidFit fit_sinusoid(const Eigen::Ref<const Eigen::VectorXd>& t, const Eigen::Ref<const Eigen::VectorXd>& y,
                         double Omega) {
  if (t.size() != y.size() || t.size() < 2) throw std::invalid_argument("sinusoid fit needs matching samples");
  Eigen::MatrixXd design(t.size(), 2);
  design.col(0) = (Omega * t.array()).sin().matrix();
  design.col(1) = (Omega * t.array()).cos().matrix();
  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(y);

  SinusoidFit fit;
  fit.sin_coef = coef(0);
  fit.cos_coef = coef(1);
  fit.amplitude = std::hypot(coef(0), coef(1));
  fit.phase = std::atan2(coef(1), coef(0));
  fit.residual = std::sqrt((design * coef - y).squaredNorm() / static_cast<double>(t.size()));
  return fit;
}

EnsembleStats run_ensemble(const SystemParams& p, const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed,
                           const InitSpec& init, const EnsembleOptions& options) {
  check_request(p, n_paths);
  const BlockSums total = reduce(simulate_blocks(p, grid, n_paths, seed, init, options, false));
  const double count = static_cast<double>(n_paths);

  EnsembleStats stats{.grid = grid,
                      .mean_S = total.S.mean.col(0),
                      .stderr_S = total.S.standard_error().col(0),
                      .mean_absdev = total.absdev / count,
                      .A_est = 0.0,
                      .phi_est = 0.0,
                      .G_est = std::nullopt,
                      .fit_residual = 0.0,
                      .n_paths = n_paths,
                      .seed = seed};

  const std::size_t first = grid.window_start(options.fit_fraction);
  const auto len = static_cast<Eigen::Index>(grid.size() - first);
  const Eigen::VectorXd times = grid.times();
  const SinusoidFit fit = fit_sinusoid(times.tail(len), stats.mean_S.tail(len), p.Omega);
  stats.A_est = fit.amplitude;
  stats.phi_est = fit.phase;
  stats.fit_residual = fit.residual;
  if (p.A0 > 0.0) stats.G_est = fit.amplitude / p.A0;
  return stats;
}

DeviationProfile deviation_profile(const SystemParams& p, const TimeGrid& grid, std::size_t n_paths,
                                   std::uint64_t seed, const InitSpec& init, const EnsembleOptions& options) {
  check_request(p, n_paths);
  const BlockSums total = reduce(simulate_blocks(p, grid, n_paths, seed, init, options, true));
  return DeviationProfile{grid, total.dev.mean, total.dev.standard_error(), n_paths};
}

std::optional<std::size_t> first_passage_index(const Eigen::Ref<const Eigen::VectorXd>& spread, double delta,
                                               std::size_t dwell_steps) {
  const auto n = static_cast<std::size_t>(spread.size());
  std::optional<std::size_t> found;
  std::size_t run = 0;  // consecutive in-band samples starting at k
  for (std::size_t k = n; k-- > 0;) {
    run = spread(static_cast<Eigen::Index>(k)) <= delta ? run + 1 : 0;
    if (run >= dwell_steps + 1) found = k;
  }
  return found;
}

Eigen::VectorXd synchronization_spread(const Trajectory<double>& particles) {
  const Eigen::VectorXd mean = particles.values.rowwise().mean();
  return (particles.values.colwise() - mean).cwiseAbs().rowwise().maxCoeff();
}

PassageCriterion default_passage(const SystemParams& p) {
  double amplitude = 1.0;
  try {
    amplitude = std::max(1.0, gain(p).A1);
  } catch (const SingularGainError&) {
  }
  return PassageCriterion{0.05 * amplitude, 1.0};
}

MFPTEstimate estimate_mfpt(const SystemParams& p, const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed,
                           const PassageCriterion& passage, const InitSpec& init, const EnsembleOptions& options) {
  check_request(p, n_paths);
  if (!(passage.delta > 0.0)) throw std::invalid_argument("passage band delta must be positive");
  if (!(passage.dwell >= 0.0)) throw std::invalid_argument("dwell time must be non-negative");

  const AbmWeights<double> weights(p.order(), grid.n_steps());
  const std::size_t dwell_steps = grid.steps_for(passage.dwell);
  // Each realization stops as soon as its passage is confirmed. The forward
  // run-length test finds the same index as first_passage_index on the full series.
  const auto times = parallel_map<std::optional<double>>(n_paths, options.workers, [&](std::size_t i) {
    std::size_t run_start = 0;
    std::size_t run = 0;
    std::optional<double> passed;
    const auto observe = [&](std::size_t k, const Eigen::VectorXd& x) {
      const double spread = (x.array() - x.mean()).abs().maxCoeff();
      if (spread <= passage.delta) {
        if (run++ == 0) run_start = k;
      } else {
        run = 0;
      }
      if (run >= dwell_steps + 1) {
        passed = grid.time(run_start);
        return false;
      }
      return true;
    };
    const Eigen::VectorXd x0 = init.draw(p.particles(), path_init_seed(seed, i));
    try {
      stream_path(p, grid, x0, path_noise_seed(seed, i), weights, options.path, observe);
    } catch (const IntegrationError& e) {
      throw PathFailure(i, e.step(), e.what());
    }
    return passed;
  });

  MFPTEstimate est;
  est.n_paths = n_paths;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (const auto& t : times) {
    if (!t) continue;
    ++est.n_passed;
    sum += *t;
    sum_sq += *t * *t;
  }
  est.censored_fraction = static_cast<double>(n_paths - est.n_passed) / static_cast<double>(n_paths);
  est.valid = est.n_passed > 0;
  if (est.valid) {
    const double m = static_cast<double>(est.n_passed);
    est.mean = sum / m;
    est.stderr = est.n_passed > 1 ? std::sqrt(std::max(0.0, (sum_sq - m * est.mean * est.mean) / (m - 1.0)) / m) : 0.0;
  }
  return est;
}

}  // namespace fracstar
