#include "fracstar/analytics.hpp"

#include <cmath>
#include <numbers>

#include "fracstar/fractional_solver.hpp"

namespace fracstar {

namespace {

std::complex<double> principal_pow(std::complex<double> s, double alpha) {
  if (s == std::complex<double>(0.0, 0.0)) return {0.0, 0.0};
  return std::polar(std::pow(std::abs(s), alpha), alpha * std::arg(s));
}

double sync_bound(double rate, double lambda_alpha) { return rate * rate + lambda_alpha * rate; }

}  // namespace

GainBreakdown gain(const SystemParams& p) {
  p.validate();
  const double a = p.alpha;
  const double w = p.omega;
  const double half_pi = 0.5 * std::numbers::pi;

  GainBreakdown g;
  g.r = std::hypot(p.Omega, p.lambda);
  g.theta = std::atan2(p.Omega, p.lambda);
  const double r_a = std::pow(g.r, a);
  const double omega_a = std::pow(p.Omega, a);

  g.f1 = w + r_a * std::cos(a * g.theta);
  g.f2 = r_a * std::sin(a * g.theta);
  g.f3 = r_a * omega_a * std::cos(a * g.theta + a * half_pi) + w * omega_a * std::cos(a * half_pi) + w * g.f1 - p.sigma2;
  g.f4 = r_a * omega_a * std::sin(a * g.theta + a * half_pi) + w * omega_a * std::sin(a * half_pi) + w * g.f2;

  const double scale = 1.0 + std::fabs(w * g.f1) + p.sigma2 + r_a * omega_a + w * omega_a;
  if (std::hypot(g.f3, g.f4) <= 1e-14 * scale) {
    throw SingularGainError("mean-field response is singular: f3 = f4 = 0");
  }

  g.G = std::sqrt((g.f1 * g.f1 + g.f2 * g.f2) / (g.f3 * g.f3 + g.f4 * g.f4));
  g.A1 = p.A0 * g.G;
  g.phi = std::atan2(g.f2 * g.f3 - g.f1 * g.f4, g.f1 * g.f3 + g.f2 * g.f4);
  if (g.phi == -std::numbers::pi) g.phi = std::numbers::pi;
  return g;
}

double stationarity_bound(const SystemParams& p) {
  return p.omega * p.omega + p.omega * std::pow(p.lambda, p.alpha);
}

StabilityReport stability(const SystemParams& p) {
  p.validate();
  const double lambda_alpha = std::pow(p.lambda, p.alpha);
  StabilityReport s;
  s.stationary_margin = stationarity_bound(p) - p.sigma2;
  s.stationary = s.stationary_margin > 0.0;

  const double main_rate = p.omega + p.epsilon * (p.N + 1);
  s.sync_main_margin = sync_bound(main_rate, lambda_alpha) - p.sigma2;
  s.sync_main = s.sync_main_margin > 0.0;

  s.sigma_s_sq = sync_bound(p.omega + p.epsilon, lambda_alpha);
  s.sync_global_margin = s.sigma_s_sq - p.sigma2;
  s.sync_global = s.sync_global_margin > 0.0;
  return s;
}

SRReport sr_criterion(const SystemParams& p) {
  SystemParams quiet = p;
  quiet.sigma2 = 0.0;
  quiet.validate();
  const double a = p.alpha;
  const double half_pi = 0.5 * std::numbers::pi;
  const double r = std::hypot(p.Omega, p.lambda);
  const double theta = std::atan2(p.Omega, p.lambda);
  const double r_a = std::pow(r, a);
  const double omega_a = std::pow(p.Omega, a);
  const double f1 = p.omega + r_a * std::cos(a * theta);

  SRReport report;
  report.sigma_star_sq =
      r_a * omega_a * std::cos(a * theta + a * half_pi) + p.omega * omega_a * std::cos(a * half_pi) + p.omega * f1;
  report.stability_bound = stationarity_bound(p);
  report.sr_occurs = report.sigma_star_sq > 0.0 && report.sigma_star_sq < report.stability_bound;
  return report;
}

std::complex<double> char_eval(std::complex<double> s, const SystemParams& p) {
  p.validate();
  const auto first = principal_pow(s, p.alpha) + p.omega;
  const auto second = principal_pow(s + p.lambda, p.alpha) + p.omega;
  return first * second - p.sigma2;
}

MomentTrajectories moment_oracle(const SystemParams& p, const TimeGrid& grid, double y1_0, double y2_0) {
  p.validate();
  if (!(p.lambda * grid.horizon() < 700.0)) {
    throw std::domain_error("moment oracle: lambda * horizon must stay below 700; shorten the horizon");
  }
  const double w = p.omega;
  const double lambda = p.lambda;
  const double s2 = p.sigma2;
  auto rhs = [&](double t, const Eigen::VectorXd& y) {
    const double grow = std::exp(lambda * t);
    Eigen::VectorXd out(2);
    out(0) = -w * y(0) - y(1) / grow + p.forcing(t);
    out(1) = -w * y(1) - s2 * y(0) * grow;
    return out;
  };
  const Eigen::Vector2d start(y1_0, y2_0);
  const auto solution = abm_integrate(p.order(), grid, start, rhs);

  MomentTrajectories m{grid, solution.values.col(0), solution.values.col(1)};
  for (Eigen::Index k = 0; k < m.noise_corr.size(); ++k) {
    m.noise_corr(k) *= std::exp(-lambda * grid.time(static_cast<std::size_t>(k)));
  }
  return m;
}

}  // namespace fracstar
