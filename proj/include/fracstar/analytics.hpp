#pragma once

#include <complex>
#include <stdexcept>

#include <Eigen/Core>

#include "fracstar/grid.hpp"
#include "fracstar/star_system.hpp"

namespace fracstar {

/// Terms of the stationary mean-field response <S> = A1 sin(Omega t + phi).
///
/// f1 + j f2 = (j Omega + lambda)^alpha + omega and f3 + j f4 is the
/// characteristic function evaluated at s = j Omega, so G = |f1 + j f2| / |f3 + j f4|.
struct GainBreakdown {
  double f1 = 0.0;
  double f2 = 0.0;
  double f3 = 0.0;
  double f4 = 0.0;
  double r = 0.0;      ///< sqrt(Omega^2 + lambda^2)
  double theta = 0.0;  ///< atan2(Omega, lambda)
  double A1 = 0.0;
  double phi = 0.0;  ///< in (-pi, pi]
  double G = 0.0;
};

struct StabilityReport {
  bool stationary = false;
  double stationary_margin = 0.0;  ///< omega^2 + omega lambda^alpha - sigma^2
  bool sync_main = false;
  double sync_main_margin = 0.0;
  bool sync_global = false;
  double sync_global_margin = 0.0;
  double sigma_s_sq = 0.0;  ///< (omega + eps)^2 + lambda^alpha (omega + eps)
};

struct SRReport {
  double sigma_star_sq = 0.0;    ///< sigma^2 at which f3 vanishes, i.e. where G peaks in sigma^2
  double stability_bound = 0.0;  ///< omega^2 + omega lambda^alpha
  bool sr_occurs = false;
};

/// f3 = f4 = 0: the forcing frequency hits a pole of the mean-field response.
class SingularGainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

GainBreakdown gain(const SystemParams& p);

/// omega^2 + omega lambda^alpha, the largest sigma^2 with a stationary mean field.
double stationarity_bound(const SystemParams& p);

/// All criteria are strict; a parameter set on a boundary does not satisfy it.
StabilityReport stability(const SystemParams& p);

SRReport sr_criterion(const SystemParams& p);

/// (s^alpha + omega)((s + lambda)^alpha + omega) - sigma^2 with principal-branch powers.
std::complex<double> char_eval(std::complex<double> s, const SystemParams& p);

struct MomentTrajectories {
  TimeGrid grid;
  Eigen::VectorXd mean_S;      ///< y1 = <S>
  Eigen::VectorXd noise_corr;  ///< y2 = <xi S>
};

/// Integrates the closed first-moment system for (<S>, <xi S>) with ABM,
/// using z = y2 e^(lambda t) so that both equations have plain Caputo
/// derivatives. Requires lambda * horizon < 700.
MomentTrajectories moment_oracle(const SystemParams& p, const TimeGrid& grid, double y1_0, double y2_0);

}  // namespace fracstar
