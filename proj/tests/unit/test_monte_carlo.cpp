#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "fracstar/analytics.hpp"
#include "fracstar/monte_carlo.hpp"

using fracstar::EnsembleOptions;
using fracstar::InitSpec;
using fracstar::PassageCriterion;
using fracstar::SystemParams;
using fracstar::TimeGrid;
using Vec = Eigen::VectorXd;

namespace {

SystemParams small_noisy() {
  SystemParams p;
  p.N = 4;
  p.sigma2 = 1.0;
  return p;
}

}  // namespace

TEST_CASE("sinusoid fit recovers amplitude and phase") {
  const TimeGrid grid(0.01, 1000);
  const Vec t = grid.times();
  const Vec y = (1.7 * (2.0 * t.array() + 0.4).sin()).matrix();
  const auto fit = fracstar::fit_sinusoid(t, y, 2.0);
  CHECK(fit.amplitude == doctest::Approx(1.7).epsilon(1e-12));
  CHECK(fit.phase == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(fit.residual < 1e-12);
  CHECK_THROWS_AS(fracstar::fit_sinusoid(t.head(5), y.head(4), 2.0), std::invalid_argument);
}

TEST_CASE("first passage index") {
  Vec s(10);
  s << 5, 4, 0.5, 3, 0.5, 0.5, 0.5, 2, 0.5, 0.5;
  CHECK(fracstar::first_passage_index(s, 1.0, 0) == 2u);
  CHECK(fracstar::first_passage_index(s, 1.0, 2) == 4u);
  CHECK(fracstar::first_passage_index(s, 1.0, 1) == 4u);
  CHECK_FALSE(fracstar::first_passage_index(s, 1.0, 3).has_value());
  CHECK_FALSE(fracstar::first_passage_index(s, 0.1, 0).has_value());
  CHECK(fracstar::first_passage_index(s, 10.0, 9) == 0u);
}

TEST_CASE("seed derivation") {
  CHECK(fracstar::path_noise_seed(1, 0) != fracstar::path_init_seed(1, 0));
  CHECK(fracstar::path_noise_seed(1, 3) == fracstar::path_noise_seed(1, 3));
  CHECK(fracstar::path_noise_seed(1, 3) != fracstar::path_noise_seed(2, 3));
  const Vec a = InitSpec::standard_normal().draw(5, 10);
  CHECK(a == InitSpec::standard_normal().draw(5, 10));
  CHECK(InitSpec::constant(2.5).draw(3, 1) == Vec::Constant(3, 2.5));
}

TEST_CASE("unforced ensemble from rest stays at rest") {
  SystemParams p = small_noisy();
  p.A0 = 0.0;
  const auto stats = fracstar::run_ensemble(p, TimeGrid(0.01, 300), 20, 1, InitSpec::constant(0.0));
  CHECK(stats.mean_S.isZero(0.0));
  CHECK(stats.A_est == 0.0);
  CHECK_FALSE(stats.G_est.has_value());
  CHECK(stats.n_paths == 20);
}

TEST_CASE("deterministic single oscillator matches the closed-form amplitude") {
  SystemParams p;
  p.N = 1;
  p.epsilon = 0.0;
  p.sigma2 = 0.0;
  p.alpha = 0.9;
  const TimeGrid grid = TimeGrid::covering(0.01, 40.0);
  const auto stats = fracstar::run_ensemble(p, grid, 3, 1, InitSpec::constant(0.0));
  const auto scalar = fracstar::abm_integrate(fracstar::FractionalOrder(p.alpha), grid, Vec::Zero(1),
                                              [&](double t, const Vec& s) -> Vec {
                                                return (-p.omega * s.array() + p.forcing(t)).matrix();
                                              });
  CHECK((stats.mean_S - scalar.component(0)).cwiseAbs().maxCoeff() < 1e-12);
  const auto g = fracstar::gain(p);
  CHECK(stats.A_est == doctest::Approx(g.A1).epsilon(0.01));
  CHECK(*stats.G_est == doctest::Approx(g.G).epsilon(0.01));
  CHECK(stats.stderr_S.isZero(1e-12));
}

TEST_CASE("results do not depend on the worker count") {
  const SystemParams p = small_noisy();
  const TimeGrid grid(0.01, 200);
  EnsembleOptions one;
  EnsembleOptions many;
  many.workers = 3;
  const auto a = fracstar::run_ensemble(p, grid, 50, 8, InitSpec::standard_normal(), one);
  const auto b = fracstar::run_ensemble(p, grid, 50, 8, InitSpec::standard_normal(), many);
  CHECK(a.mean_S == b.mean_S);
  CHECK(a.stderr_S == b.stderr_S);
  CHECK(a.mean_absdev == b.mean_absdev);
  CHECK(a.A_est == b.A_est);
  CHECK(a.phi_est == b.phi_est);

  const PassageCriterion band{0.3, 0.2};
  const auto m1 = fracstar::estimate_mfpt(p, grid, 40, 8, band, InitSpec::standard_normal(), one);
  const auto m2 = fracstar::estimate_mfpt(p, grid, 40, 8, band, InitSpec::standard_normal(), many);
  CHECK(m1.mean == m2.mean);
  CHECK(m1.stderr == m2.stderr);
  CHECK(m1.n_passed == m2.n_passed);

  const auto d1 = fracstar::deviation_profile(p, grid, 40, 8, InitSpec::standard_normal(), one);
  const auto d2 = fracstar::deviation_profile(p, grid, 40, 8, InitSpec::standard_normal(), many);
  CHECK(d1.mean == d2.mean);
}

TEST_CASE("early-stopping MFPT equals the full-series passage time") {
  const SystemParams p = small_noisy();
  const TimeGrid grid(0.01, 400);
  const PassageCriterion band{0.2, 0.5};
  const auto est = fracstar::estimate_mfpt(p, grid, 12, 21, band);

  const fracstar::AbmWeights<double> w(p.order(), grid.n_steps());
  double sum = 0.0;
  std::size_t passed = 0;
  for (std::size_t i = 0; i < 12; ++i) {
    const Vec x0 = InitSpec::standard_normal().draw(p.particles(), fracstar::path_init_seed(21, i));
    const auto r = fracstar::simulate_path(p, grid, x0, fracstar::path_noise_seed(21, i), w);
    const auto k = fracstar::first_passage_index(fracstar::synchronization_spread(r.particles), band.delta,
                                                 grid.steps_for(band.dwell));
    if (k) {
      sum += grid.time(*k);
      ++passed;
    }
  }
  REQUIRE(passed > 0);
  CHECK(est.n_passed == passed);
  CHECK(est.mean == doctest::Approx(sum / static_cast<double>(passed)).epsilon(1e-15));
}

TEST_CASE("identical initial positions pass at time zero") {
  const SystemParams p = small_noisy();
  const auto est = fracstar::estimate_mfpt(p, TimeGrid(0.01, 300), 16, 4, PassageCriterion{0.05, 1.0},
                                           InitSpec::constant(0.3));
  CHECK(est.valid);
  CHECK(est.mean == 0.0);
  CHECK(est.censored_fraction == 0.0);

  const auto dev = fracstar::deviation_profile(p, TimeGrid(0.01, 300), 8, 4, InitSpec::constant(0.3));
  CHECK(dev.mean.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("an unreachable band censors every path") {
  const SystemParams p = small_noisy();
  const auto est = fracstar::estimate_mfpt(p, TimeGrid(0.01, 100), 8, 4, PassageCriterion{1e-9, 0.5});
  CHECK_FALSE(est.valid);
  CHECK(est.censored_fraction == 1.0);
  CHECK(est.n_passed == 0);
}

TEST_CASE("stronger coupling does not slow synchronization") {
  SystemParams p;
  p.alpha = 0.9;
  p.N = 3;
  p.sigma2 = 1.0;
  const TimeGrid grid(0.002, 5000);
  const PassageCriterion band{0.05, 0.5};
  const auto weak = fracstar::estimate_mfpt(p, grid, 60, 2, band);
  p.epsilon = 10.0;
  const auto strong = fracstar::estimate_mfpt(p, grid, 60, 2, band);
  REQUIRE(weak.valid);
  REQUIRE(strong.valid);
  CHECK(strong.mean <= weak.mean + 3.0 * std::hypot(weak.stderr, strong.stderr));
}

TEST_CASE("standard error shrinks like one over root n") {
  const SystemParams p = small_noisy();
  const TimeGrid grid(0.02, 150);
  auto late_se = [&](std::size_t n) {
    const auto s = fracstar::run_ensemble(p, grid, n, 31);
    return s.stderr_S.tail(50).mean();
  };
  const double s250 = late_se(250);
  const double s1000 = late_se(1000);
  const double s4000 = late_se(4000);
  CHECK(s250 / s1000 == doctest::Approx(2.0).epsilon(0.15));
  CHECK(s1000 / s4000 == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("solver failures carry the path index") {
  SystemParams p;
  p.alpha = 1.0;
  p.N = 2;
  p.omega = 1e4;  // far outside the explicit stability region at this step
  try {
    fracstar::run_ensemble(p, TimeGrid(0.01, 2000), 5, 1);
    FAIL("expected a path failure");
  } catch (const fracstar::PathFailure& e) {
    CHECK(e.path() == 0);
    CHECK(e.step() > 0);
  }
}

TEST_CASE("argument errors") {
  const SystemParams p = small_noisy();
  CHECK_THROWS_AS(fracstar::run_ensemble(p, TimeGrid(0.01, 10), 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(fracstar::estimate_mfpt(p, TimeGrid(0.01, 10), 4, 1, PassageCriterion{0.0, 1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(fracstar::estimate_mfpt(p, TimeGrid(0.01, 10), 4, 1, PassageCriterion{0.1, -1.0}),
                  std::invalid_argument);
}

TEST_CASE("default passage band") {
  SystemParams p;
  p.sigma2 = 1.5;
  CHECK(fracstar::default_passage(p).delta == doctest::Approx(0.05));
  CHECK(fracstar::default_passage(p).dwell == 1.0);
  p.A0 = 100.0;
  CHECK(fracstar::default_passage(p).delta == doctest::Approx(0.05 * fracstar::gain(p).A1));
}
