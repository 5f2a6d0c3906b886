#include "fracstar/scan.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "fracstar/analytics.hpp"
#include "fracstar/parallel.hpp"

namespace fracstar {

Axis Axis::with_count(double min, double max, std::size_t count) {
  if (count < 2) throw std::invalid_argument("axis needs at least two points");
  return Axis{min, max, (max - min) / static_cast<double>(count - 1)};
}

void Axis::validate(const std::string& name) const {
  if (!std::isfinite(min) || !std::isfinite(max) || !std::isfinite(step)) {
    throw std::invalid_argument(name + " axis bounds must be finite");
  }
  if (!(step > 0.0)) throw std::invalid_argument(name + " axis step must be positive");
  if (!(min < max)) throw std::invalid_argument(name + " axis needs min < max");
}

std::vector<double> Axis::values() const {
  const auto count = static_cast<std::size_t>(std::floor((max - min) / step + 1e-9)) + 1;
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i) v[i] = min + static_cast<double>(i) * step;
  return v;
}

RegimeClass classify(const SystemParams& p) {
  if (!stability(p).stationary) return RegimeClass::Nonstationary;
  return sr_criterion(p).sr_occurs ? RegimeClass::StationaryWithSR : RegimeClass::StationaryNoSR;
}

std::optional<double> PhaseDiagram::sr_fraction() const {
  const auto stationary = (classes.array() > 0).count();
  if (stationary == 0) return std::nullopt;
  return static_cast<double>((classes.array() == 2).count()) / static_cast<double>(stationary);
}

namespace {

void check_cells(std::size_t cells, std::size_t cap) {
  if (cells > cap) {
    throw std::invalid_argument("scan has " + std::to_string(cells) + " cells, above the cap of " +
                                std::to_string(cap));
  }
}

}  // namespace

PhaseDiagram phase_diagram(const Axis& lambda, const Axis& sigma2, const SystemParams& fixed, std::size_t workers,
                           std::size_t cell_cap) {
  lambda.validate("lambda");
  sigma2.validate("sigma2");
  fixed.validate();
  PhaseDiagram d{lambda.values(), sigma2.values(), {}};
  check_cells(d.lambdas.size() * d.sigma2s.size(), cell_cap);

  const auto columns = parallel_map<Eigen::VectorXi>(d.lambdas.size(), workers, [&](std::size_t i) {
    Eigen::VectorXi col(static_cast<Eigen::Index>(d.sigma2s.size()));
    SystemParams p = fixed;
    p.lambda = d.lambdas[i];
    for (std::size_t j = 0; j < d.sigma2s.size(); ++j) {
      p.sigma2 = d.sigma2s[j];
      col(static_cast<Eigen::Index>(j)) = static_cast<int>(classify(p));
    }
    return col;
  });
  d.classes.resize(static_cast<Eigen::Index>(d.lambdas.size()), static_cast<Eigen::Index>(d.sigma2s.size()));
  for (std::size_t i = 0; i < columns.size(); ++i) d.classes.row(static_cast<Eigen::Index>(i)) = columns[i].transpose();
  return d;
}

void SamplingSpec::validate() const {
  auto range = [](double lo, double hi, const char* name) {
    if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
      throw std::invalid_argument(std::string(name) + " sampling range is invalid");
    }
  };
  range(omega_min, omega_max, "omega");
  range(lambda_min, lambda_max, "lambda");
  range(Omega_min, Omega_max, "Omega");
  range(sigma2_rel_min, sigma2_rel_max, "relative sigma2");
  if (omega_min < 0.0 || lambda_min < 0.0 || Omega_min < 0.0 || sigma2_rel_min < 0.0) {
    throw std::invalid_argument("sampling ranges must be non-negative");
  }
  if (samples == 0) throw std::invalid_argument("samples must be positive");
}

std::vector<SrRatio> sr_ratio_vs_alpha(std::span<const double> alphas, const SamplingSpec& spec,
                                       std::size_t workers) {
  spec.validate();
  for (double a : alphas) (void)FractionalOrder(a);

  return parallel_map<SrRatio>(alphas.size(), workers, [&](std::size_t idx) {
    std::mt19937_64 rng(derive_seed(spec.seed, idx));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto draw = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

    SrRatio out;
    out.alpha = alphas[idx];
    out.n_total = spec.samples;
    std::size_t with_sr = 0;
    SystemParams p;
    p.alpha = alphas[idx];
    for (std::size_t s = 0; s < spec.samples; ++s) {
      p.omega = draw(spec.omega_min, spec.omega_max);
      p.lambda = draw(spec.lambda_min, spec.lambda_max);
      p.Omega = draw(spec.Omega_min, spec.Omega_max);
      p.sigma2 = draw(spec.sigma2_rel_min, spec.sigma2_rel_max) * stationarity_bound(p);
      const RegimeClass c = classify(p);
      if (c == RegimeClass::Nonstationary) continue;
      ++out.n_stationary;
      if (c == RegimeClass::StationaryWithSR) ++with_sr;
    }
    if (out.n_stationary > 0) out.ratio = static_cast<double>(with_sr) / static_cast<double>(out.n_stationary);
    return out;
  });
}

std::vector<GainCell> gain_surface(const Axis& Omega, const Axis& sigma2, const SystemParams& fixed,
                                   std::size_t workers, std::size_t cell_cap) {
  Omega.validate("Omega");
  sigma2.validate("sigma2");
  fixed.validate();
  const auto omegas = Omega.values();
  const auto noises = sigma2.values();
  check_cells(omegas.size() * noises.size(), cell_cap);

  const auto rows = parallel_map<std::vector<GainCell>>(omegas.size(), workers, [&](std::size_t i) {
    std::vector<GainCell> row;
    row.reserve(noises.size());
    SystemParams p = fixed;
    p.Omega = omegas[i];
    for (double s2 : noises) {
      p.sigma2 = s2;
      GainCell cell{omegas[i], s2, std::nullopt, stability(p).stationary, false};
      if (cell.stationary) {
        try {
          cell.G = gain(p).G;
        } catch (const SingularGainError&) {
          cell.singular = true;
        }
      }
      row.push_back(cell);
    }
    return row;
  });

  std::vector<GainCell> cells;
  cells.reserve(omegas.size() * noises.size());
  for (const auto& row : rows) cells.insert(cells.end(), row.begin(), row.end());
  return cells;
}

SeriesParam parse_series_param(const std::string& name) {
  if (name == "alpha") return SeriesParam::alpha;
  if (name == "omega") return SeriesParam::omega;
  if (name == "Omega") return SeriesParam::Omega;
  if (name == "lambda") return SeriesParam::lambda;
  throw std::invalid_argument("series parameter must be one of alpha, omega, Omega, lambda; got '" + name + "'");
}

std::string series_param_name(SeriesParam which) {
  switch (which) {
    case SeriesParam::alpha: return "alpha";
    case SeriesParam::omega: return "omega";
    case SeriesParam::Omega: return "Omega";
    case SeriesParam::lambda: return "lambda";
  }
  return "?";
}

SystemParams with_series_value(SystemParams p, SeriesParam which, double value) {
  switch (which) {
    case SeriesParam::alpha: p.alpha = value; break;
    case SeriesParam::omega: p.omega = value; break;
    case SeriesParam::Omega: p.Omega = value; break;
    case SeriesParam::lambda: p.lambda = value; break;
  }
  p.validate();
  return p;
}

namespace {

std::optional<double> gain_or_empty(const SystemParams& p) {
  if (!stability(p).stationary) return std::nullopt;
  try {
    return gain(p).G;
  } catch (const SingularGainError&) {
    return std::nullopt;
  }
}

}  // namespace

std::vector<CurvePoint> bsr_curve(const Axis& Omega, SeriesParam which, std::span<const double> values,
                                  const SystemParams& fixed) {
  Omega.validate("Omega");
  if (which == SeriesParam::Omega) throw std::invalid_argument("BSR series cannot vary the driving frequency");
  std::vector<CurvePoint> out;
  for (std::size_t s = 0; s < values.size(); ++s) {
    SystemParams p = with_series_value(fixed, which, values[s]);
    for (double w : Omega.values()) {
      p.Omega = w;
      out.push_back({w, gain_or_empty(p), static_cast<int>(s)});
    }
  }
  return out;
}

std::vector<CurvePoint> csr_curve(const Axis& sigma, SeriesParam which, std::span<const double> values,
                                  const SystemParams& fixed) {
  sigma.validate("sigma");
  if (sigma.min < 0.0) throw std::invalid_argument("sigma axis must be non-negative");
  std::vector<CurvePoint> out;
  for (std::size_t s = 0; s < values.size(); ++s) {
    SystemParams p = with_series_value(fixed, which, values[s]);
    const double bound = stationarity_bound(p);
    for (double sd : sigma.values()) {
      p.sigma2 = sd * sd;
      if (!(p.sigma2 < bound)) continue;
      out.push_back({sd, gain_or_empty(p), static_cast<int>(s)});
    }
  }
  return out;
}

std::vector<CurvePoint> series(std::span<const CurvePoint> curve, int series_id) {
  std::vector<CurvePoint> out;
  for (const auto& pt : curve) {
    if (pt.series_id == series_id) out.push_back(pt);
  }
  return out;
}

std::size_t count_interior_extrema(std::span<const double> values) {
  std::size_t count = 0;
  int last_sign = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double d = values[i] - values[i - 1];
    const int sign = (d > 0.0) - (d < 0.0);
    if (sign == 0) continue;
    if (last_sign != 0 && sign != last_sign) ++count;
    last_sign = sign;
  }
  return count;
}

std::vector<MfptRow> mfpt_vs_N(std::span<const int> Ns, const SystemParams& fixed, const MfptScanSettings& settings) {
  std::vector<MfptRow> rows;
  rows.reserve(Ns.size());
  for (int n : Ns) {
    SystemParams p = fixed;
    p.N = n;
    p.validate();
    const PassageCriterion passage = settings.passage ? *settings.passage : default_passage(p);
    rows.push_back(
        {n, estimate_mfpt(p, settings.grid, settings.n_paths, settings.seed, passage, settings.init, settings.options)});
  }
  return rows;
}

}  // namespace fracstar
