#include "fracstar/cli/commands.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>
#include <string>

#include <CLI11.hpp>

#include "fracstar/analytics.hpp"
#include "fracstar/csv.hpp"

namespace fracstar::cli {

namespace {

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string yes_no(bool v) { return v ? "yes" : "no"; }

std::ofstream open_output(const RunConfig& c, const std::string& name) {
  const auto path = c.out_dir / name;
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write '" + path.string() + "'");
  return file;
}

void finish(std::ofstream& file, const std::string& name) {
  file.flush();
  if (!file) throw std::runtime_error("failed writing '" + name + "'");
}

template <typename Writer>
void write_csv(const RunConfig& c, const std::string& name, Writer&& writer, std::ostream& out) {
  auto file = open_output(c, name);
  writer(file);
  finish(file, name);
  out << "wrote " << (c.out_dir / name).string() << "\n";
}

EnsembleOptions ensemble_options(const RunConfig& c) {
  EnsembleOptions o;
  o.workers = c.workers;
  o.fit_fraction = c.fit_fraction;
  o.path.noise = c.noise;
  o.path.solver.memory_window = c.memory_window;
  return o;
}

std::optional<GainBreakdown> stationary_gain(const SystemParams& p) {
  if (!stability(p).stationary) return std::nullopt;
  try {
    return gain(p);
  } catch (const SingularGainError&) {
    return std::nullopt;
  }
}

PassageCriterion passage_for(const RunConfig& c, const SystemParams& p) {
  PassageCriterion passage = default_passage(p);
  if (c.delta) passage.delta = *c.delta;
  passage.dwell = c.dwell;
  return passage;
}

void cmd_gain(const RunConfig& c, std::ostream& out) {
  const GainBreakdown g = gain(c.system);
  out << "f1 = " << fmt6(g.f1) << ", f2 = " << fmt6(g.f2) << ", f3 = " << fmt6(g.f3) << ", f4 = " << fmt6(g.f4)
      << "\n";
  out << "A1 = " << fmt6(g.A1) << "\n";
  out << "G = " << fmt6(g.G) << ", phi = " << fmt6(g.phi) << "\n";
  if (!stability(c.system).stationary) out << "note: the mean field is not stationary for these parameters\n";
}

void cmd_stability(const RunConfig& c, std::ostream& out) {
  const StabilityReport s = stability(c.system);
  out << "stationary: " << yes_no(s.stationary) << " (margin " << fmt6(s.stationary_margin) << ")"
      << "; global sync: " << yes_no(s.sync_global) << " (margin " << fmt6(s.sync_global_margin) << ")"
      << "; main sync: " << yes_no(s.sync_main) << " (margin " << fmt6(s.sync_main_margin) << ")\n";
}

void cmd_sr(const RunConfig& c, std::ostream& out) {
  const SRReport r = sr_criterion(c.system);
  out << "sigma_star_sq = " << fmt6(r.sigma_star_sq) << ", stability bound = " << fmt6(r.stability_bound)
      << "\nSR occurs: " << yes_no(r.sr_occurs) << "\n";
}

void cmd_simulate(const RunConfig& c, std::ostream& out) {
  const EnsembleStats stats = run_ensemble(c.system, c.grid, c.paths, c.seed, c.init, ensemble_options(c));
  const auto theory = stationary_gain(c.system);
  write_csv(c, "ensemble.csv", [&](std::ostream& f) { csv::write_ensemble(f, stats, theory, c.system.Omega); }, out);
  out << "paths = " << stats.n_paths << ", A_est = " << fmt6(stats.A_est) << ", phi_est = " << fmt6(stats.phi_est);
  if (stats.G_est) out << ", G_est = " << fmt6(*stats.G_est);
  out << "\n";
  if (theory) {
    out << "analytic: G = " << fmt6(theory->G) << ", phi = " << fmt6(theory->phi) << "\n";
  } else {
    out << "analytic: mean field not stationary\n";
  }
}

void cmd_mfpt(const RunConfig& c, std::ostream& out) {
  const PassageCriterion passage = passage_for(c, c.system);
  const MFPTEstimate e = estimate_mfpt(c.system, c.grid, c.paths, c.seed, passage, c.init, ensemble_options(c));
  const MfptRow row{c.system.N, e};
  write_csv(c, "mfpt.csv", [&](std::ostream& f) { csv::write_mfpt(f, std::span(&row, 1)); }, out);
  out << "delta = " << fmt6(passage.delta) << ", dwell = " << fmt6(passage.dwell) << "\n";
  if (e.valid) {
    out << "MFPT = " << fmt6(e.mean) << " +- " << fmt6(e.stderr);
  } else {
    out << "MFPT undefined (every path censored)";
  }
  out << ", censored fraction = " << fmt6(e.censored_fraction) << "\n";
}

void cmd_scan_phase(const RunConfig& c, std::ostream& out) {
  const PhaseDiagram d = phase_diagram(c.lambda_axis, c.sigma2_axis, c.system, c.workers, c.cell_cap);
  write_csv(c, "phase.csv", [&](std::ostream& f) { csv::write_phase(f, d); }, out);
  out << d.lambdas.size() << " x " << d.sigma2s.size() << " cells";
  if (const auto frac = d.sr_fraction()) {
    out << ", SR fraction of the stationary region = " << fmt6(*frac) << "\n";
  } else {
    out << ", no stationary cells\n";
  }
}

void cmd_scan_gain(const RunConfig& c, std::ostream& out) {
  const auto cells = gain_surface(c.Omega_axis, c.sigma2_axis, c.system, c.workers, c.cell_cap);
  write_csv(c, "gain_surface.csv", [&](std::ostream& f) { csv::write_gain_surface(f, cells); }, out);
  std::optional<double> peak;
  std::size_t singular = 0;
  for (const auto& cell : cells) {
    if (cell.G && (!peak || *cell.G > *peak)) peak = cell.G;
    if (cell.singular) ++singular;
  }
  out << cells.size() << " cells";
  if (peak) out << ", peak G = " << fmt6(*peak);
  if (singular > 0) out << ", " << singular << " singular";
  out << "\n";
}

void cmd_scan_sr_ratio(const RunConfig& c, std::ostream& out) {
  const auto ratios = sr_ratio_vs_alpha(c.alphas, c.sampling, c.workers);
  write_csv(c, "sr_ratio.csv", [&](std::ostream& f) { csv::write_sr_ratio(f, ratios); }, out);
  for (const auto& r : ratios) {
    out << "alpha = " << fmt6(r.alpha) << ": ";
    if (r.ratio) {
      out << fmt6(*r.ratio);
    } else {
      out << "undefined (no stationary samples)";
    }
    out << "\n";
  }
}

void print_curve_summary(const std::vector<CurvePoint>& curve, std::size_t n_series, std::ostream& out) {
  for (std::size_t s = 0; s < n_series; ++s) {
    const auto points = series(curve, static_cast<int>(s));
    std::vector<double> g;
    for (const auto& pt : points) {
      if (pt.G) g.push_back(*pt.G);
    }
    out << "series " << s << ": " << points.size() << " points, " << count_interior_extrema(g)
        << " interior extrema\n";
  }
}

void cmd_scan_bsr(const RunConfig& c, std::ostream& out) {
  const auto curve = bsr_curve(c.Omega_axis, c.series_param, c.series_values, c.system);
  write_csv(c, "bsr.csv", [&](std::ostream& f) { csv::write_curve(f, curve); }, out);
  print_curve_summary(curve, c.series_values.size(), out);
}

void cmd_scan_csr(const RunConfig& c, std::ostream& out) {
  const auto curve = csr_curve(c.sigma_axis, c.series_param, c.series_values, c.system);
  write_csv(c, "csr.csv", [&](std::ostream& f) { csv::write_curve(f, curve); }, out);
  print_curve_summary(curve, c.series_values.size(), out);
}

void cmd_scan_mfpt(const RunConfig& c, std::ostream& out) {
  MfptScanSettings settings;
  settings.grid = c.grid;
  settings.n_paths = c.paths;
  settings.seed = c.seed;
  if (c.delta) settings.passage = PassageCriterion{*c.delta, c.dwell};
  settings.init = c.init;
  settings.options = ensemble_options(c);
  // Without an explicit delta the band follows each N's own amplitude; the
  // dwell still comes from the config.
  std::vector<MfptRow> rows;
  if (settings.passage) {
    rows = mfpt_vs_N(c.N_list, c.system, settings);
  } else {
    for (const int n : c.N_list) {
      SystemParams p = c.system;
      p.N = n;
      settings.passage = passage_for(c, p);
      auto row = mfpt_vs_N(std::span(&n, 1), c.system, settings);
      rows.push_back(row.front());
    }
  }
  write_csv(c, "mfpt_vs_N.csv", [&](std::ostream& f) { csv::write_mfpt(f, rows); }, out);
  for (const auto& r : rows) {
    out << "N = " << r.N << ": ";
    if (r.estimate.valid) {
      out << fmt6(r.estimate.mean) << " +- " << fmt6(r.estimate.stderr);
    } else {
      out << "undefined";
    }
    out << " (censored " << fmt6(r.estimate.censored_fraction) << ")\n";
  }
}

using Handler = std::function<void(const RunConfig&, std::ostream&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> table = {
      {"gain", cmd_gain},
      {"stability", cmd_stability},
      {"sr", cmd_sr},
      {"simulate", cmd_simulate},
      {"mfpt", cmd_mfpt},
      {"scan-phase", cmd_scan_phase},
      {"scan-gain", cmd_scan_gain},
      {"scan-sr-ratio", cmd_scan_sr_ratio},
      {"scan-bsr", cmd_scan_bsr},
      {"scan-csr", cmd_scan_csr},
      {"scan-mfpt", cmd_scan_mfpt},
  };
  return table;
}

}  // namespace

int dispatch(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto it = handlers().find(config.command);
  if (it == handlers().end()) {
    err << "error: unknown command '" << config.command << "'\n";
    return kExitInvalidInput;
  }
  try {
    std::filesystem::create_directories(config.out_dir);
    write_manifest(config, config.out_dir / "manifest.txt");
    it->second(config, out);
    return kExitOk;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const std::exception& e) {
    err << "runtime failure: " << e.what() << "\n";
    return kExitRuntimeFailure;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fractional star-network stochastic resonance toolkit"};
  app.set_version_flag("--version", "fracstar 1.0");

  std::string command;
  std::string config_file;
  std::vector<std::string> assignments;
  app.add_option("command", command, "One of: gain, stability, sr, simulate, mfpt, scan-phase, scan-gain, "
                                     "scan-sr-ratio, scan-bsr, scan-csr, scan-mfpt")
      ->required();
  app.add_option("--config", config_file, "key = value configuration file (a manifest works too)");
  app.add_option("--set", assignments, "Override any key: --set key=value (repeatable)");

  // Every configuration key is also a flag of the same name; --out is the
  // output directory.
  std::map<std::string, std::string> flag_values;
  for (const auto& key : config_keys()) {
    app.add_option("--" + key, flag_values[key], "Configuration key '" + key + "'");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << app.version() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  }

  std::map<std::string, std::string> overrides;
  for (const auto& key : config_keys()) {
    if (app.get_option("--" + key)->count() > 0) overrides[key] = flag_values[key];
  }
  for (const auto& a : assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos) {
      err << "error: --set expects key=value, got '" << a << "'\n";
      return kExitInvalidInput;
    }
    std::string key = a.substr(0, eq);
    std::string value = a.substr(eq + 1);
    key.erase(key.find_last_not_of(" \t") + 1);
    key.erase(0, key.find_first_not_of(" \t"));
    overrides[key] = value;
  }
  if (overrides.count("sigma") && overrides.count("sigma2")) {
    err << "error: sigma: supply exactly one of sigma and sigma2\n";
    return kExitInvalidInput;
  }

  RunConfig config;
  try {
    std::optional<std::filesystem::path> file;
    if (!config_file.empty()) file = config_file;
    config = parse_config(command, file, overrides);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  }
  return dispatch(config, out, err);
}

}  // namespace fracstar::cli
