#include "fracstar/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>

#include "fracstar/csv.hpp"

namespace fracstar::cli {

namespace {

using KeyValues = std::map<std::string, std::string>;

const KeyValues& base_defaults() {
  static const KeyValues defaults = {
      {"alpha", "0.9"},
      {"omega", "1"},
      {"epsilon", "1"},
      {"N", "10"},
      {"A0", "1"},
      {"Omega", "pi"},
      {"lambda", "1"},
      {"dt", "0.01"},
      {"t_end", "15"},
      {"paths", "3000"},
      {"seed", "1"},
      {"out", "."},
      {"workers", "1"},
      {"delta", "auto"},
      {"dwell", "1"},
      {"fit_fraction", "0.3"},
      {"init", "normal"},
      {"init_value", "0"},
      {"noise", "shared"},
      {"memory_window", "0"},
      {"lambda_min", "0.01"},
      {"lambda_max", "5"},
      {"lambda_step", "0.025"},
      {"sigma2_min", "0.01"},
      {"sigma2_max", "8"},
      {"sigma2_step", "0.04"},
      {"Omega_min", "0.05"},
      {"Omega_max", "5"},
      {"Omega_step", "0.05"},
      {"sigma_min", "0"},
      {"sigma_max", "5"},
      {"sigma_step", "0.01"},
      {"omega_min", "0.5"},
      {"omega_max", "2"},
      {"sigma2_rel_min", "0"},
      {"sigma2_rel_max", "1"},
      {"samples", "100000"},
      {"alphas", "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1"},
      {"series_param", "lambda"},
      {"series_values", "0.1,0.5,1,2"},
      {"N_list", "2,3,4,5,6,7,8,9,10,11,12,13,14,15,16,17,18,19,20"},
      {"cell_cap", std::to_string(kDefaultCellCap)},
  };
  return defaults;
}

KeyValues command_defaults(const std::string& command) {
  if (command == "scan-gain") {
    return {{"sigma2_min", "0"}, {"sigma2_max", "10"}, {"sigma2_step", "0.1"}};
  }
  if (command == "scan-sr-ratio") {
    return {{"lambda_min", "0.1"}, {"lambda_max", "5"}, {"Omega_min", "0.1"}, {"Omega_max", "pi"}};
  }
  if (command == "scan-bsr") {
    return {{"Omega_min", "0.01"}, {"Omega_max", "10"}, {"Omega_step", "0.01"}};
  }
  if (command == "scan-csr") {
    return {{"series_param", "omega"}, {"series_values", "1,2,3"}};
  }
  if (command == "scan-mfpt") {
    return {{"paths", "500"}};
  }
  return {};
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

bool known_key(const std::string& key) {
  const auto& keys = config_keys();
  return std::find(keys.begin(), keys.end(), key) != keys.end();
}

/// Later layers win; supplying sigma drops an earlier sigma2 and vice versa.
void overlay(KeyValues& into, const KeyValues& layer, const std::string& layer_name) {
  if (layer.count("sigma") && layer.count("sigma2")) {
    throw ConfigError("sigma", "supply exactly one of sigma and sigma2 (" + layer_name + " sets both)");
  }
  for (const auto& [key, value] : layer) {
    if (!known_key(key)) throw ConfigError(key, "unknown configuration key");
    if (key == "sigma") into.erase("sigma2");
    if (key == "sigma2") into.erase("sigma");
    into[key] = value;
  }
}

template <typename Int>
Int parse_integer(const std::string& key, const std::string& text) {
  Int value{};
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size()) {
    throw ConfigError(key, "expected an integer, got '" + text + "'");
  }
  return value;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

class Reader {
 public:
  explicit Reader(const KeyValues& values) : values_(values) {}

  const std::string& text(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError(key, "missing value");
    return it->second;
  }

  double real(const std::string& key) const { return parse_real(key, text(key)); }

  double positive(const std::string& key) const {
    const double v = real(key);
    if (!(v > 0.0)) throw ConfigError(key, "must be positive");
    return v;
  }

  double non_negative(const std::string& key) const {
    const double v = real(key);
    if (!(v >= 0.0)) throw ConfigError(key, "must be non-negative");
    return v;
  }

  template <typename Int>
  Int integer(const std::string& key) const {
    return parse_integer<Int>(key, text(key));
  }

  std::vector<double> reals(const std::string& key) const {
    std::vector<double> out;
    for (const auto& item : split_list(text(key))) out.push_back(parse_real(key, item));
    if (out.empty()) throw ConfigError(key, "list is empty");
    return out;
  }

  Axis axis(const std::string& name) const {
    Axis a{real(name + "_min"), real(name + "_max"), real(name + "_step")};
    try {
      a.validate(name);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(name + "_min", e.what());
    }
    return a;
  }

 private:
  const KeyValues& values_;
};

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names = {"gain",      "stability", "sr",         "simulate",
                                                 "mfpt",      "scan-phase", "scan-gain", "scan-sr-ratio",
                                                 "scan-bsr",  "scan-csr",  "scan-mfpt"};
  return names;
}

bool is_command(const std::string& name) {
  const auto& names = commands();
  return std::find(names.begin(), names.end(), name) != names.end();
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "alpha",        "omega",         "epsilon",       "N",           "A0",           "Omega",
      "lambda",       "sigma",         "sigma2",        "dt",          "t_end",        "paths",
      "seed",         "out",           "workers",       "delta",       "dwell",        "fit_fraction",
      "init",         "init_value",    "noise",         "memory_window", "lambda_min", "lambda_max",
      "lambda_step",  "sigma2_min",    "sigma2_max",    "sigma2_step", "Omega_min",    "Omega_max",
      "Omega_step",   "sigma_min",     "sigma_max",     "sigma_step",  "omega_min",    "omega_max",
      "sigma2_rel_min", "sigma2_rel_max", "samples",    "alphas",      "series_param", "series_values",
      "N_list",       "cell_cap"};
  return keys;
}

double parse_real(const std::string& key, const std::string& raw) {
  std::string text = trim(raw);
  for (const std::string_view pi_symbol : {"π", "PI", "Pi"}) {
    for (auto pos = text.find(pi_symbol); pos != std::string::npos; pos = text.find(pi_symbol)) {
      text.replace(pos, pi_symbol.size(), "pi");
    }
  }
  const auto pi_at = text.find("pi");
  try {
    if (pi_at == std::string::npos) return csv::parse(text);

    // [factor *] pi [/ divisor]
    double factor = 1.0;
    double divisor = 1.0;
    const std::string head = trim(std::string_view(text).substr(0, pi_at));
    const std::string tail = trim(std::string_view(text).substr(pi_at + 2));
    if (!head.empty()) {
      if (head.back() != '*') throw std::invalid_argument("bad pi expression");
      factor = csv::parse(trim(std::string_view(head).substr(0, head.size() - 1)));
    }
    if (!tail.empty()) {
      if (tail.front() != '/') throw std::invalid_argument("bad pi expression");
      divisor = csv::parse(trim(std::string_view(tail).substr(1)));
    }
    return factor * std::numbers::pi / divisor;
  } catch (const std::invalid_argument&) {
    throw ConfigError(key, "expected a number, got '" + raw + "'");
  }
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("config", "cannot open '" + file.string() + "'");
  KeyValues values;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config", "line " + std::to_string(line_no) + " is not of the form key = value");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (!known_key(key)) throw ConfigError(key, "unknown configuration key (line " + std::to_string(line_no) + ")");
    if (values.count(key)) throw ConfigError(key, "given twice (line " + std::to_string(line_no) + ")");
    values[key] = value;
  }
  return values;
}

RunConfig parse_config(const std::string& command, const std::optional<std::filesystem::path>& file,
                       const std::map<std::string, std::string>& overrides) {
  if (!is_command(command)) throw ConfigError("command", "unknown command '" + command + "'");

  KeyValues merged = base_defaults();
  overlay(merged, command_defaults(command), "defaults");
  if (file) overlay(merged, read_config_file(*file), "config file");
  overlay(merged, overrides, "flags");
  if (!merged.count("sigma") && !merged.count("sigma2")) merged["sigma2"] = "0";

  const Reader r(merged);
  RunConfig c;
  c.command = command;

  SystemParams& p = c.system;
  p.alpha = r.real("alpha");
  if (!(p.alpha > 0.0 && p.alpha <= 1.0)) throw ConfigError("alpha", "must lie in (0, 1]");
  p.omega = r.non_negative("omega");
  p.epsilon = r.real("epsilon");
  if (!std::isfinite(p.epsilon)) throw ConfigError("epsilon", "must be finite");
  p.N = r.integer<int>("N");
  if (p.N < 1) throw ConfigError("N", "must be at least 1");
  p.A0 = r.non_negative("A0");
  p.Omega = r.non_negative("Omega");
  p.lambda = r.non_negative("lambda");
  if (merged.count("sigma")) {
    const double sd = r.non_negative("sigma");
    p.sigma2 = sd * sd;
    c.sigma_given_as_sd = true;
  } else {
    p.sigma2 = r.non_negative("sigma2");
  }
  for (const char* key : {"omega", "A0", "Omega", "lambda"}) {
    if (!std::isfinite(r.real(key))) throw ConfigError(key, "must be finite");
  }

  const double dt = r.positive("dt");
  const double t_end = r.positive("t_end");
  if (t_end < dt) throw ConfigError("t_end", "must be at least one time step");
  c.grid = TimeGrid::covering(dt, t_end);
  c.paths = r.integer<std::size_t>("paths");
  if (c.paths < 1) throw ConfigError("paths", "must be at least 1");
  c.seed = r.integer<std::uint64_t>("seed");
  c.out_dir = r.text("out");
  c.workers = r.integer<std::size_t>("workers");
  if (c.workers == 0) c.workers = std::max(1u, std::thread::hardware_concurrency());

  if (r.text("delta") != "auto") c.delta = r.positive("delta");
  c.dwell = r.non_negative("dwell");
  c.fit_fraction = r.real("fit_fraction");
  if (!(c.fit_fraction > 0.0 && c.fit_fraction <= 1.0)) throw ConfigError("fit_fraction", "must lie in (0, 1]");
  const std::string& init = r.text("init");
  if (init == "normal") {
    c.init = InitSpec::standard_normal();
  } else if (init == "constant") {
    c.init = InitSpec::constant(r.real("init_value"));
  } else {
    throw ConfigError("init", "must be 'normal' or 'constant'");
  }
  const std::string& noise = r.text("noise");
  if (noise == "shared") {
    c.noise = NoiseMode::Shared;
  } else if (noise == "per-particle") {
    c.noise = NoiseMode::PerParticle;
  } else {
    throw ConfigError("noise", "must be 'shared' or 'per-particle'");
  }
  c.memory_window = r.integer<std::size_t>("memory_window");

  c.lambda_axis = r.axis("lambda");
  c.sigma2_axis = r.axis("sigma2");
  c.Omega_axis = r.axis("Omega");
  c.sigma_axis = r.axis("sigma");
  if (c.sigma_axis.min < 0.0) throw ConfigError("sigma_min", "must be non-negative");

  SamplingSpec& s = c.sampling;
  s.omega_min = r.non_negative("omega_min");
  s.omega_max = r.non_negative("omega_max");
  s.lambda_min = r.non_negative("lambda_min");
  s.lambda_max = r.non_negative("lambda_max");
  s.Omega_min = r.non_negative("Omega_min");
  s.Omega_max = r.non_negative("Omega_max");
  s.sigma2_rel_min = r.non_negative("sigma2_rel_min");
  s.sigma2_rel_max = r.non_negative("sigma2_rel_max");
  s.samples = r.integer<std::size_t>("samples");
  s.seed = c.seed;
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("samples", e.what());
  }

  c.alphas = r.reals("alphas");
  for (double a : c.alphas) {
    if (!(a > 0.0 && a <= 1.0)) throw ConfigError("alphas", "every entry must lie in (0, 1]");
  }
  try {
    c.series_param = parse_series_param(r.text("series_param"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("series_param", e.what());
  }
  c.series_values = r.reals("series_values");
  for (const auto& item : split_list(r.text("N_list"))) {
    const int n = parse_integer<int>("N_list", item);
    if (n < 1) throw ConfigError("N_list", "every entry must be at least 1");
    c.N_list.push_back(n);
  }
  if (c.N_list.empty()) throw ConfigError("N_list", "list is empty");
  c.cell_cap = r.integer<std::size_t>("cell_cap");
  if (c.cell_cap < 1) throw ConfigError("cell_cap", "must be at least 1");

  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("system", e.what());
  }

  for (const auto& key : config_keys()) {
    const auto it = merged.find(key);
    if (it != merged.end()) c.effective.emplace_back(key, it->second);
  }
  return c;
}

void write_manifest(const RunConfig& config, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write manifest '" + file.string() + "'");
  out << "# run manifest\n";
  out << "# command: " << config.command << "\n";
  for (const auto& [key, value] : config.effective) out << key << " = " << value << "\n";
  // The other spelling of the noise intensity, for reference only.
  if (config.sigma_given_as_sd) {
    out << "# sigma2 = " << csv::format(config.system.sigma2) << "\n";
  } else {
    out << "# sigma = " << csv::format(config.system.sigma()) << "\n";
  }
  if (!out) throw std::runtime_error("failed writing manifest '" + file.string() + "'");
}

}  // namespace fracstar::cli
