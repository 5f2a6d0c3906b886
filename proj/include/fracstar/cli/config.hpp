#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fracstar/monte_carlo.hpp"
#include "fracstar/scan.hpp"
#include "fracstar/star_system.hpp"

namespace fracstar::cli {

/// Invalid configuration; names the offending key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::invalid_argument(key + ": " + message), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// Commands accepted by the front end.
const std::vector<std::string>& commands();
bool is_command(const std::string& name);

/// Every recognized configuration key, in manifest order.
const std::vector<std::string>& config_keys();

struct RunConfig {
  std::string command;
  SystemParams system;
  /// Which of sigma / sigma2 the user supplied; the other is derived.
  bool sigma_given_as_sd = false;

  TimeGrid grid{0.01, 1500};
  std::size_t paths = 3000;
  std::uint64_t seed = 1;
  std::filesystem::path out_dir = ".";
  std::size_t workers = 1;

  std::optional<double> delta;
  double dwell = 1.0;
  double fit_fraction = 0.3;
  InitSpec init;
  NoiseMode noise = NoiseMode::Shared;
  std::size_t memory_window = 0;

  Axis lambda_axis;
  Axis sigma2_axis;
  Axis Omega_axis;
  Axis sigma_axis;
  SamplingSpec sampling;
  std::vector<double> alphas;
  SeriesParam series_param = SeriesParam::lambda;
  std::vector<double> series_values;
  std::vector<int> N_list;
  std::size_t cell_cap = kDefaultCellCap;

  /// Effective key = value text, in manifest order, exactly as parsed.
  std::vector<std::pair<std::string, std::string>> effective;
};

/// Reads "key = value" lines; '#' starts a comment. Unknown keys are rejected.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& file);

/// Layers command defaults, then the file, then flag overrides, and validates
/// every value. sigma and sigma2 are mutually exclusive.
RunConfig parse_config(const std::string& command, const std::optional<std::filesystem::path>& file,
                       const std::map<std::string, std::string>& overrides);

/// Same key = value format as the config file; re-running with it as --config
/// reproduces the run.
void write_manifest(const RunConfig& config, const std::filesystem::path& file);

/// Numeric value parser shared by config and flags: plain decimals plus
/// multiples of pi ("pi", "0.1*pi", "pi/2", "2*pi/3").
double parse_real(const std::string& key, const std::string& text);

}  // namespace fracstar::cli
