#pragma once

// Command-line front end: `solve`, `sweep` and `verify`.
//
// Exit codes: 0 success, 1 configuration or usage error, 2 infeasible input,
// 3 invariant failure (verify only).

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pinchwave/experiments.hpp"

namespace pinchwave::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kInfeasible = 2, kInvariantFailure = 3 };

/// Malformed configuration: bad JSON, unknown key, wrong type, missing file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every user-settable knob. Unset fields take their defaults in resolve().
/// Powers are in dBm and the carrier in GHz, as on the command line.
struct RunConfig {
  std::optional<double> carrier_frequency_ghz;
  std::optional<double> noise_power_dbm;
  std::optional<double> waveguide_height_m;
  std::optional<double> min_spacing_m;
  std::optional<double> region_side_m;
  std::optional<double> refractive_index;
  std::optional<double> power_dbm;
  std::optional<double> feed_x_m;
  std::optional<int> num_antennas;
  std::optional<UserPosition> user;
  std::optional<std::vector<std::string>> systems;
  std::optional<std::string> sweep_variable;
  std::optional<std::vector<double>> sweep_values;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::optional<double> step_div;
  std::optional<double> phase_tolerance_rad;
  std::optional<double> oracle_step_div;
  std::optional<double> oracle_window_halfwidth_m;
  std::optional<bool> full_span;
  std::optional<int> cases;
  std::optional<std::string> out;

  /// Fields set in `other` replace those in *this.
  void merge_from(const RunConfig& other);
};

/// Parses a flat JSON object. Throws ConfigError with the line/column or the
/// offending field name.
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<config>");
RunConfig load_config_file(const std::string& path);

UserPosition parse_user(const std::string& text);
std::vector<std::string> split_list(const std::string& text);

/// One resolved setting with its provenance, for output metadata.
struct MetadataEntry {
  std::string key;
  std::string value;
  bool user_set = false;
};

struct ResolvedRun {
  SystemParams params;
  ExperimentSpec spec;
  SolverConfig solver;
  RefinementConfig refinement;
  std::optional<UserPosition> user;
  std::vector<MetadataEntry> metadata;
};

/// Applies defaults and validates. Throws ConfigError for unknown names and
/// std::invalid_argument / CostGuardError for infeasible values.
ResolvedRun resolve(const RunConfig& cfg);

/// Shortest decimal string that reads back to the same double.
std::string format_double(double v);

std::string sweep_csv(const SweepResult& result, const ResolvedRun& run);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pinchwave::cli
