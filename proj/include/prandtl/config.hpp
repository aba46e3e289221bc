#pragma once

// Scenario configuration: key = value text files, presets and validation.
//
// Format: one `key = value` per line, `#` starts a comment. A `preset = name`
// line loads that preset first; every other key then overrides it, whatever
// the line order. Unknown keys are rejected.

#include <string>
#include <vector>

#include "prandtl/field.hpp"

namespace prandtl {

struct ScenarioConfig {
  std::string preset;          ///< name of the preset the values started from, empty if none
  int nx = 64;
  double length = 6.283185307179586;
  int ny = 300;
  double ymax = 24.0;
  double dt = 2e-3;
  double t_final = 100.0;
  double eta = 1e-3;           ///< initial amplitude
  int k0 = 1;                  ///< initial tangential mode index
  double epsilon = 1e-3;       ///< outflow amplitude
  double delta = 0.2;          ///< initial analytic radius
  double lambda = 4.0;         ///< radius gain
  std::string f = "texp";      ///< key f_spec; outflow profile: zero | texp | texp:<rate> | inv_bracket | table:<path>
  int output_every = 10;       ///< diagnostics cadence in steps
  ProductMode products = ProductMode::Dealiased23;
  double cfl_limit = 0.5;
  double zero_integral_tol = 1e-5;  ///< admissible relative ∫u₀ dy at load time
  double fit_lo = -1.0;        ///< decay-fit window; negative means [T/10, T]
  double fit_hi = -1.0;
  double corrector_spacing = 0.0;  ///< corrector snapshot spacing; 0 means 5 dt
  std::string cache_dir;       ///< corrector cache directory, empty disables caching
  bool relations = true;       ///< evaluate the block relation checks in every record
  double tail_abort = 0.0;     ///< stop when the tail indicator of a record exceeds this; 0 disables
};

struct Preset {
  std::string name;
  std::string purpose;
  ScenarioConfig config;
};

const std::vector<Preset>& preset_table();
/// Throws ConfigError naming "preset" for an unknown name.
ScenarioConfig preset_config(const std::string& name);

/// Applies `key = value` to `cfg`; throws ConfigError naming the key.
void apply_setting(ScenarioConfig& cfg, const std::string& key, const std::string& value);

/// Range and consistency checks; throws ConfigError naming the offending key.
void validate_config(const ScenarioConfig& cfg);

ScenarioConfig parse_config_text(const std::string& text);
ScenarioConfig parse_config(const std::string& path);

/// Resolved configuration in the same key = value format (round-trips through parse_config_text).
std::string to_text(const ScenarioConfig& cfg);

}  // namespace prandtl
