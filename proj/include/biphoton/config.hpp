#pragma once

#include <optional>
#include <string>
#include <vector>

#include "biphoton/filters.hpp"
#include "biphoton/grid.hpp"
#include "biphoton/physics.hpp"
#include "biphoton/tomography.hpp"

// Sectioned key=value run configuration. Parsing is strict: unknown sections
// or keys are rejected with their full path. Missing keys fall back to the
// bundled defaults, which reproduce the experimental parameter set
// (266/532 nm, 153 fs pump, 0.13 mm crystals, D+ = -570 fs/mm,
// D'' = 855 fs^2/mm).

namespace biphoton {

struct FiltersConfig {
  bool enabled = true;
  FilterSpec arm1{532.0, 8.0};
  FilterSpec arm2{532.0, 8.0};

  bool operator==(const FiltersConfig&) const = default;
};

struct SweepConfig {
  double t_min_fs = -400.0;
  double t_max_fs = 400.0;
  int steps = 161;

  bool operator==(const SweepConfig&) const = default;
};

enum class NoiseMode { Poisson, None };

struct TomographyConfig {
  double mean_total = 9000.0;
  double background_rate_cps = 9.0;
  double duration_s = 10.0;
  std::uint64_t seed = 12345;
  NoiseMode noise = NoiseMode::Poisson;
  std::optional<double> v;  // empty = derive from the amplitude pipeline
  MLESettings mle;

  bool operator==(const TomographyConfig&) const = default;
};

struct PatternConfig {
  std::optional<double> v;
  int steps = 64;
  double count_scale = 1000.0;
  NoiseMode noise = NoiseMode::None;
  std::uint64_t seed = 54321;
  BackgroundMode background_mode = BackgroundMode::Ignore;
  double background_counts = 0.0;

  bool operator==(const PatternConfig&) const = default;
};

enum class OutputFormats { All, CsvOnly, JsonOnly };

struct OutputConfig {
  std::string directory = "out";
  OutputFormats formats = OutputFormats::All;

  bool operator==(const OutputConfig&) const = default;
};

struct RunConfig {
  PumpSpec pump;
  CrystalSpec crystal;
  GridSpec grid;
  FiltersConfig filters;
  SweepConfig sweep;
  WalkoffLedger walkoff = default_walkoff_ledger();
  PrecompensatorSpec precompensator{168.0};
  double compensator_phi_rad = 0.0;
  TomographyConfig tomography;
  PatternConfig pattern;
  OutputConfig output;

  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

/// Parse the INI-style text. Throws ConfigError with a section.key path on
/// unknown keys or malformed values.
RunConfig parse_config(const std::string& text);

/// Canonical serialization: fixed section/key order, every key explicit,
/// shortest round-trip number formatting. parse(serialize(c)) == c.
std::string serialize_config(const RunConfig& config);

/// Read + parse a config file.
RunConfig load_config_file(const std::string& path);

}  // namespace biphoton
