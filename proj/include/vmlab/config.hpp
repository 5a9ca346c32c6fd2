#pragma once
// Flat key = value configuration with [section] headers (grammar in docs/config.md).

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "vmlab/scenarios.hpp"

namespace vmlab {

struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};

struct ConfigSection {
  /// "general" for entries before the first header.
  std::string name;
  int line = 0;
  std::vector<ConfigEntry> entries;
};

struct ConfigFile {
  std::vector<ConfigSection> sections;

  /// Throws ConfigError with the line number on malformed input.
  static ConfigFile parse(std::istream& in);
  static ConfigFile load(const std::string& path);
};

/// Everything a driver invocation can be configured with.
struct DriverSettings {
  std::uint64_t seed = 1;
  Tolerances tolerances;
  std::string calibration_file;
  CommutationOptions commutation;
  WeightDriftOptions weights;
  FreeDecayOptions free_decay;
  Theorem5Options theorem5;
  FieldDecayOptions field_decay;
  int potential_points = 64;
  CounterexampleOptions counterexample;
  int maxwell_points = 12;
  int maxwell_steps = 1000;
  ScenarioConfig simulation = plasma_oscillation_config();
};

/// Applies a parsed file on top of the defaults. Unknown sections and keys, repeated keys
/// and unparsable values throw ConfigError. Any [species] section replaces the default species.
DriverSettings settings_from(const ConfigFile& file, DriverSettings base = {});

/// RFC 4180 field quoting.
std::string csv_field(const std::string& s);
/// check, lhs, rhs, ratio, threshold, verdict, then the parameters as name=value pairs.
void write_reports_csv(std::ostream& out, const ScenarioResult& r);
/// Header row always; one row per recorded time.
void write_timeseries_csv(std::ostream& out, const RunRecord& rec);

}  // namespace vmlab
