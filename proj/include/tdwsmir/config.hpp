#pragma once

// Run configuration: a JSON document with a strict schema. Unknown keys are
// rejected with a ConfigError naming the dotted field path; relative paths are
// resolved against the directory holding the config file.

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "tdwsmir/array.hpp"
#include "tdwsmir/directivity.hpp"
#include "tdwsmir/image_source.hpp"

namespace tdw {

struct SourceConfig {
  Vec3 position{1.0, 3.5, 2.1};
  bool aim_at_array = true;
  EulerAngles orientation{};  // used when aim_at_array is false
  // Exactly one of the two is used.
  std::optional<AnalyticPattern> pattern = AnalyticPattern{PatternKind::Cardioid};
  std::optional<std::filesystem::path> bundle;
  AnalysisOptions analysis{};
  int order = 5;
};

struct ArrayConfig {
  Vec3 center{2.5, 3.5, 2.1};
  double radius = 0.042;
  std::string grid = "eigenmike32";  // or a CSV path with theta_rad,phi_rad rows
};

struct FilterConfig {
  bool enabled = false;
  LowpassSpec lowpass{};
};

struct OutputConfig {
  std::filesystem::path directory = "out";
  std::string basename = "rir";
  OutputFormat format = OutputFormat::Both;
  bool normalize = true;
  bool write_anechoic = false;
};

struct CompareConfig {
  double f_min_hz = 100.0;
  double f_max_hz = 8000.0;
  std::size_t bins = 800;
  double split_hz = 3000.0;
  std::optional<std::filesystem::path> against;  // mic-signal CSV to compare with instead of the oracle
};

struct RunConfig {
  RoomSpec room{{4.0, 6.0, 3.0}, {0.45, 0.7, 0.8, 0.5, 0.6, 0.75}};
  SourceConfig source{};
  ArrayConfig array{};
  SimulationConfig simulation{};
  FilterConfig filter{};
  OutputConfig output{};
  CompareConfig compare{};
  nlohmann::json provenance;  // free-form, carried into the side-car untouched
};

/// Defaults with every field spelled out.
RunConfig default_run_config();

/// Strict parse; relative paths resolve against `base_dir`. Throws ConfigError.
RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir);

/// Reads and parses a config file. Throws IoError or ConfigError.
RunConfig load_run_config(const std::filesystem::path& path);

/// Full resolved configuration (absolute paths); parse_run_config(to_json(c), any) == c.
nlohmann::json to_json(const RunConfig& c);

/// Config-level checks shared by every subcommand (room, positions, ranges).
void validate_run_config(const RunConfig& c);

/// Engine-side objects.
SourceSpec make_source_spec(const RunConfig& c);
MicArraySpec make_array_spec(const RunConfig& c);

}  // namespace tdw
