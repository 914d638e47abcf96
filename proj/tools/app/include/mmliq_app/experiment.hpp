#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mmliq/errors.hpp"
#include "mmliq/fdsolver.hpp"
#include "mmliq/model.hpp"

namespace mmliq::app {

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Text is not valid JSON.
class ParseError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Unknown, missing or mistyped keys.
class SchemaError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

enum class Artifact { trajectories, decomposition, costs, amplitudes, spectrum, nplayer };

struct ExperimentConfig {
  MarketParams params;
  Inventories inv;
  TargetStrategy target{1.0, DTwap{0.0}};
  Grid grid{1.0, 1};
  SolveOptions options;
  double nplayer_step = 0.01;  // coarser grid for the dense best-response programs
  int spectrum_kmax = 50;
  std::vector<Artifact> outputs;
  std::vector<int> players;  // N values for the nplayer artifact
  std::filesystem::path output_dir = ".";
  std::map<std::string, std::string> tables;  // summary key per section (costs, amplitudes)
};

// Parses the JSON schema documented in the README. Throws ParseError,
// SchemaError or DomainError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Replaces the grid, re-checking the TWAP alignment. Throws DomainError.
void set_grid_step(ExperimentConfig& cfg, double step);

// Built-in equivalents of configs/<name>.cfg. Throws SchemaError for an
// unknown name.
ExperimentConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

// Runs the pipeline and writes the requested files plus summary.json into
// config.output_dir. Returns the summary document as text.
std::string run(const ExperimentConfig& config);

// Compares a summary against the stored reference table values with the
// acceptance tolerances. Returns one line per failed comparison.
std::vector<std::string> check_summary(const std::string& preset, const std::string& summary_json);

// 12 significant digits, the fixed CSV number format.
std::string format_number(double x);

}  // namespace mmliq::app
