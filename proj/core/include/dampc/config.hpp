#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "dampc/smc.hpp"

namespace dampc {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File names are relative to `dir` unless absolute.
struct OutputPaths {
  std::string dir = "out";
  std::string trace = "trace.csv";
  std::string summary = "summary.json";
  std::string runs = "runs.csv";
  std::string stats = "stats.json";
  std::string table = "table.txt";
  std::string plot = "plot.csv";

  std::filesystem::path resolve(const std::string& file) const;
};

struct AppConfig {
  // experiment.base_seed doubles as the seed of a single `run`.
  ExperimentConfig experiment;
  // Controllers compared by `smc` and `compare`.
  std::vector<ControllerKind> controllers{ControllerKind::dampc, ControllerKind::ampc};
  OutputPaths output;

  void validate() const;
};

// Parses a JSON document. Missing keys take their defaults; unknown keys,
// wrong types and invalid values raise ConfigError.
AppConfig parse_config(const std::string& json_text);
AppConfig load_config(const std::filesystem::path& path);

// Full JSON document with every key present.
std::string dump_config(const AppConfig& cfg, int indent = 2);

}  // namespace dampc
