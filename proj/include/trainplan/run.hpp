#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "trainplan/config.hpp"

namespace trainplan::cli {

struct RunOptions {
  std::string command;  // econ | validate | solve-discrete | solve-continuous
                        // | oracle
  std::string config_path;
  std::optional<std::string> out_dir;  // --out; TRAINING_PLANNER_OUT wins
  std::optional<std::string> format;   // csv | json | both
  int threads = 0;                     // 0 = machine parallelism
  bool quiet = false;
};

struct RunReport {
  std::string command;
  std::string config_hash;
  double wall_time_s = 0.0;
  std::vector<std::string> warnings;
  std::vector<std::string> artifacts;
  std::optional<std::string> error;
  nlohmann::json results;
};

// Executes one command against one config, writes the requested artifacts,
// and always writes report.json (also on failure, with the error recorded).
// Never throws; errors land in the report.
RunReport run(const RunOptions& opts);

}  // namespace trainplan::cli
