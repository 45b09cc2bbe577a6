#pragma once

#include <optional>
#include <string>

#include "trainplan/continuous.hpp"
#include "trainplan/discrete.hpp"
#include "trainplan/econ.hpp"

namespace trainplan {

// A fully validated problem file. Sections are optional; each command
// requires its own. Unknown keys anywhere are rejected.
struct ConfigFile {
  std::optional<econ::EconParams> econ_params;
  std::optional<econ::Population> population;
  std::optional<econ::MarketAccounts> market;
  std::optional<econ::NeedBreakdown> need;
  std::optional<DynamicsSpec> dynamics;
  std::optional<DiscreteProblem> discrete;
  std::optional<ContinuousProblem> continuous;
  std::string output_dir = "out";
  std::string output_format = "both";  // csv | json | both
  std::string hash_hex;                // FNV-1a over the raw file bytes
};

ConfigFile parse_config(const std::string& text);
ConfigFile load_config(const std::string& path);

std::string fnv1a_hex(const std::string& bytes);

}  // namespace trainplan
