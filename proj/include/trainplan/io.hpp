#pragma once

#include <string>

#include <json.hpp>

#include "trainplan/continuous.hpp"
#include "trainplan/discrete.hpp"

namespace trainplan::io {

// 17 significant digits: round-trip safe, so identical runs produce
// byte-identical files. Infinities render as "inf"/"-inf".
std::string format_double(double v);

// Rows = state nodes, columns = stages (0 .. n stages remaining).
std::string value_csv(const ValueTable& table);

// One row per (stage, node); stage is the 1-based execution index.
std::string policy_csv(const Policy& policy);

// One row per executed stage; x is the post-stage state.
std::string trajectory_csv(const Trajectory& traj);

// One row per refinement level.
std::string refinement_csv(const RefinementReport& report);

// Key-value rows.
std::string key_value_csv(const std::vector<std::pair<std::string, double>>&
                              rows);

// JSON fragments for report embedding. Non-finite values appear as strings.
nlohmann::json value_table_json(const ValueTable& table);
nlohmann::json policy_json(const Policy& policy);
nlohmann::json trajectory_json(const Trajectory& traj);
nlohmann::json refinement_json(const RefinementReport& report);
nlohmann::json json_number(double v);

void write_file(const std::string& path, const std::string& content);

}  // namespace trainplan::io
