#include "trainplan/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace trainplan::io {

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string value_csv(const ValueTable& table) {
  std::string out = "x";
  for (int k = 0; k <= table.stages; ++k)
    out += ",stage_" + std::to_string(k);
  out += "\n";
  for (int i = 0; i < table.grid.n; ++i) {
    out += format_double(table.grid.value(i));
    for (int k = 0; k <= table.stages; ++k) {
      out += ",";
      out += format_double(table.at(k, i));
    }
    out += "\n";
  }
  return out;
}

std::string policy_csv(const Policy& policy) {
  std::string out = "stage,node,control,disturbance\n";
  for (int stage_no = 1; stage_no <= policy.stages; ++stage_no) {
    int k = policy.stages - stage_no + 1;  // stages remaining while executing
    for (int i = 0; i < policy.grid.n; ++i) {
      out += std::to_string(stage_no);
      out += ",";
      out += std::to_string(i);
      out += ",";
      out += format_double(policy.control_node(k, i));
      out += ",";
      out += format_double(policy.disturbance_node(k, i));
      out += "\n";
    }
  }
  return out;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "stage,x,t,a,stage_cost,cumulative_cost\n";
  double cum = 0.0;
  for (std::size_t i = 0; i < traj.controls.size(); ++i) {
    cum += traj.stage_costs[i];
    out += std::to_string(i + 1);
    out += ",";
    out += format_double(traj.states[i + 1]);
    out += ",";
    out += format_double(traj.controls[i]);
    out += ",";
    out += format_double(traj.disturbances[i]);
    out += ",";
    out += format_double(traj.stage_costs[i]);
    out += ",";
    out += format_double(cum);
    out += "\n";
  }
  return out;
}

std::string refinement_csv(const RefinementReport& report) {
  std::string out = "level,cells,value\n";
  for (const LevelResult& lr : report.levels) {
    out += std::to_string(lr.level);
    out += ",";
    out += std::to_string(lr.cells);
    out += ",";
    out += format_double(lr.value);
    out += "\n";
  }
  return out;
}

std::string key_value_csv(
    const std::vector<std::pair<std::string, double>>& rows) {
  std::string out = "key,value\n";
  for (const auto& [key, value] : rows) {
    out += key;
    out += ",";
    out += format_double(value);
    out += "\n";
  }
  return out;
}

nlohmann::json json_number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

nlohmann::json value_table_json(const ValueTable& table) {
  nlohmann::json layers = nlohmann::json::array();
  for (int k = 0; k <= table.stages; ++k) {
    nlohmann::json layer = nlohmann::json::array();
    for (int i = 0; i < table.grid.n; ++i) layer.push_back(json_number(table.at(k, i)));
    layers.push_back(std::move(layer));
  }
  return {{"stages", table.stages},
          {"grid", {{"lo", table.grid.lo}, {"hi", table.grid.hi},
                    {"n", table.grid.n}}},
          {"layers", std::move(layers)}};
}

nlohmann::json policy_json(const Policy& policy) {
  nlohmann::json control = nlohmann::json::array();
  nlohmann::json disturbance = nlohmann::json::array();
  for (int k = 1; k <= policy.stages; ++k) {
    nlohmann::json trow = nlohmann::json::array();
    nlohmann::json arow = nlohmann::json::array();
    for (int i = 0; i < policy.grid.n; ++i) {
      trow.push_back(policy.control_node(k, i));
      arow.push_back(policy.disturbance_node(k, i));
    }
    control.push_back(std::move(trow));
    disturbance.push_back(std::move(arow));
  }
  return {{"stages", policy.stages},
          {"control", std::move(control)},
          {"disturbance", std::move(disturbance)}};
}

nlohmann::json trajectory_json(const Trajectory& traj) {
  nlohmann::json j = {{"states", traj.states},
                      {"controls", traj.controls},
                      {"disturbances", traj.disturbances},
                      {"stage_costs", traj.stage_costs},
                      {"total_cost", json_number(traj.total_cost)}};
  if (traj.reached_step) j["reached_step"] = *traj.reached_step;
  return j;
}

nlohmann::json refinement_json(const RefinementReport& report) {
  nlohmann::json levels = nlohmann::json::array();
  for (const LevelResult& lr : report.levels) {
    levels.push_back({{"level", lr.level},
                      {"cells", lr.cells},
                      {"value", json_number(lr.value)},
                      {"cost", json_number(lr.cost)},
                      {"grid_widened", lr.grid_widened},
                      {"grid", {{"lo", lr.grid_used.lo},
                                {"hi", lr.grid_used.hi},
                                {"n", lr.grid_used.n}}}});
  }
  nlohmann::json saddle = {
      {"status", report.saddle.status == SaddleStatus::Pass
                     ? "pass"
                     : report.saddle.status == SaddleStatus::Fail
                           ? "fail"
                           : "inconclusive"},
      {"epsilon", json_number(report.saddle.epsilon)},
      {"center_objective", json_number(report.saddle.center_objective)},
      {"candidates_tried", report.saddle.candidates_tried}};
  if (!report.saddle.note.empty()) saddle["note"] = report.saddle.note;
  if (report.saddle.worst) {
    saddle["worst_deviation"] = {
        {"side", report.saddle.worst->side == Deviation::Side::Control
                     ? "control"
                     : "disturbance"},
        {"cell_values", report.saddle.worst->cell_values},
        {"improvement", json_number(report.saddle.worst->improvement)}};
  }
  return {{"levels", std::move(levels)},
          {"epsilon_hat", json_number(report.epsilon_hat)},
          {"saddle_check", std::move(saddle)}};
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path);
  out << content;
  if (!out) throw Error("write failed: " + path);
}

}  // namespace trainplan::io
