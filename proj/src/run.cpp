#include "trainplan/run.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <thread>

#include "trainplan/io.hpp"
#include "trainplan/oracle.hpp"

namespace trainplan::cli {

namespace {

using nlohmann::json;

struct RunCtx {
  const RunOptions& opts;
  RunReport& report;
  std::string out_dir;
  bool write_csv = true;
  bool write_json = true;
  int threads = 1;

  void emit(const std::string& name, const std::string& content) {
    std::string path = out_dir + "/" + name;
    io::write_file(path, content);
    report.artifacts.push_back(path);
  }
  void say(const std::string& line) const {
    if (!opts.quiet) std::cout << line << "\n";
  }
};

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

// Lipschitz estimate over the grid window the solve will actually use.
void warn_expansive_step(RunCtx& ctx, const DynamicsSpec& dyn,
                         const Grid& grid, double max_dt) {
  DynamicsSpec probe = dyn;
  probe.state_domain = {grid.lo, grid.hi};
  double k = estimate_lipschitz(probe);
  if (max_dt * k > 1.0) {
    ctx.report.warnings.push_back(
        "dt * K = " + fmt("%.3f", max_dt * k) +
        " > 1: the Euler step may be expansive; consider a finer partition");
  }
}

void run_econ(RunCtx& ctx, const ConfigFile& cfg) {
  if (!cfg.econ_params) throw ConfigError("missing section: econ");
  const econ::EconParams& p = *cfg.econ_params;

  std::vector<std::pair<std::string, double>> rows;
  rows.emplace_back("pv_unskilled", econ::pv_unskilled(p));
  rows.emplace_back("pv_skilled", econ::pv_skilled(p));
  rows.emplace_back("pv_skilled_drop_tail", econ::pv_skilled(p, true));
  rows.emplace_back("tuition_price", econ::tuition_price(p));
  rows.emplace_back("university_profit", econ::university_profit(p));
  rows.emplace_back("education_viable",
                    econ::education_viable(p) ? 1.0 : 0.0);
  if (cfg.population)
    rows.emplace_back("required_graduates",
                      econ::required_graduates(*cfg.population, p));
  if (cfg.market) {
    econ::MarketAccounts balanced = econ::market_balance(*cfg.market);
    rows.emplace_back("current_market", balanced.current_market);
  }
  if (cfg.need) {
    econ::NeedBreakdown n = *cfg.need;
    rows.emplace_back("total_need", econ::total_need(n));
  }

  json results;
  for (const auto& [key, value] : rows) results[key] = io::json_number(value);
  ctx.report.results["econ"] = results;
  if (ctx.write_csv) ctx.emit("econ.csv", io::key_value_csv(rows));
  for (const auto& [key, value] : rows)
    ctx.say(key + " = " + io::format_double(value));
}

void run_validate(RunCtx& ctx, const ConfigFile& cfg) {
  if (!cfg.dynamics) throw ConfigError("missing section: dynamics");
  RegularityReport r = assess_regularity(*cfg.dynamics);
  ctx.report.results["regularity"] = {
      {"lipschitz_k", r.lipschitz_k},
      {"growth_m", r.growth_m},
      {"growth_n", r.growth_n},
      {"vectogram_max_gap", r.vectogram_max_gap},
      {"sample_count", r.sample_count}};
  if (cfg.discrete) {
    double max_dt = 0.0;
    for (int i = 1; i <= cfg.discrete->stages; ++i)
      max_dt = std::max(max_dt, cfg.discrete->stage_dt(i));
    warn_expansive_step(ctx, *cfg.dynamics, cfg.discrete->state_grid, max_dt);
  }
  if (cfg.continuous) {
    warn_expansive_step(ctx, *cfg.dynamics, cfg.continuous->state_grid,
                        cfg.continuous->horizon /
                            cfg.continuous->base_partition);
  }
  ctx.say("lipschitz K = " + io::format_double(r.lipschitz_k));
  ctx.say("growth bound: |f| <= " + io::format_double(r.growth_m) + " + " +
          io::format_double(r.growth_n) + " * x");
  ctx.say("vectogram max gap = " + io::format_double(r.vectogram_max_gap));
  ctx.say("samples = " + std::to_string(r.sample_count));
}

void run_solve_discrete(RunCtx& ctx, const ConfigFile& cfg) {
  if (!cfg.discrete) throw ConfigError("missing section: discrete");
  const DiscreteProblem& p = *cfg.discrete;
  double max_dt = 0.0;
  for (int i = 1; i <= p.stages; ++i)
    max_dt = std::max(max_dt, p.stage_dt(i));
  warn_expansive_step(ctx, p.dynamics, p.state_grid, max_dt);

  Solution sol = solve(p, ctx.threads);
  double v0 = sol.value_at_x0(p);

  Trajectory traj;
  if (p.mode == Mode::MinCost) {
    WorstCase wc = worst_case_disturbance(p, sol);
    traj = simulate(p, sol.policy, wc.disturbances);
  } else {
    traj = play_feedback(p, sol);
  }

  json results = {{"mode", p.mode == Mode::MinCost ? "min-cost" : "min-time"},
                  {"stages", p.stages},
                  {"x0", p.x0},
                  {"value_at_x0", io::json_number(v0)},
                  {"trajectory_cost", io::json_number(traj.total_cost)}};
  if (ctx.write_json) {
    results["value_table"] = io::value_table_json(sol.value);
    results["policy"] = io::policy_json(sol.policy);
    results["trajectory"] = io::trajectory_json(traj);
  }
  ctx.report.results["discrete"] = std::move(results);

  if (ctx.write_csv) {
    ctx.emit("value.csv", io::value_csv(sol.value));
    ctx.emit("policy.csv", io::policy_csv(sol.policy));
    ctx.emit("trajectory.csv", io::trajectory_csv(traj));
  }

  if (p.mode == Mode::MinCost) {
    ctx.say("F_" + std::to_string(p.stages) + "(x0=" +
            io::format_double(p.x0) + ") = " + fmt("%.6f", v0));
  } else if (std::isfinite(v0)) {
    ctx.say("G_" + std::to_string(p.stages) + "(x0=" +
            io::format_double(p.x0) + ") = " + io::format_double(v0) +
            " step(s)");
  } else {
    ctx.say("G_" + std::to_string(p.stages) + "(x0=" +
            io::format_double(p.x0) + ") = unreachable");
  }
  int head = std::min(5, p.state_grid.n);
  for (int i = 0; i < head; ++i) {
    ctx.say("  stage 1, node " + std::to_string(i) + " (x=" +
            io::format_double(p.state_grid.value(i)) + "): t*=" +
            io::format_double(sol.policy.control_node(p.stages, i)) +
            ", a*=" +
            io::format_double(sol.policy.disturbance_node(p.stages, i)));
  }
}

void run_solve_continuous(RunCtx& ctx, const ConfigFile& cfg) {
  if (!cfg.continuous) throw ConfigError("missing section: continuous");
  const ContinuousProblem& p = *cfg.continuous;
  warn_expansive_step(ctx, p.dynamics, p.state_grid,
                      p.horizon / p.base_partition);

  RefinementReport rep = solve_refined(p, {}, ctx.threads);
  ctx.report.results["continuous"] = io::refinement_json(rep);
  if (ctx.write_csv) ctx.emit("refinement.csv", io::refinement_csv(rep));

  for (const LevelResult& lr : rep.levels) {
    ctx.say("level " + std::to_string(lr.level) + " (" +
            std::to_string(lr.cells) + " cells): value = " +
            io::format_double(lr.value) + ", cost = " +
            io::format_double(lr.cost));
  }
  ctx.say("epsilon_hat = " + io::format_double(rep.epsilon_hat));
  const char* status = rep.saddle.status == SaddleStatus::Pass
                           ? "pass"
                           : rep.saddle.status == SaddleStatus::Fail
                                 ? "fail"
                                 : "inconclusive";
  ctx.say(std::string("saddle check: ") + status + " at epsilon = " +
          io::format_double(rep.saddle.epsilon));
}

void run_oracle(RunCtx& ctx, const ConfigFile& cfg) {
  if (!cfg.discrete) throw ConfigError("missing section: discrete");
  oracle::OracleResult r = oracle::exhaustive_value(*cfg.discrete);
  ctx.report.results["oracle"] = {{"value", io::json_number(r.value)},
                                  {"leaf_count", r.leaf_count}};
  ctx.say("oracle value = " + io::format_double(r.value) + ", leaf count = " +
          std::to_string(r.leaf_count));
}

std::string resolve_out_dir(const RunOptions& opts, const ConfigFile* cfg) {
  if (const char* env = std::getenv("TRAINING_PLANNER_OUT");
      env && *env != '\0')
    return env;
  if (opts.out_dir) return *opts.out_dir;
  if (cfg) return cfg->output_dir;
  return "out";
}

}  // namespace

RunReport run(const RunOptions& opts) {
  RunReport report;
  report.command = opts.command;
  auto started = std::chrono::steady_clock::now();

  RunCtx ctx{opts, report, "out", true, true, 1};
  ctx.threads = opts.threads > 0
                    ? opts.threads
                    : std::max(1u, std::thread::hardware_concurrency());

  std::optional<ConfigFile> cfg;
  try {
    cfg = load_config(opts.config_path);
    report.config_hash = cfg->hash_hex;
    ctx.out_dir = resolve_out_dir(opts, &*cfg);
    std::string format = opts.format ? *opts.format : cfg->output_format;
    if (format != "csv" && format != "json" && format != "both")
      throw ConfigError("format must be csv, json or both");
    ctx.write_csv = format != "json";
    ctx.write_json = format != "csv";
    std::filesystem::create_directories(ctx.out_dir);

    if (opts.command == "econ") run_econ(ctx, *cfg);
    else if (opts.command == "validate") run_validate(ctx, *cfg);
    else if (opts.command == "solve-discrete") run_solve_discrete(ctx, *cfg);
    else if (opts.command == "solve-continuous")
      run_solve_continuous(ctx, *cfg);
    else if (opts.command == "oracle") run_oracle(ctx, *cfg);
    else throw ConfigError("unknown command: " + opts.command);
  } catch (const std::exception& e) {
    report.error = e.what();
  }

  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                    started)
          .count();

  if (!cfg) ctx.out_dir = resolve_out_dir(opts, nullptr);

  // The run record goes out even when the command failed.
  json j = {{"command", report.command},
            {"config", opts.config_path},
            {"config_hash", report.config_hash},
            {"wall_time_s", report.wall_time_s},
            {"warnings", report.warnings},
            {"results", report.results}};
  if (report.error) j["error"] = *report.error;
  try {
    std::filesystem::create_directories(ctx.out_dir);
    std::string path = ctx.out_dir + "/report.json";
    io::write_file(path, j.dump(2) + "\n");
    report.artifacts.push_back(path);
    j["artifacts"] = report.artifacts;
    io::write_file(path, j.dump(2) + "\n");
  } catch (const std::exception&) {
    // Out dir unusable; the report still returns to the caller.
  }

  for (const std::string& w : report.warnings) {
    if (!opts.quiet) std::cout << "warning: " << w << "\n";
  }
  if (report.error) std::cerr << "error: " << *report.error << "\n";
  return report;
}

}  // namespace trainplan::cli
