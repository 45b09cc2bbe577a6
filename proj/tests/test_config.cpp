#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "trainplan/config.hpp"
#include "trainplan/run.hpp"

using namespace trainplan;
namespace fs = std::filesystem;

namespace {

const char* kEconOnly = R"({
  "econ": {
    "beta": 0.9, "career_len": 40, "study_len": 5,
    "wage_unskilled": 1.0, "wage_skilled": 2.5, "tuition": 0.8
  }
})";

const char* kInstanceB = R"({
  "dynamics": {
    "f": "t - a",
    "cost": "x^2 + t",
    "control_bounds": [0, 1],
    "disturbance_bounds": [0, 1]
  },
  "discrete": {
    "stages": 2,
    "dt": 1.0,
    "x0": 0.0,
    "state_grid": [-2, 2],
    "state_grid_n": 5,
    "control_grid_n": 2,
    "disturbance_grid_n": 2,
    "mode": "min-cost"
  }
})";

std::string write_temp(const std::string& name, const std::string& text) {
  fs::path dir = fs::temp_directory_path() / "trainplan_test";
  fs::create_directories(dir);
  fs::path p = dir / name;
  std::ofstream out(p);
  out << text;
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("minimal econ config loads with defaults") {
  ConfigFile cfg = parse_config(kEconOnly);
  REQUIRE(cfg.econ_params.has_value());
  CHECK(cfg.econ_params->alpha_pref == 1.0);
  CHECK(cfg.econ_params->fixed_cost == 0.0);
  CHECK(cfg.output_dir == "out");
  CHECK(cfg.output_format == "both");
  CHECK_FALSE(cfg.dynamics.has_value());
  CHECK(cfg.hash_hex.size() == 16);
}

TEST_CASE("invariant violations name the field") {
  std::string bad = kEconOnly;
  bad.replace(bad.find("0.9"), 3, "1.5");
  try {
    parse_config(bad);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("beta must lie in (0,1)") !=
          std::string::npos);
  }
}

TEST_CASE("unknown sections and keys are rejected") {
  try {
    parse_config(R"({"ecom": {}})");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("unknown section: ecom") !=
          std::string::npos);
  }

  std::string extra = kInstanceB;
  extra.replace(extra.find("\"stages\""), 8, "\"stagez\"");
  try {
    parse_config(extra);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("stagez") != std::string::npos);
  }
}

TEST_CASE("JSON syntax errors carry line and column") {
  try {
    parse_config("{\n  \"econ\": [,]\n}");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    std::string msg = e.what();
    CHECK(msg.find("line 2") != std::string::npos);
    CHECK(msg.find("column") != std::string::npos);
  }
}

TEST_CASE("bad expressions are reported with their field") {
  std::string bad = kInstanceB;
  bad.replace(bad.find("t - a"), 5, "t +++");
  try {
    parse_config(bad);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("dynamics.f") != std::string::npos);
  }
}

TEST_CASE("discrete section builds a full problem") {
  ConfigFile cfg = parse_config(kInstanceB);
  REQUIRE(cfg.discrete.has_value());
  const DiscreteProblem& p = *cfg.discrete;
  CHECK(p.stages == 2);
  CHECK(p.state_grid.n == 5);
  CHECK(p.control_grid_n == 2);
  CHECK(p.mode == Mode::MinCost);
  CHECK_FALSE(p.terminal_set.has_value());
}

TEST_CASE("discrete without dynamics is rejected") {
  const char* no_dyn = R"({"discrete": {"stages": 1, "dt": 1, "x0": 0,
                           "state_grid": [0, 1]}})";
  CHECK_THROWS_AS(parse_config(no_dyn), ConfigError);
}

TEST_CASE("terminal set accepts an open end") {
  std::string text = kInstanceB;
  text.replace(text.find("\"mode\": \"min-cost\""), 18,
               std::string("\"mode\": \"min-time\",\n    ") +
                   "\"terminal_set\": [1, null]");
  ConfigFile cfg = parse_config(text);
  REQUIRE(cfg.discrete.has_value());
  REQUIRE(cfg.discrete->terminal_set.has_value());
  CHECK(cfg.discrete->terminal_set->lo == 1.0);
  CHECK(std::isinf(cfg.discrete->terminal_set->hi));
}

TEST_CASE("run econ writes artifacts and a report") {
  std::string cfg_path = write_temp("econ.json", kEconOnly);
  fs::path out = fs::temp_directory_path() / "trainplan_test" / "econ_out";
  fs::remove_all(out);

  cli::RunOptions opts;
  opts.command = "econ";
  opts.config_path = cfg_path;
  opts.out_dir = out.string();
  opts.quiet = true;
  cli::RunReport rep = cli::run(opts);

  CHECK_FALSE(rep.error.has_value());
  CHECK(fs::exists(out / "econ.csv"));
  CHECK(fs::exists(out / "report.json"));
  CHECK(rep.results["econ"].contains("tuition_price"));
}

TEST_CASE("run econ with study_len 1 fails but still reports") {
  std::string bad = kEconOnly;
  bad.replace(bad.find("\"study_len\": 5"), 14, "\"study_len\": 1");
  std::string cfg_path = write_temp("econ_bad.json", bad);
  fs::path out = fs::temp_directory_path() / "trainplan_test" / "econ_bad";
  fs::remove_all(out);

  cli::RunOptions opts;
  opts.command = "econ";
  opts.config_path = cfg_path;
  opts.out_dir = out.string();
  opts.quiet = true;
  cli::RunReport rep = cli::run(opts);

  REQUIRE(rep.error.has_value());
  CHECK(rep.error->find("degenerate denominator") != std::string::npos);
  CHECK(fs::exists(out / "report.json"));
  CHECK(slurp((out / "report.json").string()).find("degenerate") !=
        std::string::npos);
}

TEST_CASE("missing sections are reported per command") {
  std::string cfg_path = write_temp("econ2.json", kEconOnly);
  cli::RunOptions opts;
  opts.command = "solve-discrete";
  opts.config_path = cfg_path;
  opts.out_dir =
      (fs::temp_directory_path() / "trainplan_test" / "missing").string();
  opts.quiet = true;
  cli::RunReport rep = cli::run(opts);
  REQUIRE(rep.error.has_value());
  CHECK(rep.error->find("missing section: discrete") != std::string::npos);
}

TEST_CASE("solve-discrete run is deterministic byte for byte") {
  std::string cfg_path = write_temp("instance_b.json", kInstanceB);
  fs::path out1 = fs::temp_directory_path() / "trainplan_test" / "det1";
  fs::path out2 = fs::temp_directory_path() / "trainplan_test" / "det2";
  fs::remove_all(out1);
  fs::remove_all(out2);

  cli::RunOptions opts;
  opts.command = "solve-discrete";
  opts.config_path = cfg_path;
  opts.quiet = true;
  opts.out_dir = out1.string();
  cli::RunReport rep1 = cli::run(opts);
  opts.out_dir = out2.string();
  cli::RunReport rep2 = cli::run(opts);

  REQUIRE_FALSE(rep1.error.has_value());
  REQUIRE_FALSE(rep2.error.has_value());
  CHECK(rep1.results["discrete"]["value_at_x0"] == 1.0);
  CHECK(slurp((out1 / "value.csv").string()) ==
        slurp((out2 / "value.csv").string()));
  CHECK(slurp((out1 / "policy.csv").string()) ==
        slurp((out2 / "policy.csv").string()));
  CHECK(!slurp((out1 / "value.csv").string()).empty());
}

TEST_CASE("environment variable overrides the output directory") {
  std::string cfg_path = write_temp("econ3.json", kEconOnly);
  fs::path env_out = fs::temp_directory_path() / "trainplan_test" / "env_out";
  fs::path flag_out =
      fs::temp_directory_path() / "trainplan_test" / "flag_out";
  fs::remove_all(env_out);
  fs::remove_all(flag_out);

  setenv("TRAINING_PLANNER_OUT", env_out.string().c_str(), 1);
  cli::RunOptions opts;
  opts.command = "econ";
  opts.config_path = cfg_path;
  opts.out_dir = flag_out.string();
  opts.quiet = true;
  cli::RunReport rep = cli::run(opts);
  unsetenv("TRAINING_PLANNER_OUT");

  CHECK_FALSE(rep.error.has_value());
  CHECK(fs::exists(env_out / "report.json"));
  CHECK_FALSE(fs::exists(flag_out / "report.json"));
}

TEST_CASE("format selection controls which artifacts appear") {
  std::string cfg_path = write_temp("instance_b2.json", kInstanceB);
  fs::path out = fs::temp_directory_path() / "trainplan_test" / "json_only";
  fs::remove_all(out);

  cli::RunOptions opts;
  opts.command = "solve-discrete";
  opts.config_path = cfg_path;
  opts.out_dir = out.string();
  opts.format = "json";
  opts.quiet = true;
  cli::RunReport rep = cli::run(opts);

  REQUIRE_FALSE(rep.error.has_value());
  CHECK_FALSE(fs::exists(out / "value.csv"));
  CHECK(fs::exists(out / "report.json"));
  CHECK(rep.results["discrete"].contains("value_table"));
}

TEST_CASE("oracle command on a config") {
  const char* text = R"({
    "dynamics": {"f": "0", "cost": "(t - a)^2",
                 "control_bounds": [0, 1], "disturbance_bounds": [0, 1]},
    "discrete": {"stages": 1, "dt": 1.0, "x0": 0.0,
                 "state_grid": [-1, 1], "state_grid_n": 3,
                 "control_grid_n": 2, "disturbance_grid_n": 2}
  })";
  std::string cfg_path = write_temp("instance_a.json", text);
  fs::path out = fs::temp_directory_path() / "trainplan_test" / "oracle_out";
  fs::remove_all(out);

  cli::RunOptions opts;
  opts.command = "oracle";
  opts.config_path = cfg_path;
  opts.out_dir = out.string();
  opts.quiet = true;
  cli::RunReport rep = cli::run(opts);

  REQUIRE_FALSE(rep.error.has_value());
  CHECK(rep.results["oracle"]["value"] == 1.0);
  CHECK(rep.results["oracle"]["leaf_count"] == 4);
}
