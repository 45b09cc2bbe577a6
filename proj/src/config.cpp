#include "trainplan/config.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace trainplan {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) {
      if (where.empty()) fail("unknown section: " + it.key());
      fail("unknown key '" + it.key() + "' in " + where);
    }
  }
}

const json* find(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

const json& require_key(const json& obj, const std::string& where,
                        const char* key) {
  const json* v = find(obj, key);
  if (!v) fail(where + ": missing required key '" + key + "'");
  return *v;
}

double as_number(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where + ": expected a number");
  double d = v.get<double>();
  if (!std::isfinite(d)) fail(where + ": value must be finite");
  return d;
}

int as_int(const json& v, const std::string& where) {
  double d = as_number(v, where);
  if (std::floor(d) != d) fail(where + ": expected an integer");
  return static_cast<int>(d);
}

std::string as_string(const json& v, const std::string& where) {
  if (!v.is_string()) fail(where + ": expected a string");
  return v.get<std::string>();
}

double number_or(const json& obj, const std::string& where, const char* key,
                 double fallback) {
  const json* v = find(obj, key);
  return v ? as_number(*v, where + "." + key) : fallback;
}

int int_or(const json& obj, const std::string& where, const char* key,
           int fallback) {
  const json* v = find(obj, key);
  return v ? as_int(*v, where + "." + key) : fallback;
}

Interval parse_interval(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2)
    fail(where + ": expected [lo, hi]");
  Interval iv;
  iv.lo = as_number(v[0], where + "[0]");
  iv.hi = as_number(v[1], where + "[1]");
  if (iv.lo > iv.hi) fail(where + ": lo must be <= hi");
  return iv;
}

// Terminal sets admit half-open input: null stands for +/- infinity.
Interval parse_terminal(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2)
    fail(where + ": expected [lo, hi] (null allowed for an open end)");
  Interval iv;
  iv.lo = v[0].is_null() ? -std::numeric_limits<double>::infinity()
                         : as_number(v[0], where + "[0]");
  iv.hi = v[1].is_null() ? std::numeric_limits<double>::infinity()
                         : as_number(v[1], where + "[1]");
  if (iv.lo > iv.hi) fail(where + ": lo must be <= hi");
  return iv;
}

Expr parse_expr(const json& v, const std::string& where) {
  std::string src = as_string(v, where);
  try {
    return Expr::parse(src);
  } catch (const ParseError& e) {
    fail(where + ": " + e.what());
  }
}

econ::EconParams parse_econ_params(const json& obj) {
  econ::EconParams p;
  p.beta = as_number(require_key(obj, "econ", "beta"), "econ.beta");
  p.career_len =
      as_int(require_key(obj, "econ", "career_len"), "econ.career_len");
  p.study_len =
      as_int(require_key(obj, "econ", "study_len"), "econ.study_len");
  p.wage_unskilled = as_number(require_key(obj, "econ", "wage_unskilled"),
                               "econ.wage_unskilled");
  p.wage_skilled = as_number(require_key(obj, "econ", "wage_skilled"),
                             "econ.wage_skilled");
  p.tuition = as_number(require_key(obj, "econ", "tuition"), "econ.tuition");
  p.alpha_pref = number_or(obj, "econ", "alpha_pref", 1.0);
  p.fixed_cost = number_or(obj, "econ", "fixed_cost", 0.0);
  p.var_cost = number_or(obj, "econ", "var_cost", 0.0);
  p.graduates = number_or(obj, "econ", "graduates", 0.0);
  econ::validate(p);
  return p;
}

DynamicsSpec parse_dynamics(const json& obj) {
  check_keys(obj, "dynamics",
             {"f", "cost", "control_bounds", "disturbance_bounds",
              "state_domain"});
  DynamicsSpec spec;
  spec.f = parse_expr(require_key(obj, "dynamics", "f"), "dynamics.f");
  spec.cost =
      parse_expr(require_key(obj, "dynamics", "cost"), "dynamics.cost");
  spec.control_bounds =
      parse_interval(require_key(obj, "dynamics", "control_bounds"),
                     "dynamics.control_bounds");
  spec.disturbance_bounds =
      parse_interval(require_key(obj, "dynamics", "disturbance_bounds"),
                     "dynamics.disturbance_bounds");
  if (const json* sd = find(obj, "state_domain"))
    spec.state_domain = parse_interval(*sd, "dynamics.state_domain");
  validate(spec);
  return spec;
}

std::vector<Interval> parse_interval_list(const json& v,
                                          const std::string& where) {
  if (!v.is_array()) fail(where + ": expected an array of [lo, hi] pairs");
  std::vector<Interval> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(
        parse_interval(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

DiscreteProblem parse_discrete(const json& obj, const DynamicsSpec& dyn) {
  check_keys(obj, "discrete",
             {"stages", "dt", "x0", "state_grid", "state_grid_n",
              "control_grid_n", "disturbance_grid_n", "terminal_set", "mode",
              "stage_control_bounds", "stage_disturbance_bounds"});
  DiscreteProblem p;
  p.dynamics = dyn;
  p.stages = as_int(require_key(obj, "discrete", "stages"),
                    "discrete.stages");
  const json& dt = require_key(obj, "discrete", "dt");
  if (dt.is_array()) {
    p.dt.clear();
    for (std::size_t i = 0; i < dt.size(); ++i)
      p.dt.push_back(
          as_number(dt[i], "discrete.dt[" + std::to_string(i) + "]"));
  } else {
    p.dt = {as_number(dt, "discrete.dt")};
  }
  p.x0 = as_number(require_key(obj, "discrete", "x0"), "discrete.x0");
  Interval sg = parse_interval(require_key(obj, "discrete", "state_grid"),
                               "discrete.state_grid");
  p.state_grid = {sg.lo, sg.hi, int_or(obj, "discrete", "state_grid_n", 33)};
  p.control_grid_n = int_or(obj, "discrete", "control_grid_n", 33);
  p.disturbance_grid_n = int_or(obj, "discrete", "disturbance_grid_n", 33);
  if (const json* ts = find(obj, "terminal_set"))
    p.terminal_set = parse_terminal(*ts, "discrete.terminal_set");
  if (const json* mode = find(obj, "mode")) {
    std::string m = as_string(*mode, "discrete.mode");
    if (m == "min-cost") p.mode = Mode::MinCost;
    else if (m == "min-time") p.mode = Mode::MinTime;
    else fail("discrete.mode: expected \"min-cost\" or \"min-time\"");
  }
  if (const json* scb = find(obj, "stage_control_bounds"))
    p.stage_control_bounds =
        parse_interval_list(*scb, "discrete.stage_control_bounds");
  if (const json* sdb = find(obj, "stage_disturbance_bounds"))
    p.stage_disturbance_bounds =
        parse_interval_list(*sdb, "discrete.stage_disturbance_bounds");
  validate(p);
  return p;
}

ContinuousProblem parse_continuous(const json& obj, const DynamicsSpec& dyn) {
  check_keys(obj, "continuous",
             {"horizon", "x0", "state_grid", "state_grid_n", "control_grid_n",
              "disturbance_grid_n", "terminal_set", "objective",
              "base_partition", "levels"});
  ContinuousProblem p;
  p.dynamics = dyn;
  p.horizon = as_number(require_key(obj, "continuous", "horizon"),
                        "continuous.horizon");
  p.x0 = as_number(require_key(obj, "continuous", "x0"), "continuous.x0");
  Interval sg = parse_interval(require_key(obj, "continuous", "state_grid"),
                               "continuous.state_grid");
  p.state_grid = {sg.lo, sg.hi,
                  int_or(obj, "continuous", "state_grid_n", 33)};
  p.control_grid_n = int_or(obj, "continuous", "control_grid_n", 33);
  p.disturbance_grid_n = int_or(obj, "continuous", "disturbance_grid_n", 33);
  if (const json* ts = find(obj, "terminal_set"))
    p.terminal_set = parse_terminal(*ts, "continuous.terminal_set");
  if (const json* o = find(obj, "objective")) {
    std::string s = as_string(*o, "continuous.objective");
    if (s == "cost") p.objective = Objective::TotalCost;
    else if (s == "time") p.objective = Objective::TimeToTerminal;
    else fail("continuous.objective: expected \"cost\" or \"time\"");
  }
  p.base_partition = as_int(require_key(obj, "continuous", "base_partition"),
                            "continuous.base_partition");
  p.levels = int_or(obj, "continuous", "levels", 4);
  validate(p);
  return p;
}

std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

ConfigFile parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    auto [line, col] = line_column(text, e.byte);
    fail("JSON parse error at line " + std::to_string(line) + ", column " +
         std::to_string(col) + ": " + e.what());
  }
  if (!root.is_object()) fail("config root must be a JSON object");
  check_keys(root, "", {"econ", "dynamics", "discrete", "continuous",
                        "output"});

  ConfigFile cfg;
  cfg.hash_hex = fnv1a_hex(text);

  if (const json* e = find(root, "econ")) {
    if (!e->is_object()) fail("econ: expected an object");
    check_keys(*e, "econ",
               {"beta", "career_len", "study_len", "wage_unskilled",
                "wage_skilled", "tuition", "alpha_pref", "fixed_cost",
                "var_cost", "graduates", "population", "market", "need"});
    cfg.econ_params = parse_econ_params(*e);
    if (const json* pop = find(*e, "population")) {
      check_keys(*pop, "econ.population",
                 {"educated", "teachers", "students", "unskilled", "total"});
      econ::Population p;
      p.educated = as_number(require_key(*pop, "econ.population", "educated"),
                             "econ.population.educated");
      p.teachers = as_number(require_key(*pop, "econ.population", "teachers"),
                             "econ.population.teachers");
      p.students = as_number(require_key(*pop, "econ.population", "students"),
                             "econ.population.students");
      p.unskilled =
          as_number(require_key(*pop, "econ.population", "unskilled"),
                    "econ.population.unskilled");
      p.total = as_number(require_key(*pop, "econ.population", "total"),
                          "econ.population.total");
      econ::validate(p);
      cfg.population = p;
    }
    if (const json* mkt = find(*e, "market")) {
      check_keys(*mkt, "econ.market",
                 {"aggregate_supply", "aggregate_demand", "satisfied_demand",
                  "aggregate_market"});
      econ::MarketAccounts m;
      m.aggregate_supply =
          number_or(*mkt, "econ.market", "aggregate_supply", 0.0);
      m.aggregate_demand =
          number_or(*mkt, "econ.market", "aggregate_demand", 0.0);
      m.satisfied_demand =
          as_number(require_key(*mkt, "econ.market", "satisfied_demand"),
                    "econ.market.satisfied_demand");
      m.aggregate_market =
          as_number(require_key(*mkt, "econ.market", "aggregate_market"),
                    "econ.market.aggregate_market");
      cfg.market = m;
    }
    if (const json* need = find(*e, "need")) {
      check_keys(*need, "econ.need",
                 {"econ_need", "society_need", "year", "specialty"});
      econ::NeedBreakdown n;
      n.econ_need = as_number(require_key(*need, "econ.need", "econ_need"),
                              "econ.need.econ_need");
      n.society_need =
          as_number(require_key(*need, "econ.need", "society_need"),
                    "econ.need.society_need");
      n.year = int_or(*need, "econ.need", "year", 0);
      n.specialty = int_or(*need, "econ.need", "specialty", 0);
      cfg.need = n;
    }
  }

  if (const json* d = find(root, "dynamics")) {
    if (!d->is_object()) fail("dynamics: expected an object");
    cfg.dynamics = parse_dynamics(*d);
  }

  if (const json* d = find(root, "discrete")) {
    if (!d->is_object()) fail("discrete: expected an object");
    if (!cfg.dynamics)
      fail("discrete section requires a dynamics section");
    cfg.discrete = parse_discrete(*d, *cfg.dynamics);
  }

  if (const json* c = find(root, "continuous")) {
    if (!c->is_object()) fail("continuous: expected an object");
    if (!cfg.dynamics)
      fail("continuous section requires a dynamics section");
    cfg.continuous = parse_continuous(*c, *cfg.dynamics);
  }

  if (const json* o = find(root, "output")) {
    if (!o->is_object()) fail("output: expected an object");
    check_keys(*o, "output", {"dir", "format"});
    if (const json* dir = find(*o, "dir"))
      cfg.output_dir = as_string(*dir, "output.dir");
    if (const json* f = find(*o, "format")) {
      cfg.output_format = as_string(*f, "output.format");
      if (cfg.output_format != "csv" && cfg.output_format != "json" &&
          cfg.output_format != "both")
        fail("output.format: expected \"csv\", \"json\" or \"both\"");
    }
  }

  return cfg;
}

ConfigFile load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace trainplan
