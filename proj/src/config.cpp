#include "timeconsistent/config.hpp"

#include <fstream>
#include <map>

#include "timeconsistent/error.hpp"
#include "timeconsistent/json_util.hpp"

namespace tc {

namespace {

using nlohmann::json;

enum class Kind { Number, Integer, Boolean };

struct CommandInfo {
  const char* name;
  bool needs_discount, needs_utility, needs_environment, needs_terminal, needs_csv, needs_input;
  std::map<std::string, Kind> numerics;
};

const std::map<std::string, Kind> kGridKeys{
    {"horizon", Kind::Number}, {"nt", Kind::Integer},      {"k_lo", Kind::Number},
    {"k_hi", Kind::Number},    {"nk", Kind::Integer},      {"substeps", Kind::Integer},
    {"tol", Kind::Number},     {"damping", Kind::Number},  {"max_iter", Kind::Integer},
    {"strict_window", Kind::Boolean}, {"seed", Kind::Integer}};

const CommandInfo& info(Command c) {
  static const std::map<Command, CommandInfo> table{
      {Command::Lambda, {"lambda", true, true, true, false, false, false, {{"seed", Kind::Integer}}}},
      {Command::Recursion,
       {"recursion", true, true, true, false, true, false,
        {{"step", Kind::Number},
         {"tol", Kind::Number},
         {"damping", Kind::Number},
         {"max_iter", Kind::Integer},
         {"seed", Kind::Integer}}}},
      {Command::Paths,
       {"paths", true, true, true, false, true, false,
        {{"k0", Kind::Number}, {"horizon", Kind::Number}, {"step", Kind::Number},
         {"seed", Kind::Integer}}}},
      {Command::SteadyState,
       {"steady-state", true, false, true, false, true, false,
        {{"k_min", Kind::Number},
         {"k_max", Kind::Number},
         {"k_points", Kind::Integer},
         {"log_spacing", Kind::Boolean},
         {"seed", Kind::Integer}}}},
      {Command::DeSolve, {"de-solve", true, true, true, true, true, false, kGridKeys}},
      {Command::DeCheck, {"de-check", true, true, true, true, true, true, kGridKeys}},
  };
  return table.at(c);
}

json numerics_from_json(const json& j, Command c) {
  const std::string ctx = "numerics";
  jsonu::expect_object(j, ctx);
  const auto& allowed = info(c).numerics;
  for (const auto& [key, value] : j.items()) {
    const auto it = allowed.find(key);
    if (it == allowed.end())
      jsonu::config_error(ctx, "unknown key '" + key + "' for command " + info(c).name);
    switch (it->second) {
      case Kind::Number:
        if (!value.is_number()) jsonu::config_error(ctx, "key '" + key + "' must be a number");
        break;
      case Kind::Integer:
        if (!value.is_number_integer())
          jsonu::config_error(ctx, "key '" + key + "' must be an integer");
        break;
      case Kind::Boolean:
        if (!value.is_boolean()) jsonu::config_error(ctx, "key '" + key + "' must be a boolean");
        break;
    }
  }
  return j;
}

TerminalSpec terminal_from_json(const json& j) {
  const std::string ctx = "terminal";
  jsonu::expect_object(j, ctx);
  const std::string type = jsonu::string(j, "type", ctx);
  TerminalSpec t;
  if (type == "matched") {
    jsonu::check_keys(j, {"type", "rho"}, ctx);
    t.matched = true;
    if (j.contains("rho")) {
      t.rho = jsonu::number(j, "rho", ctx);
      if (!(*t.rho > 0)) jsonu::config_error(ctx, "rho must be > 0");
    }
  } else if (type == "crra") {
    jsonu::check_keys(j, {"type", "scale", "shift", "offset"}, ctx);
    t.matched = false;
    t.explicit_g = {jsonu::number_or(j, "scale", 1.0, ctx), jsonu::number_or(j, "shift", 0.0, ctx),
                    jsonu::number_or(j, "offset", 0.0, ctx)};
    if (!(t.explicit_g.scale > 0)) jsonu::config_error(ctx, "scale must be > 0");
  } else {
    jsonu::config_error(ctx, "unknown terminal type '" + type + "'");
  }
  return t;
}

json terminal_to_json(const TerminalSpec& t) {
  if (t.matched) {
    json j{{"type", "matched"}};
    if (t.rho) j["rho"] = *t.rho;
    return j;
  }
  return {{"type", "crra"},
          {"scale", t.explicit_g.scale},
          {"shift", t.explicit_g.shift},
          {"offset", t.explicit_g.offset}};
}

}  // namespace

const char* to_string(Command c) { return info(c).name; }

Command command_from_string(const std::string& s) {
  for (Command c : {Command::Lambda, Command::Recursion, Command::Paths, Command::SteadyState,
                    Command::DeSolve, Command::DeCheck})
    if (s == info(c).name) return c;
  jsonu::config_error("command", "unknown command '" + s + "'");
}

double RunConfig::num(const std::string& key, double fallback) const {
  const auto it = numerics.find(key);
  if (it == numerics.end()) return fallback;
  if (it->is_boolean()) return it->get<bool>() ? 1.0 : 0.0;
  return it->get<double>();
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  return a.command == b.command && a.discount == b.discount && a.utility == b.utility &&
         a.environment == b.environment && a.terminal == b.terminal &&
         a.numerics == b.numerics && a.output == b.output && a.input == b.input;
}

RunConfig config_from_json(const json& j) {
  const std::string ctx = "config";
  jsonu::check_keys(j,
                    {"command", "discount", "utility", "environment", "terminal", "numerics",
                     "output", "input"},
                    ctx);
  RunConfig c;
  c.command = command_from_string(jsonu::string(j, "command", ctx));
  const auto& ci = info(c.command);
  auto need = [&](bool required, const char* key) {
    if (required && !j.contains(key))
      jsonu::config_error(ctx, std::string("command ") + ci.name + " needs '" + key + "'");
    if (!required && j.contains(key))
      jsonu::config_error(ctx, std::string("command ") + ci.name + " does not use '" + key + "'");
  };
  need(ci.needs_discount, "discount");
  need(ci.needs_utility, "utility");
  need(ci.needs_environment, "environment");
  need(ci.needs_terminal, "terminal");
  need(ci.needs_input, "input");

  if (j.contains("discount")) c.discount = discount_from_json(j.at("discount"));
  if (j.contains("utility")) {
    const auto& u = j.at("utility");
    jsonu::check_keys(u, {"gamma"}, "utility");
    const double g = jsonu::number(u, "gamma", "utility");
    if (!(g > 0)) jsonu::config_error("utility", "gamma must be > 0");
    c.utility = UtilitySpec(g);
  }
  if (j.contains("environment")) c.environment = environment_from_json(j.at("environment"));
  if (j.contains("terminal")) c.terminal = terminal_from_json(j.at("terminal"));
  if (j.contains("numerics")) c.numerics = numerics_from_json(j.at("numerics"), c.command);
  if (j.contains("input")) c.input = jsonu::string(j, "input", ctx);

  if (!j.contains("output")) jsonu::config_error(ctx, "missing required key 'output'");
  const auto& o = j.at("output");
  jsonu::check_keys(o, {"csv", "json"}, "output");
  c.output.json = jsonu::string(o, "json", "output");
  if (ci.needs_csv)
    c.output.csv = jsonu::string(o, "csv", "output");
  else if (o.contains("csv"))
    jsonu::config_error("output", std::string("command ") + ci.name + " writes no CSV");
  if (c.output.json.empty() || (ci.needs_csv && c.output.csv.empty()))
    jsonu::config_error("output", "paths must not be empty");
  return c;
}

void to_json(json& j, const RunConfig& c) {
  j = json::object();
  j["command"] = to_string(c.command);
  if (c.discount) j["discount"] = *c.discount;
  if (c.utility) j["utility"] = {{"gamma", c.utility->gamma()}};
  if (c.environment) j["environment"] = *c.environment;
  if (c.terminal) j["terminal"] = terminal_to_json(*c.terminal);
  if (!c.numerics.empty()) j["numerics"] = c.numerics;
  if (c.input) j["input"] = *c.input;
  j["output"] = {{"json", c.output.json}};
  if (!c.output.csv.empty()) j["output"]["csv"] = c.output.csv;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) jsonu::config_error("config", "cannot read '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    jsonu::config_error("config", "'" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

}  // namespace tc
