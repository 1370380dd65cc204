#pragma once

// Run configuration for the command-line front end. Parsing is strict:
// unknown keys, wrong types and invalid parameters are all configuration
// errors (ErrorKind::Config).

#include <optional>
#include <string>

#include "json.hpp"
#include "timeconsistent/de_solver.hpp"
#include "timeconsistent/discount.hpp"
#include "timeconsistent/market.hpp"
#include "timeconsistent/utility.hpp"

namespace tc {

enum class Command { Lambda, Recursion, Paths, SteadyState, DeSolve, DeCheck };

const char* to_string(Command c);
Command command_from_string(const std::string& s);

/// Terminal utility: either given explicitly or matched to the stationary
/// value of exponential discounting at `rho` in an affine market.
struct TerminalSpec {
  bool matched = true;
  std::optional<double> rho;  // matched only; defaults to the exponential discount rate
  TerminalUtility explicit_g;

  friend bool operator==(const TerminalSpec&, const TerminalSpec&) = default;
};

struct OutputSpec {
  std::string csv;
  std::string json;

  friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

struct RunConfig {
  Command command = Command::Lambda;
  std::optional<DiscountSpec> discount;
  std::optional<UtilitySpec> utility;
  std::optional<Environment> environment;
  std::optional<TerminalSpec> terminal;
  /// Flat object of numeric settings; the allowed keys depend on the command.
  nlohmann::json numerics = nlohmann::json::object();
  OutputSpec output;
  /// Grid dump read by de-check.
  std::optional<std::string> input;

  double num(const std::string& key, double fallback) const;
  friend bool operator==(const RunConfig&, const RunConfig&);
};

RunConfig config_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const RunConfig& c);

/// Reads and parses a config file; unreadable or malformed files are
/// configuration errors.
RunConfig load_config(const std::string& path);

}  // namespace tc
