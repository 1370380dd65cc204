#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "check.hpp"
#include "timeconsistent/cli.hpp"
#include "timeconsistent/config.hpp"

using namespace tc;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() / ("tc_cli_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string at(const std::string& name) const { return (dir / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json lambda_config(const Scratch& s) {
  return {{"command", "lambda"},
          {"discount", {{"family", "mixture"}, {"omega", 0.5}, {"rho1", 0.02}, {"rho2", 0.1}}},
          {"utility", {{"gamma", 2}}},
          {"environment", {{"type", "market"}, {"r", 0.03}, {"w", 1}}},
          {"output", {{"json", s.at("lambda.json")}}}};
}

json de_config(const Scratch& s) {
  return {{"command", "de-solve"},
          {"discount", {{"family", "exponential"}, {"rho", 0.05}}},
          {"utility", {{"gamma", 2}}},
          {"environment", {{"type", "market"}, {"r", 0.03}, {"w", 1}}},
          {"terminal", {{"type", "matched"}}},
          {"numerics", {{"horizon", 4}, {"nt", 8}, {"k_lo", 1}, {"k_hi", 10}, {"nk", 9}}},
          {"output", {{"json", s.at("de.json")}, {"csv", s.at("de.csv")}}}};
}

std::optional<ErrorKind> parse_kind(const json& j) {
  return error_kind([&] { config_from_json(j); });
}

}  // namespace

TEST_CASE("config round trip") {
  Scratch s;
  for (const json& j : {lambda_config(s), de_config(s)}) {
    const auto c = config_from_json(j);
    json back;
    to_json(back, c);
    CHECK(config_from_json(back) == c);
  }
  json rich = de_config(s);
  rich["environment"]["r"] = {{"type", "piecewise_constant"}, {"breaks", {2.0}}, {"values", {0.02, 0.04}}};
  rich["terminal"] = {{"type", "crra"}, {"scale", 2.0}, {"shift", 1.0}, {"offset", -3.0}};
  const auto c = config_from_json(rich);
  json back;
  to_json(back, c);
  CHECK(config_from_json(back) == c);
  CHECK(c.num("nt", 0) == 8);
  CHECK(c.num("missing", 7.5) == 7.5);
}

TEST_CASE("strict parsing") {
  Scratch s;
  auto j = lambda_config(s);
  j["extra"] = 1;
  CHECK(parse_kind(j) == ErrorKind::Config);

  j = lambda_config(s);
  j["discount"]["beta"] = 0.5;
  CHECK(parse_kind(j) == ErrorKind::Config);

  j = lambda_config(s);
  j["discount"]["rho1"] = "0.02";
  CHECK(parse_kind(j) == ErrorKind::Config);

  j = lambda_config(s);
  j["discount"]["omega"] = 1.5;  // invalid parameter, reported as configuration error
  CHECK(parse_kind(j) == ErrorKind::Config);

  j = lambda_config(s);
  j["numerics"] = {{"nt", 3}};  // grid key on a command without a grid
  CHECK(parse_kind(j) == ErrorKind::Config);

  j = lambda_config(s);
  j["terminal"] = {{"type", "matched"}};
  CHECK(parse_kind(j) == ErrorKind::Config);

  j = lambda_config(s);
  j["output"]["csv"] = s.at("x.csv");
  CHECK(parse_kind(j) == ErrorKind::Config);

  j = de_config(s);
  j["numerics"]["nt"] = 2.5;
  CHECK(parse_kind(j) == ErrorKind::Config);

  j = de_config(s);
  j.erase("terminal");
  CHECK(parse_kind(j) == ErrorKind::Config);

  j = lambda_config(s);
  j["command"] = "solve";
  CHECK(parse_kind(j) == ErrorKind::Config);

  j = lambda_config(s);
  j["environment"]["r"] = 0.0;  // human wealth diverges
  CHECK(parse_kind(j) == ErrorKind::Config);

  CHECK(error_kind([] { load_config("/nonexistent/config.json"); }) == ErrorKind::Config);
  std::ofstream(s.at("bad.json")) << "{\"command\": ";
  CHECK(error_kind([&] { load_config(s.at("bad.json")); }) == ErrorKind::Config);
}

TEST_CASE("run writes artifacts and exit codes") {
  Scratch s;
  std::ostringstream err;
  CHECK(cli::run(config_from_json(lambda_config(s)), err) == cli::kExitOk);
  const auto report = json::parse(slurp(s.at("lambda.json")));
  CHECK(report["lambda"].get<double>() == doctest::Approx(0.031357919263));
  CHECK(config_from_json(report["config"]) == config_from_json(lambda_config(s)));

  // same input, same bytes
  const std::string first = slurp(s.at("lambda.json"));
  CHECK(cli::run(config_from_json(lambda_config(s)), err) == cli::kExitOk);
  CHECK(slurp(s.at("lambda.json")) == first);

  // a precondition failure leaves no artifacts behind
  auto j = lambda_config(s);
  j["discount"] = {{"family", "generalized_hyperbolic"}, {"a", 0.5}, {"b", 1.2}, {"rho", 0.05}};
  j["utility"]["gamma"] = 3;
  j["output"]["json"] = s.at("none.json");
  CHECK(cli::run(config_from_json(j), err) == cli::kExitError);
  CHECK_FALSE(fs::exists(s.at("none.json")));

  // non-convergence: exit 2, report with the residual history
  j = de_config(s);
  j["discount"] = {{"family", "mixture"}, {"omega", 0.5}, {"rho1", 0.02}, {"rho2", 0.1}};
  j["terminal"]["rho"] = 0.06;
  j["numerics"]["max_iter"] = 1;
  j["numerics"]["tol"] = 1e-14;
  CHECK(cli::run(config_from_json(j), err) == cli::kExitNonConvergence);
  const auto nc = json::parse(slurp(s.at("de.json")));
  CHECK(nc["status"] == "non_convergence");
  CHECK(nc["residual_history"].size() == 1);
  CHECK_FALSE(fs::exists(s.at("de.csv")));
}

TEST_CASE("de-solve then de-check") {
  Scratch s;
  std::ostringstream err;
  CHECK(cli::run(config_from_json(de_config(s)), err) == cli::kExitOk);
  auto j = de_config(s);
  j["command"] = "de-check";
  j["input"] = s.at("de.csv");
  j["output"] = {{"json", s.at("check.json")}, {"csv", s.at("check.csv")}};
  CHECK(cli::run(config_from_json(j), err) == cli::kExitOk);
  const auto r = json::parse(slurp(s.at("check.json")));
  const auto solved = json::parse(slurp(s.at("de.json")));
  CHECK(r["max_de_residual_clean"].get<double>() ==
        doctest::Approx(solved["max_de_residual_clean"].get<double>()).epsilon(1e-6));

  // dump from a different grid is rejected
  j["numerics"]["nk"] = 10;
  j["output"]["json"] = s.at("check2.json");
  CHECK(cli::run(config_from_json(j), err) == cli::kExitError);
  CHECK_FALSE(fs::exists(s.at("check2.json")));
}

TEST_CASE("command line") {
  Scratch s;
  const std::string cfg = s.at("cfg.json");
  std::ofstream(cfg) << lambda_config(s).dump();
  auto call = [](std::vector<std::string> args) {
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return cli::main(static_cast<int>(argv.size()), argv.data());
  };
  CHECK(call({"tcc", "lambda", "-c", cfg}) == cli::kExitOk);
  CHECK(call({"tcc", "paths", "-c", cfg}) == cli::kExitError);  // subcommand mismatch
  CHECK(call({"tcc", "lambda"}) == cli::kExitError);
  CHECK(call({"tcc", "lambda", "-c", s.at("missing.json")}) == cli::kExitError);
}
