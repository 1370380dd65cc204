#include "timeconsistent/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "CLI11.hpp"
#include "timeconsistent/de_solver.hpp"
#include "timeconsistent/error.hpp"
#include "timeconsistent/json_util.hpp"
#include "timeconsistent/numerics.hpp"
#include "timeconsistent/propensity.hpp"
#include "timeconsistent/recursion.hpp"
#include "timeconsistent/steady_state.hpp"
#include "timeconsistent/trajectory.hpp"

namespace tc::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Artifacts are collected first and written together at the end.
struct Artifacts {
  std::string csv;
  json report = json::object();
};

class Csv {
 public:
  explicit Csv(std::initializer_list<const char*> header) {
    bool first = true;
    for (const char* h : header) {
      if (!first) out_ << ',';
      out_ << h;
      first = false;
    }
    out_ << '\n';
  }
  Csv& cell(double x) {
    sep();
    out_ << num::fmt17(x);
    return *this;
  }
  Csv& cell(const std::string& s) {
    sep();
    out_ << s;
    return *this;
  }
  void end() {
    out_ << '\n';
    fresh_ = true;
  }
  std::string str() const { return out_.str(); }

 private:
  void sep() {
    if (!fresh_) out_ << ',';
    fresh_ = false;
  }
  std::ostringstream out_;
  bool fresh_ = true;
};

const MarketPath& need_market(const RunConfig& c) {
  const auto* m = c.environment->market();
  if (!m) jsonu::config_error("environment", std::string(to_string(c.command)) + " needs a market");
  return *m;
}

// Constant (r, w) from a market with constant paths or an affine technology.
std::pair<double, double> constant_rates(const RunConfig& c) {
  if (const auto* m = c.environment->market()) {
    if (!m->r.breakpoints().empty() || !m->w.breakpoints().empty() ||
        !std::holds_alternative<TimeFunction::Constant>(m->r.repr()) ||
        !std::holds_alternative<TimeFunction::Constant>(m->w.repr()))
      jsonu::config_error("environment",
                          std::string(to_string(c.command)) + " needs constant r and w");
    return {m->r(0.0), m->w(0.0)};
  }
  if (const auto* a = std::get_if<AffineCapital>(&c.environment->production()->repr()))
    return {a->r, a->w};
  jsonu::config_error("environment",
                      std::string(to_string(c.command)) + " needs constant r and w");
}

json margin_json(double m) { return std::isfinite(m) ? json(m) : json(nullptr); }

Artifacts run_lambda(const RunConfig& c) {
  const auto [r, w] = constant_rates(c);
  (void)w;
  const auto res = lambda_constant(*c.discount, r, c.utility->gamma());
  Artifacts a;
  a.report = {{"lambda", res.lambda()},
              {"margin", margin_json(res.integrability_margin())},
              {"method", to_string(res.method())},
              {"roots_found", res.roots_found()},
              {"notes", res.notes()}};
  return a;
}

Artifacts run_recursion(const RunConfig& c) {
  const auto& m = need_market(c);
  RecursionOptions opt;
  opt.step = c.num("step", opt.step);
  opt.tol = c.num("tol", opt.tol);
  opt.damping = c.num("damping", opt.damping);
  opt.max_iter = static_cast<int>(c.num("max_iter", opt.max_iter));
  const auto res = solve_recursion(*c.discount, m, c.utility->gamma(), opt);
  const auto& g = res.path.grid();
  const auto hw = human_wealth_on(m, g);
  Csv csv({"t", "lambda", "human_wealth"});
  for (std::size_t i = 0; i < g.size(); ++i) {
    csv.cell(g[i]).cell(res.path.values()[i]).cell(hw[i]);
    csv.end();
  }
  Artifacts a;
  a.csv = csv.str();
  a.report = {{"status", "converged"},
              {"iterations", res.iterations},
              {"residual", res.residual},
              {"final_damping", res.final_damping},
              {"residual_history", res.residual_history}};
  return a;
}

Artifacts run_paths(const RunConfig& c) {
  const auto [r, w] = constant_rates(c);
  const double gamma = c.utility->gamma();
  const double k0 = c.num("k0", 1.0);
  const double horizon = c.num("horizon", 60.0);
  const double step = c.num("step", 0.01);
  const double lam_eq = lambda_constant(*c.discount, r, gamma).lambda();
  const double lam_naive = naive_propensity(*c.discount, r, gamma);
  const auto eq = constant_propensity_path(lam_eq, r, w, k0, horizon, step, "equilibrium");
  const auto pre = precommitment_path(*c.discount, r, w, gamma, k0, horizon, step);
  const auto nv = constant_propensity_path(lam_naive, r, w, k0, horizon, step, "naive");
  Csv csv({"t", "k_eq", "c_eq", "k_pre", "c_pre", "k_naive", "c_naive"});
  for (std::size_t i = 0; i < eq.times.size(); ++i) {
    csv.cell(eq.times[i]).cell(eq.capital[i]).cell(eq.consumption[i]);
    csv.cell(pre.capital[i]).cell(pre.consumption[i]);
    csv.cell(nv.capital[i]).cell(nv.consumption[i]);
    csv.end();
  }
  Artifacts a;
  a.csv = csv.str();
  a.report = {{"lambda_equilibrium", lam_eq},
              {"lambda_naive", lam_naive},
              {"lambda_precommitment_t0", lam_naive}};
  return a;
}

Artifacts run_steady_state(const RunConfig& c) {
  const auto* f = c.environment->production();
  if (!f) jsonu::config_error("environment", "steady-state needs a production function");
  const double lo = c.num("k_min", 0.1);
  const double hi = c.num("k_max", 100.0);
  const auto n = static_cast<std::size_t>(c.num("k_points", 200));
  if (!(lo > 0 && hi > lo && n >= 2))
    jsonu::config_error("numerics", "need 0 < k_min < k_max and k_points >= 2");
  const bool log_spacing = c.num("log_spacing", 1.0) != 0.0;
  const auto grid = log_spacing ? num::logspace(lo, hi, n) : num::linspace(lo, hi, n);
  const auto rep = scan_equilibrium_points(*c.discount, *f, grid);
  Csv csv({"k", "fprime", "alpha", "status", "admissible"});
  std::size_t admissible = 0;
  for (const auto& row : rep.rows) {
    csv.cell(row.k).cell(row.fprime);
    if (row.alpha.status == AlphaStatus::Solved)
      csv.cell(row.alpha.alpha);
    else
      csv.cell(std::string());
    csv.cell(std::string(to_string(row.alpha.status)));
    csv.cell(std::string(row.alpha.admissible ? "1" : "0"));
    csv.end();
    admissible += row.alpha.admissible;
  }
  Artifacts a;
  a.csv = csv.str();
  a.report = {{"points", rep.rows.size()}, {"admissible_points", admissible}};
  a.report["admissible_fprime"] = rep.admissible_fprime
                                      ? json::array({rep.admissible_fprime->first,
                                                     rep.admissible_fprime->second})
                                      : json(nullptr);
  a.report["admissible_k"] =
      rep.admissible_k ? json::array({rep.admissible_k->first, rep.admissible_k->second})
                       : json(nullptr);
  return a;
}

GridSpec grid_spec(const RunConfig& c) {
  GridSpec s;
  s.horizon = c.num("horizon", s.horizon);
  s.nt = static_cast<int>(c.num("nt", s.nt));
  s.k_lo = c.num("k_lo", s.k_lo);
  s.k_hi = c.num("k_hi", s.k_hi);
  s.nk = static_cast<int>(c.num("nk", s.nk));
  s.substeps = static_cast<int>(c.num("substeps", s.substeps));
  try {
    validate(s);
  } catch (const Error& e) {
    jsonu::config_error("numerics", e.what());
  }
  return s;
}

TerminalUtility terminal(const RunConfig& c) {
  const auto& t = *c.terminal;
  if (!t.matched) return t.explicit_g;
  double rho = 0.0;
  if (t.rho)
    rho = *t.rho;
  else if (const auto* e = c.discount->as<Exponential>())
    rho = e->rho;
  else
    jsonu::config_error("terminal", "matched terminal needs 'rho' for a non-exponential discount");
  const auto [r, w] = constant_rates(c);
  return matched_terminal(*c.utility, rho, r, w);
}

void write_grid(Csv& csv, const ValueGrid& g) {
  for (int i = 0; i <= g.spec.nt; ++i)
    for (int j = 0; j <= g.spec.nk; ++j) {
      csv.cell(g.t_grid[i]).cell(g.k_grid[j]).cell(g.v(i, j)).cell(g.s(i, j));
      csv.cell(std::string(g.tainted[g.index(i, j)] ? "1" : "0"));
      csv.end();
    }
}

// Largest |DE residual| over interior nodes with an untainted stencil.
double max_de_residual(const ValueGrid& g, const RunConfig& c) {
  double worst = 0.0;
  for (int i = 1; i < g.spec.nt; ++i)
    for (int j = 1; j < g.spec.nk; ++j)
      if (g.clean_stencil(i, j))
        worst = std::max(worst, std::abs(de_residual(g, *c.discount, *c.utility,
                                                     *c.environment, i, j)));
  return worst;
}

Artifacts run_de_solve(const RunConfig& c) {
  IeOptions opt;
  opt.tol = c.num("tol", opt.tol);
  opt.damping = c.num("damping", opt.damping);
  opt.max_iter = static_cast<int>(c.num("max_iter", opt.max_iter));
  opt.strict_window = c.num("strict_window", 0.0) != 0.0;
  const auto g =
      solve_ie(*c.discount, *c.utility, *c.environment, terminal(c), grid_spec(c), opt);
  Csv csv({"t", "k", "V", "sigma", "tainted"});
  write_grid(csv, g);
  Artifacts a;
  a.csv = csv.str();
  a.report = {{"status", "converged"},
              {"iterations", g.iterations},
              {"residual_history", g.residual_history},
              {"tainted_nodes", g.tainted_count()},
              {"max_de_residual_clean", max_de_residual(g, c)}};
  return a;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

ValueGrid read_grid(const RunConfig& c) {
  const std::string ctx = "input";
  ValueGrid g(grid_spec(c), terminal(c));
  std::ifstream in(*c.input);
  if (!in) jsonu::config_error(ctx, "cannot read '" + *c.input + "'");
  std::string line;
  std::getline(in, line);
  if (line.rfind("t,k,V,sigma", 0) != 0)
    jsonu::config_error(ctx, "expected a header starting with t,k,V,sigma");
  std::size_t idx = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() < 4 || idx >= g.V.size())
      jsonu::config_error(ctx, "grid dump does not match the configured grid");
    double t, k;
    try {
      t = std::stod(cells[0]);
      k = std::stod(cells[1]);
      g.V[idx] = std::stod(cells[2]);
      g.sigma[idx] = std::stod(cells[3]);
      g.tainted[idx] = cells.size() > 4 && cells[4] == "1";
    } catch (const std::exception&) {
      jsonu::config_error(ctx, "unparsable number in line " + std::to_string(idx + 2));
    }
    const auto cols = static_cast<std::size_t>(g.spec.nk) + 1;
    if (std::abs(t - g.t_grid[idx / cols]) > 1e-9 * (1 + std::abs(t)) ||
        std::abs(k - g.k_grid[idx % cols]) > 1e-9 * (1 + std::abs(k)))
      jsonu::config_error(ctx, "grid dump coordinates do not match the configured grid");
    ++idx;
  }
  if (idx != g.V.size()) jsonu::config_error(ctx, "grid dump has the wrong number of nodes");
  return g;
}

Artifacts run_de_check(const RunConfig& c) {
  const auto g = read_grid(c);
  Csv csv({"t", "k", "de_residual", "ie_residual", "excluded"});
  double worst_de = 0.0, worst_ie = 0.0;
  for (int i = 1; i < g.spec.nt; ++i)
    for (int j = 1; j < g.spec.nk; ++j) {
      const double de = de_residual(g, *c.discount, *c.utility, *c.environment, i, j);
      const auto ie = ie_evaluate(g, *c.discount, *c.utility, *c.environment, g.t_grid[i],
                                  g.k_grid[j], 2 * g.spec.substeps);
      const double ie_res = g.v(i, j) - ie.value;
      const bool bad = !g.clean_stencil(i, j) || ie.tainted;
      csv.cell(g.t_grid[i]).cell(g.k_grid[j]).cell(de).cell(ie_res);
      csv.cell(std::string(bad ? "1" : "0"));
      csv.end();
      if (!bad) {
        worst_de = std::max(worst_de, std::abs(de));
        worst_ie = std::max(worst_ie, std::abs(ie_res));
      }
    }
  Artifacts a;
  a.csv = csv.str();
  a.report = {{"max_de_residual_clean", worst_de}, {"max_ie_residual_clean", worst_ie}};
  return a;
}

Artifacts dispatch(const RunConfig& c) {
  switch (c.command) {
    case Command::Lambda: return run_lambda(c);
    case Command::Recursion: return run_recursion(c);
    case Command::Paths: return run_paths(c);
    case Command::SteadyState: return run_steady_state(c);
    case Command::DeSolve: return run_de_solve(c);
    case Command::DeCheck: return run_de_check(c);
  }
  jsonu::config_error("command", "unhandled command");
}

}  // namespace

void write_atomic(const std::string& path, const std::string& content) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Config, "cli", "cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw Error(ErrorKind::Config, "cli", "failed writing '" + tmp.string() + "'");
  }
  fs::rename(tmp, p);
}

int run(const RunConfig& config, std::ostream& err) {
  json echo;
  to_json(echo, config);
  try {
    auto a = dispatch(config);
    a.report["config"] = echo;
    if (!config.output.csv.empty()) write_atomic(config.output.csv, a.csv);
    write_atomic(config.output.json, a.report.dump(2) + "\n");
    return kExitOk;
  } catch (const NonConvergenceError& e) {
    err << "error: " << e.what() << '\n';
    json report{{"status", "non_convergence"},
                {"message", e.what()},
                {"last_residual", e.last_residual()},
                {"residual_history", e.residual_history()},
                {"config", echo}};
    try {
      write_atomic(config.output.json, report.dump(2) + "\n");
    } catch (const std::exception& w) {
      err << "error: " << w.what() << '\n';
    }
    return kExitNonConvergence;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: cli: " << e.what() << '\n';
    return kExitError;
  }
}

int main(int argc, char** argv) {
  CLI::App app{"Equilibrium consumption under non-exponential discounting"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<double> tol, damping;
  std::optional<int> max_iter;
  for (const char* name : {"lambda", "recursion", "paths", "steady-state", "de-solve", "de-check"}) {
    auto* sub = app.add_subcommand(name, std::string("run the ") + name + " solver");
    sub->add_option("-c,--config", config_path, "JSON configuration file")->required();
    sub->add_option("--tol", tol, "override numerics.tol");
    sub->add_option("--max-iter", max_iter, "override numerics.max_iter");
    sub->add_option("--damping", damping, "override numerics.damping");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }
  const std::string name = app.get_subcommands().front()->get_name();
  try {
    RunConfig cfg = load_config(config_path);
    if (name != to_string(cfg.command))
      jsonu::config_error("command", "subcommand '" + name + "' does not match config command '" +
                                         to_string(cfg.command) + "'");
    json numerics = cfg.numerics;
    if (tol) numerics["tol"] = *tol;
    if (damping) numerics["damping"] = *damping;
    if (max_iter) numerics["max_iter"] = *max_iter;
    if (numerics != cfg.numerics) {
      json j;
      to_json(j, cfg);
      j["numerics"] = numerics;
      cfg = config_from_json(j);
    }
    return run(cfg, std::cerr);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace tc::cli
