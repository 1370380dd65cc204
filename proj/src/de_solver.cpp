#include "timeconsistent/de_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "timeconsistent/error.hpp"
#include "timeconsistent/numerics.hpp"
#include "timeconsistent/propensity.hpp"

namespace tc {

namespace {

constexpr const char* kModule = "de_solver";

std::string str(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

// h' with the right-hand derivative at a jump of h; the jump itself is
// accounted for separately.
double h_prime(const DiscountSpec& h, double x) {
  try {
    return eval_h_prime(h, x);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Kink) throw;
    return eval_h_prime(h, std::nextafter(x, std::numeric_limits<double>::infinity()));
  }
}

// Points of one flow from (t, k) to the horizon, uniformly spaced with an
// even number of steps.
struct Trace {
  std::vector<double> s;
  std::vector<double> K;
  std::vector<double> c;
  std::vector<double> R;  // filled only when requested
  double step = 0.0;
  bool clamped = false;
};

Trace trace_flow(const ValueGrid& grid, const Environment& env, double t, double k, double s_end,
                 int substeps, bool with_resolvent, bool force_even) {
  const auto& sp = grid.spec;
  Trace tr;
  const double len = s_end - t;
  int n = 0;
  if (len > 0) {
    n = std::max(1, static_cast<int>(std::ceil(len / (grid.dt() / substeps) - 1e-9)));
    if (force_even && n % 2) ++n;
    tr.step = len / n;
  }
  tr.s.reserve(static_cast<std::size_t>(n) + 1);

  auto window = [&](double x) { return std::clamp(x, sp.k_lo, sp.k_hi); };
  auto pol = [&](double s, double x) {
    bool cl = false;
    const double v = grid.sigma_at(s, x, &cl);
    if (cl) tr.clamped = true;
    return v;
  };
  auto fk = [&](double s, double x) {
    return env.f(s, x < sp.k_lo || x > sp.k_hi ? window(x) : x);
  };
  auto dk = [&](double s, double x) { return fk(s, x) - pol(s, x); };
  auto dr = [&](double s, double x, double r) {
    const double xc = x < sp.k_lo || x > sp.k_hi ? window(x) : x;
    return (env.f_k(s, xc) - grid.sigma_k_at(s, x)) * r;
  };

  double K = k;
  double R = 1.0;
  for (int l = 0; l <= n; ++l) {
    const double s = l == n ? s_end : t + l * tr.step;
    tr.s.push_back(s);
    tr.K.push_back(K);
    tr.c.push_back(pol(s, K));
    if (with_resolvent) tr.R.push_back(R);
    if (l == n) break;
    const double h = tr.step;
    if (with_resolvent) {
      const double a1 = dk(s, K), b1 = dr(s, K, R);
      const double a2 = dk(s + h / 2, K + h / 2 * a1), b2 = dr(s + h / 2, K + h / 2 * a1, R + h / 2 * b1);
      const double a3 = dk(s + h / 2, K + h / 2 * a2), b3 = dr(s + h / 2, K + h / 2 * a2, R + h / 2 * b2);
      const double a4 = dk(s + h, K + h * a3), b4 = dr(s + h, K + h * a3, R + h * b3);
      K += h / 6 * (a1 + 2 * a2 + 2 * a3 + a4);
      R += h / 6 * (b1 + 2 * b2 + 2 * b3 + b4);
    } else {
      const double a1 = dk(s, K);
      const double a2 = dk(s + h / 2, K + h / 2 * a1);
      const double a3 = dk(s + h / 2, K + h / 2 * a2);
      const double a4 = dk(s + h, K + h * a3);
      K += h / 6 * (a1 + 2 * a2 + 2 * a3 + a4);
    }
  }
  return tr;
}

// Composite Simpson over the trace points.
template <class F>
double simpson(const Trace& tr, F&& f) {
  const std::size_t n = tr.s.size() - 1;
  if (n == 0) return 0.0;
  double acc = f(0) + f(n);
  for (std::size_t l = 1; l < n; ++l) acc += (l % 2 ? 4.0 : 2.0) * f(l);
  return acc * tr.step / 3;
}

double interp_consumption(const Trace& tr, double s) {
  const double x = (s - tr.s.front()) / tr.step;
  const auto l = std::min(static_cast<std::size_t>(x), tr.s.size() - 2);
  const double w = x - static_cast<double>(l);
  return (1 - w) * tr.c[l] + w * tr.c[l + 1];
}

// int h'(s-t) u(c) ds + h'(T-t) g(K_T) + sum of jump(h) u(c(t + tau)).
double nonlocal_term(const ValueGrid& grid, const DiscountSpec& h, const UtilitySpec& u,
                     const Trace& tr, double t) {
  const double T = grid.spec.horizon;
  double acc = simpson(tr, [&](std::size_t l) { return h_prime(h, tr.s[l] - t) * u.u(tr.c[l]); });
  acc += h_prime(h, T - t) * grid.g.value(u, tr.K.back());
  for (const auto& jmp : jumps(h))
    if (t + jmp.at < T) acc += jmp.size * u.u(interp_consumption(tr, t + jmp.at));
  return acc;
}

double ie_from_trace(const ValueGrid& grid, const DiscountSpec& h, const UtilitySpec& u,
                     const Trace& tr, double t) {
  const double T = grid.spec.horizon;
  return simpson(tr, [&](std::size_t l) { return eval_h(h, tr.s[l] - t) * u.u(tr.c[l]); }) +
         eval_h(h, T - t) * grid.g.value(u, tr.K.back());
}

void check_interior(const ValueGrid& grid, int i, int j) {
  if (!(i > 0 && i < grid.spec.nt && j > 0 && j < grid.spec.nk))
    fail(ErrorKind::Domain, kModule,
         "node (" + std::to_string(i) + ", " + std::to_string(j) + ") is on the grid boundary");
}

// sigma = i(V_k) on the time slices before the horizon, i(g') on it.
std::vector<double> policy_from_values(const ValueGrid& grid, const UtilitySpec& u) {
  const auto& sp = grid.spec;
  std::vector<double> out(grid.V.size());
  for (int i = 0; i <= sp.nt; ++i)
    for (int j = 0; j <= sp.nk; ++j) {
      const double vk = i == sp.nt ? grid.g.slope(u, grid.k_grid[j]) : grid.V_k(i, j);
      if (!(vk > 0 && std::isfinite(vk)))
        fail(ErrorKind::InadmissibleIterate, kModule,
             "inadmissible iterate: V_k = " + str(vk) + " at t = " + str(grid.t_grid[i]) +
                 ", k = " + str(grid.k_grid[j]));
      out[grid.index(i, j)] = u.i(vk);
    }
  return out;
}

// V at every node from the grid policy; returns the tainted flags.
std::vector<char> evaluate_values(ValueGrid& grid, const DiscountSpec& h, const UtilitySpec& u,
                                  const Environment& env, bool strict) {
  const auto& sp = grid.spec;
  std::vector<double> next(grid.V.size());
  std::vector<char> taint(grid.V.size(), 0);
  const std::size_t rows = static_cast<std::size_t>(sp.nt);
  const std::size_t cols = static_cast<std::size_t>(sp.nk) + 1;
  num::parallel_for(rows * cols, [&](std::size_t idx) {
    const int i = static_cast<int>(idx / cols);
    const int j = static_cast<int>(idx % cols);
    const double t = grid.t_grid[i];
    const auto tr = trace_flow(grid, env, t, grid.k_grid[j], sp.horizon, sp.substeps, false, true);
    next[idx] = ie_from_trace(grid, h, u, tr, t);
    taint[idx] = tr.clamped;
  });
  for (int j = 0; j <= sp.nk; ++j) next[grid.index(sp.nt, j)] = grid.g.value(u, grid.k_grid[j]);
  if (strict)
    for (std::size_t idx = 0; idx < taint.size(); ++idx)
      if (taint[idx])
        fail(ErrorKind::WindowViolation, kModule,
             "flow from node (t = " + str(grid.t_grid[idx / cols]) +
                 ", k = " + str(grid.k_grid[idx % cols]) + ") leaves the capital window");
  grid.V = std::move(next);
  return taint;
}

}  // namespace

void validate(const GridSpec& s) {
  require(s.horizon > 0 && std::isfinite(s.horizon), kModule, "horizon must be > 0");
  require(s.nt >= 2 && s.nk >= 2, kModule, "grid needs at least 2 intervals per axis");
  require(s.k_lo < s.k_hi && std::isfinite(s.k_lo) && std::isfinite(s.k_hi), kModule,
          "capital window must satisfy k_lo < k_hi");
  require(s.substeps >= 2 && s.substeps % 2 == 0, kModule, "substeps must be even and >= 2");
}

double TerminalUtility::value(const UtilitySpec& u, double k) const {
  return scale * u.u(k + shift) + offset;
}

double TerminalUtility::slope(const UtilitySpec& u, double k) const {
  return scale * u.u_prime(k + shift);
}

TerminalUtility matched_terminal(const UtilitySpec& u, double rho, double r, double w) {
  const double lam = lambda_exponential(rho, r, u.gamma()).lambda();
  if (u.is_log()) return {1 / rho, w / r, std::log(rho) / rho + (r - rho) / (rho * rho)};
  return {std::pow(lam, -u.gamma()), w / r, 0.0};
}

ValueGrid::ValueGrid(GridSpec s, TerminalUtility g_) : spec(s), g(g_) {
  validate(spec);
  t_grid = num::linspace(0.0, spec.horizon, static_cast<std::size_t>(spec.nt) + 1);
  k_grid = num::linspace(spec.k_lo, spec.k_hi, static_cast<std::size_t>(spec.nk) + 1);
  const std::size_t n = t_grid.size() * k_grid.size();
  V.assign(n, 0.0);
  sigma.assign(n, 0.0);
  tainted.assign(n, 0);
}

double ValueGrid::sigma_at(double t, double k, bool* clamped) const {
  const double ts = std::clamp(t / dt(), 0.0, static_cast<double>(spec.nt));
  const int i = std::min(static_cast<int>(ts), spec.nt - 1);
  const double a = ts - i;
  if (clamped) *clamped = k < spec.k_lo || k > spec.k_hi;
  const double ks = std::clamp((k - spec.k_lo) / dk(), 0.0, static_cast<double>(spec.nk));
  const int j = std::min(static_cast<int>(ks), spec.nk - 1);
  const double b = ks - j;
  return (1 - a) * ((1 - b) * s(i, j) + b * s(i, j + 1)) +
         a * ((1 - b) * s(i + 1, j) + b * s(i + 1, j + 1));
}

double ValueGrid::sigma_k_at(double t, double k) const {
  if (k < spec.k_lo || k > spec.k_hi) return 0.0;
  const double ts = std::clamp(t / dt(), 0.0, static_cast<double>(spec.nt));
  const int i = std::min(static_cast<int>(ts), spec.nt - 1);
  const double a = ts - i;
  const int j = std::min(static_cast<int>((k - spec.k_lo) / dk()), spec.nk - 1);
  return ((1 - a) * (s(i, j + 1) - s(i, j)) + a * (s(i + 1, j + 1) - s(i + 1, j))) / dk();
}

double ValueGrid::V_k(int i, int j) const {
  const double d = dk();
  if (j == 0) return (-3 * v(i, 0) + 4 * v(i, 1) - v(i, 2)) / (2 * d);
  if (j == spec.nk) return (3 * v(i, j) - 4 * v(i, j - 1) + v(i, j - 2)) / (2 * d);
  return (v(i, j + 1) - v(i, j - 1)) / (2 * d);
}

double ValueGrid::V_t(int i, int j) const {
  const double d = dt();
  if (i == 0) return (-3 * v(0, j) + 4 * v(1, j) - v(2, j)) / (2 * d);
  if (i == spec.nt) return (3 * v(i, j) - 4 * v(i - 1, j) + v(i - 2, j)) / (2 * d);
  return (v(i + 1, j) - v(i - 1, j)) / (2 * d);
}

bool ValueGrid::clean_stencil(int i, int j) const {
  if (i < 1 || i >= spec.nt || j < 1 || j >= spec.nk) return false;
  return !tainted[index(i, j)] && !tainted[index(i - 1, j)] && !tainted[index(i + 1, j)] &&
         !tainted[index(i, j - 1)] && !tainted[index(i, j + 1)];
}

std::size_t ValueGrid::tainted_count() const {
  return static_cast<std::size_t>(std::count(tainted.begin(), tainted.end(), 1));
}

ValueGrid solve_hjb_exponential(double rho, const UtilitySpec& u, const Environment& env,
                                const TerminalUtility& g, const GridSpec& spec, int substeps) {
  require(rho > 0, kModule, "rho must be > 0");
  require(substeps >= 1, kModule, "substeps must be >= 1");
  ValueGrid grid(spec, g);
  const int nk = spec.nk;
  const double d = grid.dk();
  const auto& kg = grid.k_grid;

  auto slope = [&](const std::vector<double>& v, int j) {
    if (j == 0) return (-3 * v[0] + 4 * v[1] - v[2]) / (2 * d);
    if (j == nk) return (3 * v[nk] - 4 * v[nk - 1] + v[nk - 2]) / (2 * d);
    return (v[j + 1] - v[j - 1]) / (2 * d);
  };
  // dV/dtau with tau = T - t.
  auto rhs = [&](double t, const std::vector<double>& v) {
    std::vector<double> out(v.size());
    for (int j = 0; j <= nk; ++j) {
      const double vk = slope(v, j);
      if (!(vk > 0 && std::isfinite(vk)))
        fail(ErrorKind::InadmissibleIterate, kModule,
             "HJB solve: V_k = " + str(vk) + " at t = " + str(t) + ", k = " + str(kg[j]));
      out[j] = -rho * v[j] + u.u_tilde(vk) + vk * env.f(t, kg[j]);
    }
    return out;
  };

  std::vector<double> v(static_cast<std::size_t>(nk) + 1);
  for (int j = 0; j <= nk; ++j) v[j] = g.value(u, kg[j]);
  auto store = [&](int i) {
    for (int j = 0; j <= nk; ++j) grid.V[grid.index(i, j)] = v[j];
  };
  store(spec.nt);
  const double h = grid.dt() / substeps;
  auto axpy = [](const std::vector<double>& a, double c, const std::vector<double>& b) {
    std::vector<double> out(a.size());
    for (std::size_t q = 0; q < a.size(); ++q) out[q] = a[q] + c * b[q];
    return out;
  };
  for (int i = spec.nt; i > 0; --i) {
    for (int m = 0; m < substeps; ++m) {
      const double t = grid.t_grid[i] - m * h;
      const auto a1 = rhs(t, v);
      const auto a2 = rhs(t - h / 2, axpy(v, h / 2, a1));
      const auto a3 = rhs(t - h / 2, axpy(v, h / 2, a2));
      const auto a4 = rhs(t - h, axpy(v, h, a3));
      for (std::size_t q = 0; q < v.size(); ++q)
        v[q] += h / 6 * (a1[q] + 2 * a2[q] + 2 * a3[q] + a4[q]);
    }
    store(i - 1);
  }
  grid.sigma = policy_from_values(grid, u);
  return grid;
}

ValueGrid solve_ie(const DiscountSpec& h, const UtilitySpec& u, const Environment& env,
                   const TerminalUtility& g, const GridSpec& spec, const IeOptions& opt) {
  validate(spec);
  require(opt.tol > 0, kModule, "tol must be > 0");
  require(opt.damping > 0 && opt.damping <= 1, kModule, "damping must be in (0, 1]");
  require(opt.max_iter >= 1, kModule, "max_iter must be >= 1");

  ValueGrid grid = solve_hjb_exponential(inst_rate(h, 0.0), u, env, g, spec);
  grid.residual_history.clear();
  double d = opt.damping;
  for (int it = 1; it <= opt.max_iter; ++it) {
    evaluate_values(grid, h, u, env, false);
    const auto next = policy_from_values(grid, u);
    double res = 0.0;
    for (std::size_t q = 0; q < next.size(); ++q)
      res = std::max(res, std::abs(next[q] - grid.sigma[q]));
    auto& hist = grid.residual_history;
    if (!hist.empty() && res > hist.back()) d = std::max(d / 2, 1.0 / 1024);
    hist.push_back(res);
    for (std::size_t q = 0; q < next.size(); ++q)
      grid.sigma[q] = (1 - d) * grid.sigma[q] + d * next[q];
    if (res < opt.tol) {
      // Values consistent with the returned policy.
      grid.tainted = evaluate_values(grid, h, u, env, opt.strict_window);
      grid.iterations = it;
      return grid;
    }
  }
  throw NonConvergenceError(kModule,
                            "no convergence after " + std::to_string(opt.max_iter) +
                                " sweeps (last sigma change " +
                                str(grid.residual_history.back()) + ")",
                            grid.residual_history);
}

IeEvaluation ie_evaluate(const ValueGrid& grid, const DiscountSpec& h, const UtilitySpec& u,
                         const Environment& env, double t, double k, int substeps) {
  require(t >= 0 && t <= grid.spec.horizon, kModule, "t must lie in [0, T]");
  require(substeps >= 2 && substeps % 2 == 0, kModule, "substeps must be even and >= 2");
  const auto tr = trace_flow(grid, env, t, k, grid.spec.horizon, substeps, false, true);
  return {ie_from_trace(grid, h, u, tr, t), tr.clamped};
}

double de_residual(const ValueGrid& grid, const DiscountSpec& h, const UtilitySpec& u,
                   const Environment& env, int i, int j) {
  check_interior(grid, i, j);
  const double t = grid.t_grid[i];
  const double k = grid.k_grid[j];
  const auto tr = trace_flow(grid, env, t, k, grid.spec.horizon, grid.spec.substeps, false, true);
  const double vk = grid.V_k(i, j);
  if (!(vk > 0)) fail(ErrorKind::Domain, kModule, "V_k must be > 0 at node");
  return grid.V_t(i, j) + nonlocal_term(grid, h, u, tr, t) + u.u_tilde(vk) + vk * env.f(t, k);
}

double hjb_residual(const ValueGrid& grid, double rho, const UtilitySpec& u,
                    const Environment& env, int i, int j) {
  check_interior(grid, i, j);
  const double vk = grid.V_k(i, j);
  if (!(vk > 0)) fail(ErrorKind::Domain, kModule, "V_k must be > 0 at node");
  return grid.V_t(i, j) - rho * grid.v(i, j) + u.u_tilde(vk) +
         vk * env.f(grid.t_grid[i], grid.k_grid[j]);
}

ResolventPath resolvent(const ValueGrid& grid, const Environment& env, double t, double k,
                        double s_end) {
  require(t >= 0 && s_end >= t && s_end <= grid.spec.horizon, kModule,
          "resolvent needs 0 <= t <= s <= T");
  const auto tr = trace_flow(grid, env, t, k, s_end, grid.spec.substeps, true, false);
  return {tr.s, tr.R, tr.K};
}

double flow_capital(const ValueGrid& grid, const Environment& env, double t, double k,
                    double s_end) {
  require(t >= 0 && s_end >= t && s_end <= grid.spec.horizon, kModule,
          "flow needs 0 <= t <= s <= T");
  return trace_flow(grid, env, t, k, s_end, grid.spec.substeps, false, false).K.back();
}

P1Result p1_payoff(const ValueGrid& grid, const DiscountSpec& h, const UtilitySpec& u,
                   const Environment& env, double t, double k, double c, double agreement) {
  require(t >= 0 && t < grid.spec.horizon, kModule, "deviation time must lie in [0, T)");
  require(c > 0, kModule, "deviation consumption must be > 0");
  const double T = grid.spec.horizon;
  const double sig = grid.sigma_at(t, k);
  const auto tr = trace_flow(grid, env, t, k, T, grid.spec.substeps, true, true);
  // d/dk of the continuation value under the grid policy.
  double shadow = simpson(tr, [&](std::size_t l) {
    return eval_h(h, tr.s[l] - t) * u.u_prime(tr.c[l]) * grid.sigma_k_at(tr.s[l], tr.K[l]) *
           tr.R[l];
  });
  shadow += eval_h(h, T - t) * grid.g.slope(u, tr.K.back()) * tr.R.back();

  const double base = u.u(c) - u.u(sig);
  const P1Result out{base + shadow * (sig - c), base - u.u_prime(sig) * (c - sig), tr.clamped};
  if (!out.tainted && !(std::abs(out.direct - out.reduced) <= agreement * std::max(1.0, std::abs(out.reduced))))
    fail(ErrorKind::Diagnostic, kModule,
         "deviation payoff routes disagree (" + str(out.direct) + " vs " + str(out.reduced) +
             "): grid not converged at t = " + str(t) + ", k = " + str(k));
  return out;
}

double effective_discount_rate(const ValueGrid& grid, const DiscountSpec& h,
                               const UtilitySpec& u, const Environment& env, int i, int j) {
  require(i >= 0 && i < grid.spec.nt && j >= 0 && j <= grid.spec.nk, kModule,
          "node must lie before the horizon");
  const double v = grid.v(i, j);
  if (v == 0.0) fail(ErrorKind::Domain, kModule, "effective discount rate undefined: V = 0");
  const double t = grid.t_grid[i];
  const auto tr =
      trace_flow(grid, env, t, grid.k_grid[j], grid.spec.horizon, grid.spec.substeps, false, true);
  return -nonlocal_term(grid, h, u, tr, t) / v;
}

}  // namespace tc
