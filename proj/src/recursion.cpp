#include "timeconsistent/recursion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "timeconsistent/error.hpp"
#include "timeconsistent/numerics.hpp"
#include "timeconsistent/propensity.hpp"

namespace tc {

namespace {

constexpr const char* kModule = "recursion_solver";

std::string str(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

// Nodes of the 4-point rule on [-1, 1] (boost stores the non-negative half).
struct Gauss4 {
  double x[4];
  double w[4];
  Gauss4() {
    const auto& a = boost::math::quadrature::gauss<double, 4>::abscissa();
    const auto& wt = boost::math::quadrature::gauss<double, 4>::weights();
    x[0] = -a[1], x[1] = -a[0], x[2] = a[0], x[3] = a[1];
    w[0] = wt[1], w[1] = wt[0], w[2] = wt[0], w[3] = wt[1];
  }
};
const Gauss4 kG4;

void check_stationary_horizon(const MarketPath& m, double end) {
  if (end < stationary_from(m))
    fail(ErrorKind::Domain, kModule,
         "truncation horizon " + str(end) + " lies before the last breakpoint of r or w (" +
             str(stationary_from(m)) + ")");
}

// The stationary propensity of the long-run market is the exact tail of the
// solution, so start there; fall back to cruder guesses when it has no root.
double initial_guess(const DiscountSpec& h, const MarketPath& m, double gamma) {
  try {
    return lambda_constant(h, m.r.final_value(), gamma).lambda();
  } catch (const Error&) {
  }
  try {
    return lambda_exponential(inst_rate(h, 0.0), m.r(0.0), gamma).lambda();
  } catch (const Error&) {
    return 1.0 / total_mass(h);
  }
}

}  // namespace

PropensityPath::PropensityPath(std::vector<double> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  require(!grid_.empty() && grid_.size() == values_.size(), kModule,
          "propensity path needs matching, non-empty grid and values");
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    require(std::isfinite(grid_[i]) && (i == 0 || grid_[i] > grid_[i - 1]), kModule,
            "propensity grid must be strictly increasing");
    if (!(values_[i] > 0 && std::isfinite(values_[i])))
      fail(ErrorKind::InadmissibleIterate, kModule,
           "propensity must be > 0 (got " + str(values_[i]) + " at t = " + str(grid_[i]) + ")");
  }
  cumulative_.resize(grid_.size());
  cumulative_[0] = values_[0] * grid_[0];
  for (std::size_t i = 1; i < grid_.size(); ++i)
    cumulative_[i] =
        cumulative_[i - 1] + 0.5 * (values_[i] + values_[i - 1]) * (grid_[i] - grid_[i - 1]);
}

double PropensityPath::operator()(double t) const {
  if (t <= grid_.front()) return values_.front();
  if (t >= grid_.back()) return values_.back();
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - grid_.begin());
  const double w = (t - grid_[i - 1]) / (grid_[i] - grid_[i - 1]);
  return (1 - w) * values_[i - 1] + w * values_[i];
}

double PropensityPath::antiderivative(double t) const {
  if (t <= grid_.front()) return values_.front() * t;
  if (t >= grid_.back()) return cumulative_.back() + values_.back() * (t - grid_.back());
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - grid_.begin());
  const double dt = t - grid_[i - 1];
  const double slope = (values_[i] - values_[i - 1]) / (grid_[i] - grid_[i - 1]);
  return cumulative_[i - 1] + values_[i - 1] * dt + 0.5 * slope * dt * dt;
}

std::vector<double> recursion_grid(const MarketPath& market, double step) {
  require(step > 0 && std::isfinite(step), kModule, "grid step must be > 0");
  const double end = horizon(market);
  check_stationary_horizon(market, end);
  const auto n = static_cast<std::size_t>(std::ceil(end / step - 1e-9));
  std::vector<double> g = num::linspace(0.0, end, n + 1);
  for (const auto* f : {&market.r, &market.w})
    for (double b : f->breakpoints())
      if (b > 0 && b < end) g.push_back(b);
  std::sort(g.begin(), g.end());
  // Drop nodes that nearly coincide with an inserted breakpoint.
  std::vector<double> out{g.front()};
  for (std::size_t i = 1; i < g.size(); ++i)
    if (g[i] - out.back() > 1e-9 * step) out.push_back(g[i]);
  out.back() = end;
  return out;
}

std::vector<double> recursion_map(const DiscountSpec& h, const MarketPath& market, double gamma,
                                  const PropensityPath& lam) {
  const auto& g = lam.grid();
  const auto& v = lam.values();
  const std::size_t n = g.size();
  const double end = g.back();
  check_stationary_horizon(market, end);
  const double one_m = 1 - gamma;
  const double r_end = market.r.final_value();
  std::vector<double> jump_at;
  for (const auto& j : jumps(h)) jump_at.push_back(j.at);
  const auto* trunc = h.as<TruncatedExponential>();

  std::vector<double> R(n), L(n);
  for (std::size_t j = 0; j < n; ++j) {
    R[j] = market.r.antiderivative(g[j]);
    L[j] = lam.antiderivative(g[j]);
  }

  std::vector<double> out(n);
  num::parallel_for(n, [&](std::size_t i) {
    const double t = g[i];
    // Integrand on a sub-interval [a, b] of cell j.
    auto piece = [&](std::size_t j, double a, double b) {
      const double slope = (v[j + 1] - v[j]) / (g[j + 1] - g[j]);
      const double mid = 0.5 * (a + b);
      const double half = 0.5 * (b - a);
      double acc = 0.0;
      for (int q = 0; q < 4; ++q) {
        const double s = mid + half * kG4.x[q];
        const double th = s - g[j];
        const double ls = v[j] + slope * th;
        const double Ls = L[j] + v[j] * th + 0.5 * slope * th * th;
        const double expo = -one_m * ((Ls - L[i]) - (market.r.antiderivative(s) - R[i]));
        acc += kG4.w[q] * std::pow(ls, one_m) * std::exp(expo) * eval_h(h, s - t);
      }
      return acc * half;
    };
    double total = 0.0;
    for (std::size_t j = i; j + 1 < n; ++j) {
      if (trunc && g[j] - t >= trunc->t_cut) break;
      double a = g[j];
      for (double c : jump_at) {
        const double cut = t + c;
        if (cut > a && cut < g[j + 1]) {
          total += piece(j, a, cut);
          a = cut;
        }
      }
      total += piece(j, a, g[j + 1]);
    }
    const double lam_end = v.back();
    const double lead = std::pow(lam_end, one_m) *
                        std::exp(-one_m * ((L.back() - L[i]) - (R.back() - R[i])));
    if (lead != 0.0) total += lead * tail_integral(h, one_m * (lam_end - r_end), end - t);
    out[i] = std::pow(total, -1.0 / gamma);
  });
  return out;
}

RecursionResult solve_recursion(const DiscountSpec& h, const MarketPath& market, double gamma,
                                const RecursionOptions& opt) {
  require(gamma > 0 && std::isfinite(gamma), kModule, "gamma must be > 0");
  require(opt.tol > 0, kModule, "tol must be > 0");
  require(opt.damping > 0 && opt.damping <= 1, kModule, "damping must be in (0, 1]");
  require(opt.max_iter >= 1, kModule, "max_iter must be >= 1");
  validate(market);

  const auto grid = recursion_grid(market, opt.step);
  std::vector<double> cur(grid.size(), initial_guess(h, market, gamma));
  std::vector<double> history;
  double d = opt.damping;
  for (int it = 1; it <= opt.max_iter; ++it) {
    const PropensityPath path(grid, cur);
    const auto next = recursion_map(h, market, gamma, path);
    double res = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (!(next[i] > 0 && std::isfinite(next[i])))
        fail(ErrorKind::InadmissibleIterate, kModule,
             "inadmissible iterate: lambda = " + str(next[i]) + " at t = " + str(grid[i]) +
                 " in sweep " + std::to_string(it));
      res = std::max(res, std::abs(next[i] - cur[i]));
    }
    if (!history.empty() && res > history.back()) d = std::max(d / 2, 1.0 / 1024);
    history.push_back(res);
    if (res < opt.tol) return {PropensityPath(grid, next), it, res, history, d};
    for (std::size_t i = 0; i < grid.size(); ++i) cur[i] = (1 - d) * cur[i] + d * next[i];
  }
  throw NonConvergenceError(kModule,
                            "no convergence after " + std::to_string(opt.max_iter) +
                                " sweeps (last residual " + str(history.back()) + ")",
                            history);
}

PropensityPath lambda_bar_constant_discount(const MarketPath& market, double rho, double gamma,
                                            const std::vector<double>& grid) {
  require(rho > 0 && gamma > 0, kModule, "lambda_bar needs rho > 0 and gamma > 0");
  const double q_end = ((1 - gamma) * market.r.final_value() - rho) / gamma;
  if (!(q_end < 0))
    fail(ErrorKind::Divergence, kModule,
         "denominator diverges: (1 - gamma) r_inf - rho = " + str(gamma * q_end) +
             " must be < 0");
  const double stat = stationary_from(market);
  std::vector<double> breaks;
  for (const auto* f : {&market.r, &market.w})
    for (double b : f->breakpoints()) breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());

  std::vector<double> vals(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    auto expo = [&](double s) {
      return ((1 - gamma) * market.r.integral(t, s) - rho * (s - t)) / gamma;
    };
    const double x = std::max(t, stat);
    double den = 0.0;
    if (x > t)
      den = num::adaptive_split([&](double s) { return std::exp(expo(s)); }, t, x, breaks, 1e-14);
    den += std::exp(expo(x)) / (-q_end);
    vals[i] = 1 / den;
  }
  return {grid, vals};
}

double policy_sigma(const PropensityPath& lam, const MarketPath& market, double t, double k) {
  const double wealth = k + human_wealth(market, t);
  if (!(wealth > 0))
    fail(ErrorKind::Domain, kModule,
         "total wealth k + HW(t) must be > 0 (got " + str(wealth) + " at t = " + str(t) + ")");
  return lam(t) * wealth;
}

double value_phe(const PropensityPath& lam, const MarketPath& market, double gamma, double t,
                 double k) {
  require(gamma > 0, kModule, "gamma must be > 0");
  if (gamma == 1.0)
    fail(ErrorKind::Domain, kModule,
         "closed-form value needs gamma != 1; use the quadrature value for log utility");
  const double wealth = k + human_wealth(market, t);
  if (!(wealth > 0))
    fail(ErrorKind::Domain, kModule, "total wealth k + HW(t) must be > 0 (got " + str(wealth) + ")");
  return std::pow(lam(t), -gamma) * std::pow(wealth, 1 - gamma) / (1 - gamma);
}

double flow_closed_form(const PropensityPath& lam, const MarketPath& market, double s, double t,
                        double k) {
  require(s >= t && t >= 0, kModule, "flow needs s >= t >= 0");
  const double growth = market.r.integral(t, s) - lam.integral(t, s);
  return std::exp(growth) * (k + human_wealth(market, t)) - human_wealth(market, s);
}

double ie_value(const PropensityPath& lam, const MarketPath& market, const DiscountSpec& h,
                double gamma, double t, double k) {
  require(gamma > 0 && gamma != 1.0, kModule, "ie_value needs gamma > 0, gamma != 1");
  const double w0 = k + human_wealth(market, t);
  if (!(w0 > 0)) fail(ErrorKind::Domain, kModule, "total wealth k + HW(t) must be > 0");
  const double end = std::max({t, lam.grid().back(), stationary_from(market)});
  auto u = [&](double c) { return std::pow(c, 1 - gamma) / (1 - gamma); };
  auto sigma_at = [&](double s) {
    return lam(s) * w0 * std::exp(market.r.integral(t, s) - lam.integral(t, s));
  };
  std::vector<double> breaks(lam.grid());
  for (const auto* f : {&market.r, &market.w})
    for (double b : f->breakpoints()) breaks.push_back(b);
  for (double c : kinks(h)) breaks.push_back(t + c);
  std::sort(breaks.begin(), breaks.end());
  double head = 0.0;
  if (end > t)
    head = num::adaptive_split([&](double s) { return eval_h(h, s - t) * u(sigma_at(s)); }, t,
                               end, breaks, 1e-12);
  const double a = -(1 - gamma) * (market.r.final_value() - lam.final_value());
  return head + u(sigma_at(end)) * tail_integral(h, a, end - t);
}

}  // namespace tc
