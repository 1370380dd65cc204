#include "timeconsistent/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "timeconsistent/error.hpp"
#include "timeconsistent/numerics.hpp"

namespace tc {

namespace {

constexpr const char* kModule = "trajectory";

std::string str(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

std::vector<double> time_grid(double t0, double horizon, double step) {
  require(step > 0 && std::isfinite(step), kModule, "step must be > 0");
  require(horizon >= 0 && std::isfinite(horizon), kModule, "horizon must be >= 0");
  const auto n = static_cast<std::size_t>(std::ceil(horizon / step - 1e-9));
  std::vector<double> ts;
  ts.reserve(n + 1);
  for (std::size_t i = 0; i < n; ++i) ts.push_back(t0 + static_cast<double>(i) * step);
  ts.push_back(t0 + horizon);
  return ts;
}

void check_market(double r, double w) {
  require(r > 0 && std::isfinite(r), kModule, "interest rate r must be > 0");
  require(w >= 0 && std::isfinite(w), kModule, "wage w must be >= 0");
}

// int_a^b h(s)^{1/gamma} e^{-b s} ds over a panel free of kinks.
double powered_panel(const DiscountSpec& h, double p, double decay, double a, double b) {
  return num::adaptive([&](double s) { return std::pow(eval_h(h, s), p) * std::exp(-decay * s); },
                       a, b, 1e-13);
}

}  // namespace

PathSample integrate_flow(const Policy& sigma, const Environment& env, double t0, double k0,
                          double horizon, double step, const FlowOptions& opt,
                          std::string label) {
  auto ts = time_grid(t0, horizon, step);
  // RK4 loses its order across a jump of r or w (or a policy kink), so step
  // exactly onto those points.
  std::vector<double> extra = opt.breakpoints;
  if (const auto* m = env.market())
    for (const auto* f : {&m->r, &m->w})
      for (double b : f->breakpoints()) extra.push_back(b);
  const double t_end = ts.back();
  for (double b : extra)
    if (b > t0 && b < t_end) ts.push_back(b);
  std::sort(ts.begin(), ts.end());
  const double tiny = 1e-9 * step;
  ts.erase(std::unique(ts.begin(), ts.end(), [&](double a, double b) { return b - a <= tiny; }),
           ts.end());
  ts.back() = t_end;
  const bool need_positive = opt.require_positive_capital || env.production() != nullptr;
  PathSample out;
  out.label = std::move(label);
  auto bad_k = [&](double k) { return !std::isfinite(k) || (need_positive && !(k > 0)); };
  auto rhs = [&](double t, double k) { return env.f(t, k) - sigma(t, k); };

  double k = k0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double t = ts[i];
    const double c = bad_k(k) ? std::numeric_limits<double>::quiet_NaN() : sigma(t, k);
    if (bad_k(k) || !(c > 0) || !std::isfinite(c)) {
      out.truncated = true;
      out.truncated_at = t;
      break;
    }
    out.times.push_back(t);
    out.capital.push_back(k);
    out.consumption.push_back(c);
    if (i + 1 == ts.size()) break;
    const double dt = ts[i + 1] - t;
    try {
      const double k1 = rhs(t, k);
      const double k2 = rhs(t + dt / 2, k + dt / 2 * k1);
      const double k3 = rhs(t + dt / 2, k + dt / 2 * k2);
      // end stage from inside the step: left limits at a breakpoint
      const double k4 = rhs(std::nextafter(t + dt, t), k + dt * k3);
      k += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    } catch (const Error&) {
      // An intermediate stage left the domain of f or sigma.
      out.truncated = true;
      out.truncated_at = ts[i + 1];
      break;
    }
  }
  return out;
}

PathSample equilibrium_path_log(const DiscountSpec& h, double r, double w, double k0,
                                double horizon, double step) {
  check_market(r, w);
  const double H = total_mass(h);
  const double a = r - 1 / H;
  const double b = w * (1 - 1 / (r * H));
  PathSample out;
  out.label = "equilibrium";
  for (double t : time_grid(0.0, horizon, step)) {
    // k' = a k + b.
    const double k = a == 0.0 ? k0 + b * t : k0 * std::exp(a * t) + b * std::expm1(a * t) / a;
    out.times.push_back(t);
    out.capital.push_back(k);
    out.consumption.push_back((k + w / r) / H);
  }
  return out;
}

PathSample constant_propensity_path(double lambda, double r, double w, double k0,
                                    double horizon, double step, std::string label) {
  check_market(r, w);
  require(lambda > 0, kModule, "propensity must be > 0");
  const double w0 = k0 + w / r;
  require(w0 > 0, kModule, "total wealth k0 + w/r must be > 0");
  PathSample out;
  out.label = std::move(label);
  for (double t : time_grid(0.0, horizon, step)) {
    const double wealth = w0 * std::exp((r - lambda) * t);
    out.times.push_back(t);
    out.capital.push_back(wealth - w / r);
    out.consumption.push_back(lambda * wealth);
  }
  return out;
}

PathSample precommitment_path_log(const DiscountSpec& h, double r, double w, double k0,
                                  double horizon, double step) {
  check_market(r, w);
  const double H = total_mass(h);
  if (!(r > 1 / H))
    fail(ErrorKind::Domain, kModule,
         "psychological rate exceeds interest: r = " + str(r) + " must exceed 1/H = " +
             str(1 / H));
  const double w0 = k0 + w / r;
  require(w0 > 0, kModule, "total wealth k0 + w/r must be > 0");
  const double c0 = w0 / H;
  PathSample out;
  out.label = "precommitment";
  for (double t : time_grid(0.0, horizon, step)) {
    out.times.push_back(t);
    out.capital.push_back(std::exp(r * t) * c0 * tail_integral(h, 0.0, t) - w / r);
    out.consumption.push_back(c0 * eval_h(h, t) * std::exp(r * t));
  }
  return out;
}

PathSample precommitment_path(const DiscountSpec& h, double r, double w, double gamma,
                              double k0, double horizon, double step) {
  require(gamma > 0, kModule, "gamma must be > 0");
  if (gamma == 1.0) return precommitment_path_log(h, r, w, k0, horizon, step);
  check_market(r, w);
  const double w0 = k0 + w / r;
  require(w0 > 0, kModule, "total wealth k0 + w/r must be > 0");
  const double lam = naive_propensity(h, r, gamma);
  const double c0 = lam * w0;
  const double p = 1 / gamma;
  const double decay = r * (gamma - 1) / gamma;
  const auto ts = time_grid(0.0, horizon, step);
  const auto ks = kinks(h);

  PathSample out;
  out.label = "precommitment";
  double spent = 0.0;  // int_0^t h^{1/gamma} e^{-decay s} ds
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (i > 0) {
      double a = ts[i - 1];
      for (double c : ks)
        if (c > a && c < ts[i]) {
          spent += powered_panel(h, p, decay, a, c);
          a = c;
        }
      spent += powered_panel(h, p, decay, a, ts[i]);
    }
    const double t = ts[i];
    out.times.push_back(t);
    out.capital.push_back(std::exp(r * t) * (w0 - c0 * spent) - w / r);
    out.consumption.push_back(c0 * std::pow(eval_h(h, t) * std::exp(r * t), p));
  }
  return out;
}

double optimal_propensity_log(const DiscountSpec& h, double t) {
  require(t >= 0, kModule, "t must be >= 0");
  const double tail = tail_integral(h, 0.0, t);
  if (!(tail > 0) || eval_h(h, t) == 0.0)
    fail(ErrorKind::Domain, kModule, "int_t^inf h vanishes at t = " + str(t));
  return eval_h(h, t) / tail;
}

double naive_propensity(const DiscountSpec& h, double r, double gamma) {
  require(r > 0 && std::isfinite(r), kModule, "interest rate r must be > 0");
  require(gamma > 0 && std::isfinite(gamma), kModule, "gamma must be > 0");
  if (gamma == 1.0) return 1 / total_mass(h);
  if (const auto* e = h.as<Exponential>()) {
    const double rate = (e->rho + r * (gamma - 1)) / gamma;
    if (!(rate > 0))
      fail(ErrorKind::Divergence, kModule,
           "budget integral diverges: rho + r(gamma - 1) must be > 0");
    return rate;
  }
  const double p = 1 / gamma;
  const double decay = r * (gamma - 1) / gamma;
  const double d = decay_floor(h);
  if (std::isfinite(d) && !(d * p + decay > 0))
    fail(ErrorKind::Divergence, kModule,
         "budget integral diverges: decay_floor(h) + r(gamma - 1) = " +
             str(d + r * (gamma - 1)) + " must be > 0");

  auto ks = kinks(h);
  std::sort(ks.begin(), ks.end());
  double total = 0.0;
  double a = 0.0;
  for (double c : ks) {
    total += powered_panel(h, p, decay, a, c);
    a = c;
  }
  // The truncated family vanishes past its last kink.
  if (!h.as<TruncatedExponential>()) {
    boost::math::quadrature::exp_sinh<double> integrator;
    total += integrator.integrate(
        [&](double s) { return std::pow(eval_h(h, s), p) * std::exp(-decay * s); }, a,
        std::numeric_limits<double>::infinity(), 1e-13);
  }
  return 1 / total;
}

}  // namespace tc
