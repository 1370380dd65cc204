#pragma once

// Capital and consumption paths under equilibrium, precommitment and naive
// strategies.

#include <functional>
#include <string>
#include <vector>

#include "timeconsistent/discount.hpp"
#include "timeconsistent/market.hpp"

namespace tc {

struct PathSample {
  std::vector<double> times;
  std::vector<double> capital;
  std::vector<double> consumption;
  std::string label;
  /// Set when the simulation stopped early because capital or consumption
  /// left the admissible domain; the vectors end at the last good point.
  bool truncated = false;
  double truncated_at = 0.0;
};

using Policy = std::function<double(double t, double k)>;

struct FlowOptions {
  /// Stop when k <= 0 (always enforced for production environments).
  bool require_positive_capital = true;
  /// Times where the policy is not smooth; they become step boundaries, as
  /// do the breakpoints of r and w.
  std::vector<double> breakpoints = {};
};

/// RK4 on dk/dt = f(t, k) - sigma(t, k) on a uniform grid refined by the
/// breakpoints. The last step is shortened to land exactly on t0 + horizon.
PathSample integrate_flow(const Policy& sigma, const Environment& env, double t0, double k0,
                          double horizon, double step, const FlowOptions& opt = {},
                          std::string label = "equilibrium");

/// Log-utility equilibrium path with constant r and w: consume
/// (k + w/r)/H with H = int h. Closed form of the linear ODE, including the
/// stationary case r = 1/H.
PathSample equilibrium_path_log(const DiscountSpec& h, double r, double w, double k0,
                                double horizon, double step);

/// Constant-propensity path in a constant market: wealth k + w/r grows at
/// r - lambda.
PathSample constant_propensity_path(double lambda, double r, double w, double k0,
                                    double horizon, double step, std::string label);

/// Time-0 optimal plan with log utility: c(t) = c0 h(t) e^{rt},
/// c0 = (k0 + w/r)/H. Requires r > 1/H.
PathSample precommitment_path_log(const DiscountSpec& h, double r, double w, double k0,
                                  double horizon, double step);

/// Time-0 optimal plan with CRRA utility: c(t) = c0 (h(t) e^{rt})^{1/gamma}
/// with c0 = naive_propensity(h, r, gamma) (k0 + w/r).
PathSample precommitment_path(const DiscountSpec& h, double r, double w, double gamma,
                              double k0, double horizon, double step);

/// h(t) / int_t^inf h: the log-utility precommitment propensity.
double optimal_propensity_log(const DiscountSpec& h, double t);

/// 1 / int_0^inf h(s)^{1/gamma} e^{-r (gamma - 1) s / gamma} ds: the
/// consumption rate a planner who (wrongly) expects to commit chooses.
double naive_propensity(const DiscountSpec& h, double r, double gamma);

}  // namespace tc
