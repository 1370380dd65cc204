#pragma once

// Time-varying propensities lambda(t) for CRRA utility in a market with
// interest path r(t) and wage path w(t). The equilibrium propensity solves
//
//   lambda(t)^{-gamma} = int_t^inf lambda(s)^{1-gamma}
//                          exp(-(1-gamma) int_t^s (lambda - r)) h(s - t) ds
//
// and the policy consumes lambda(t) times total wealth k + HW(t).

#include <vector>

#include "timeconsistent/discount.hpp"
#include "timeconsistent/market.hpp"

namespace tc {

/// lambda on an increasing time grid; linear in between, constant outside.
class PropensityPath {
 public:
  PropensityPath(std::vector<double> grid, std::vector<double> values);

  const std::vector<double>& grid() const noexcept { return grid_; }
  const std::vector<double>& values() const noexcept { return values_; }

  double operator()(double t) const;
  /// int_0^t lambda (exact for the piecewise-linear interpolant).
  double antiderivative(double t) const;
  double integral(double t0, double t1) const { return antiderivative(t1) - antiderivative(t0); }
  double final_value() const { return values_.back(); }

 private:
  std::vector<double> grid_;
  std::vector<double> values_;
  std::vector<double> cumulative_;
};

struct RecursionOptions {
  double step = 0.05;
  double tol = 1e-8;
  double damping = 0.5;
  int max_iter = 500;
};

struct RecursionResult {
  PropensityPath path;
  int iterations;
  double residual;
  std::vector<double> residual_history;
  double final_damping;
};

/// Uniform grid of spacing `step` on [0, horizon(market)], with the
/// breakpoints of r and w added as nodes.
std::vector<double> recursion_grid(const MarketPath& market, double step);

/// One application of the fixed-point map at the nodes of lam's grid.
std::vector<double> recursion_map(const DiscountSpec& h, const MarketPath& market, double gamma,
                                  const PropensityPath& lam);

/// Damped Picard iteration. Throws NonConvergenceError after max_iter sweeps
/// and ErrorKind::InadmissibleIterate on a non-positive iterate.
RecursionResult solve_recursion(const DiscountSpec& h, const MarketPath& market, double gamma,
                                const RecursionOptions& opt = {});

/// Closed form for exponential discount e^{-rho t}:
/// 1 / int_t^inf exp((1/gamma) int_t^s ((1-gamma) r - rho)) ds, by adaptive
/// quadrature split at the breakpoints of r.
PropensityPath lambda_bar_constant_discount(const MarketPath& market, double rho, double gamma,
                                            const std::vector<double>& grid);

/// lambda(t) (k + HW(t)).
double policy_sigma(const PropensityPath& lam, const MarketPath& market, double t, double k);

/// lambda(t)^{-gamma} (k + HW(t))^{1-gamma} / (1 - gamma); gamma != 1.
double value_phe(const PropensityPath& lam, const MarketPath& market, double gamma, double t,
                 double k);

/// Capital at s along the policy started from k at t:
/// e^{int_t^s (r - lambda)} (k + HW(t)) - HW(s).
double flow_closed_form(const PropensityPath& lam, const MarketPath& market, double s, double t,
                        double k);

/// int_t^inf h(s - t) u(sigma(s, K(s, t, k))) ds by adaptive quadrature along
/// the closed-form flow with an exact stationary tail (gamma != 1).
double ie_value(const PropensityPath& lam, const MarketPath& market, const DiscountSpec& h,
                double gamma, double t, double k);

}  // namespace tc
