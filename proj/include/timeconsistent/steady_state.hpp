#pragma once

// Equilibrium points of the Ramsey problem under non-exponential discounting.
//
// A steady state k with marginal product x = f'(k) is a candidate equilibrium
// point when some alpha solves  alpha * int_0^inf h(t) e^{(x - alpha) t} dt = 1
// with alpha >= x.

#include <optional>
#include <string>
#include <vector>

#include "timeconsistent/discount.hpp"
#include "timeconsistent/market.hpp"
#include "timeconsistent/utility.hpp"

namespace tc {

enum class AlphaStatus { Solved, NoSolution, Degenerate };

const char* to_string(AlphaStatus s);

struct AlphaResult {
  AlphaStatus status = AlphaStatus::NoSolution;
  double alpha = 0.0;  // meaningful when Solved
  /// alpha >= x (always true for Degenerate, false for NoSolution).
  bool admissible = false;
  double residual = 0.0;
  int roots_found = 0;
};

/// alpha J(alpha - x) - 1.
double alpha_residual(const DiscountSpec& h, double x, double alpha);

/// Roots are searched on alpha > max(0, x - decay_floor(h)), where the
/// integral converges; among several roots the smallest admissible one wins.
/// Degenerate when the residual vanishes identically (exponential h, x = rho).
AlphaResult solve_alpha(const DiscountSpec& h, double x);

/// Larger root of u''(c) alpha (f'(k) - alpha) = -u'(c) f''(k) with c = f(k),
/// for exponential discount at the steady state f'(k) = rho.
double alpha_exponential_quadratic(const ProductionFunction& f, double k_bar, double rho,
                                   const UtilitySpec& u);

/// The branch y != x of y e^{-y} = x e^{-x}; phi(1) = 1. Bisection.
double phi(double x);

/// alpha = phi((x - rho) T) / T when 0 < x - rho <= 1/T, nothing otherwise.
std::optional<double> truncated_exponential_steady_state(double rho, double t_cut, double x);

struct SteadyStateRow {
  double k;
  double fprime;
  AlphaResult alpha;
};

struct SteadyStateReport {
  std::vector<SteadyStateRow> rows;
  /// Range of f' and k over admissible rows (empty when none).
  std::optional<std::pair<double, double>> admissible_fprime;
  std::optional<std::pair<double, double>> admissible_k;
};

/// Runs solve_alpha at every grid point. For exponential h and a
/// Cobb-Douglas f the exact steady state f'(k) = rho is added to the grid
/// when it lies inside it.
SteadyStateReport scan_equilibrium_points(const DiscountSpec& h, const ProductionFunction& f,
                                          std::vector<double> k_grid);

}  // namespace tc
