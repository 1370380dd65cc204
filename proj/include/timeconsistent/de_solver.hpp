#pragma once

// Finite-horizon solver for the nonlocal equilibrium equation in integrated
// form,
//
//   V(t,k) = int_t^T h(s-t) u(sigma(s, K(s,t,k))) ds + h(T-t) g(K(T,t,k)),
//   sigma  = i(dV/dk),
//
// by Picard iteration on sigma over a rectangular (t, k) grid, plus the
// differentiated-form residual, the resolvent of the linearized flow, the
// one-shot deviation payoff and the effective discount rate.

#include <vector>

#include "timeconsistent/discount.hpp"
#include "timeconsistent/market.hpp"
#include "timeconsistent/utility.hpp"

namespace tc {

struct GridSpec {
  double horizon = 10.0;
  int nt = 40;  // time intervals
  double k_lo = 1.0;
  double k_hi = 10.0;
  int nk = 40;  // capital intervals
  /// RK4 steps per time cell along each flow; even, so Simpson applies.
  int substeps = 2;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

void validate(const GridSpec& s);

/// g(k) = scale * u(k + shift) + offset.
struct TerminalUtility {
  double scale = 1.0;
  double shift = 0.0;
  double offset = 0.0;

  double value(const UtilitySpec& u, double k) const;
  double slope(const UtilitySpec& u, double k) const;

  friend bool operator==(const TerminalUtility&, const TerminalUtility&) = default;
};

/// Infinite-horizon value for exponential discount rho in the market
/// f = r k + w, which makes the finite-horizon problem stationary.
TerminalUtility matched_terminal(const UtilitySpec& u, double rho, double r, double w);

struct ValueGrid {
  GridSpec spec;
  TerminalUtility g;
  std::vector<double> t_grid;
  std::vector<double> k_grid;
  std::vector<double> V;      // row-major, V[i * (nk + 1) + j]
  std::vector<double> sigma;  // same layout
  /// Nodes whose flow left [k_lo, k_hi] and used clamped policy lookups.
  std::vector<char> tainted;
  int iterations = 0;
  std::vector<double> residual_history;

  ValueGrid(GridSpec s, TerminalUtility g);

  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(spec.nk + 1) +
           static_cast<std::size_t>(j);
  }
  double dt() const { return spec.horizon / spec.nt; }
  double dk() const { return (spec.k_hi - spec.k_lo) / spec.nk; }
  double v(int i, int j) const { return V[index(i, j)]; }
  double s(int i, int j) const { return sigma[index(i, j)]; }

  /// Bilinear policy; capital outside the window is clamped and reported.
  double sigma_at(double t, double k, bool* clamped = nullptr) const;
  /// k-derivative of the bilinear policy.
  double sigma_k_at(double t, double k) const;
  /// Second-order finite differences (one-sided on the edges).
  double V_k(int i, int j) const;
  double V_t(int i, int j) const;
  std::size_t tainted_count() const;
  /// Interior node whose finite-difference stencil (the node and its four
  /// neighbours) is untainted; residuals elsewhere see clamped data.
  bool clean_stencil(int i, int j) const;
};

struct IeOptions {
  double tol = 1e-6;
  double damping = 1.0;
  int max_iter = 200;
  /// Throw ErrorKind::WindowViolation instead of flagging the node.
  bool strict_window = false;
};

/// Picard iteration on sigma, warm-started from the exponential-discount
/// HJB solution with rho = inst_rate(h, 0). Throws NonConvergenceError.
ValueGrid solve_ie(const DiscountSpec& h, const UtilitySpec& u, const Environment& env,
                   const TerminalUtility& g, const GridSpec& spec, const IeOptions& opt = {});

/// Method of lines for V_t = rho V - u~(V_k) - V_k f(t, k): central
/// differences in k, RK4 backward in time with `substeps` steps per cell.
ValueGrid solve_hjb_exponential(double rho, const UtilitySpec& u, const Environment& env,
                                const TerminalUtility& g, const GridSpec& spec,
                                int substeps = 8);

struct IeEvaluation {
  double value;
  bool tainted;
};

/// Right-hand side of the integrated equation at (t, k) under the grid
/// policy, with `substeps` RK4 steps per time cell.
IeEvaluation ie_evaluate(const ValueGrid& grid, const DiscountSpec& h, const UtilitySpec& u,
                         const Environment& env, double t, double k, int substeps);

/// Left side of the differentiated equation at an interior node,
///   V_t + int_t^T h'(s-t) u(sigma) ds + h'(T-t) g(K_T) + u~(V_k) + V_k f,
/// plus jump(h) * u(sigma(t + tau)) for every jump of h inside the horizon.
double de_residual(const ValueGrid& grid, const DiscountSpec& h, const UtilitySpec& u,
                   const Environment& env, int i, int j);

/// V_t - rho V + u~(V_k) + V_k f at an interior node.
double hjb_residual(const ValueGrid& grid, double rho, const UtilitySpec& u,
                    const Environment& env, int i, int j);

struct ResolventPath {
  std::vector<double> times;
  std::vector<double> values;   // R(s, t)
  std::vector<double> capital;  // K(s, t, k)
};

/// dR/ds = (f_k - sigma_k) R, R(t, t) = 1, integrated with the flow.
ResolventPath resolvent(const ValueGrid& grid, const Environment& env, double t, double k,
                        double s_end);

/// K(s_end, t, k) under the grid policy (same stepping as resolvent).
double flow_capital(const ValueGrid& grid, const Environment& env, double t, double k,
                    double s_end);

struct P1Result {
  double direct;   // through the resolvent
  double reduced;  // u(c) - u(sigma) - u'(sigma)(c - sigma)
  bool tainted;    // equilibrium flow from (t, k) leaves the window before T
};

/// Throws ErrorKind::Diagnostic when the two routes differ by more than
/// `agreement` (signals a non-converged grid). Not checked on tainted
/// starts, where the direct route sees the clamped policy.
P1Result p1_payoff(const ValueGrid& grid, const DiscountSpec& h, const UtilitySpec& u,
                   const Environment& env, double t, double k, double c,
                   double agreement = 1e-4);

/// -(int h'(s-t) u ds + h'(T-t) g + jump terms) / V(t, k) at a grid node.
double effective_discount_rate(const ValueGrid& grid, const DiscountSpec& h,
                               const UtilitySpec& u, const Environment& env, int i, int j);

}  // namespace tc
