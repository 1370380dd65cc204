#pragma once

// Shared numerical plumbing: fixed and adaptive Gauss rules, bracketed root
// refinement, sign-change scans and a deterministic parallel loop.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tc::num {

using Fn = std::function<double(double)>;

/// Fixed 4-point Gauss-Legendre rule on [a, b].
double gauss4(const Fn& f, double a, double b);

/// Fixed 16-point Gauss-Legendre rule on [a, b].
double gauss16(const Fn& f, double a, double b);

/// Adaptive Gauss-Kronrod (15 point) on a finite interval.
double adaptive(const Fn& f, double a, double b, double rel_tol = 1e-12,
                double* error_estimate = nullptr);

/// Adaptive integration over [a, b] with panels split exactly at `breaks`
/// (points outside (a, b) are ignored).
double adaptive_split(const Fn& f, double a, double b,
                      std::span<const double> breaks, double rel_tol = 1e-12);

/// Root of f on [lo, hi] where f(lo) and f(hi) have opposite signs.
/// Refined until the bracket width is below x_tol.
double refine_root(const Fn& f, double lo, double hi, double x_tol,
                   int max_iter = 400);

/// Same as refine_root but with known endpoint values.
double refine_root(const Fn& f, double lo, double hi, double f_lo, double f_hi,
                   double x_tol, int max_iter = 400);

struct Bracket {
  double lo;
  double hi;
  double f_lo;
  double f_hi;
};

/// Evaluates f on `points` (increasing) and returns every adjacent pair with a
/// strict sign change. Non-finite evaluations are skipped.
std::vector<Bracket> sign_changes(const Fn& f, std::span<const double> points);

/// n points log-spaced on [lo, hi], lo > 0.
std::vector<double> logspace(double lo, double hi, std::size_t n);

/// n points evenly spaced on [lo, hi], endpoints included.
std::vector<double> linspace(double lo, double hi, std::size_t n);

/// Worker count: TIMECONSISTENT_THREADS if set (>= 1), otherwise the hardware
/// concurrency.
unsigned thread_count();

/// Runs body(i) for i in [0, n). Iterations are independent; results must be
/// written to per-index slots so the outcome does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Formats a double with 17 significant digits.
std::string fmt17(double x);

}  // namespace tc::num
