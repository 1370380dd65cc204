#pragma once

// Reference computations for the tests. They deliberately avoid the library:
// discount functions are written out by hand, integrals go straight to Boost
// and roots are found by plain bisection.

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/lambert_w.hpp>

namespace oracle {

using F = std::function<double(double)>;

inline double integrate(const F& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-13);
}

// int_a^inf f, split at a finite knot list so kinks land on panel edges
inline double integrate_inf(const F& f, double a, const std::vector<double>& knots = {}) {
  double total = 0.0;
  double lo = a;
  for (double k : knots)
    if (k > lo) {
      total += integrate(f, lo, k);
      lo = k;
    }
  boost::math::quadrature::exp_sinh<double> es;
  // far out the product h e^{-at} can read 0 * inf; the true value there is 0
  return total + es.integrate(
                     [&](double s) {
                       const double v = f(lo + s);
                       return std::isfinite(v) ? v : 0.0;
                     },
                     1e-13);
}

// bisection; f(lo) and f(hi) must differ in sign
inline double bisect(const F& f, double lo, double hi) {
  double flo = f(lo);
  if (flo * f(hi) > 0) throw std::runtime_error("bisect: no sign change");
  for (int i = 0; i < 300 && hi - lo > 1e-16 * std::max(1.0, std::abs(hi)); ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// the other root y of y e^{-y} = x e^{-x}, via Lambert W
inline double phi(double x) {
  if (x == 1.0) return 1.0;
  const double z = -x * std::exp(-x);
  return x < 1 ? -boost::math::lambert_wm1(z) : -boost::math::lambert_w0(z);
}

// hand-written discount functions
inline F exponential(double rho) {
  return [=](double t) { return std::exp(-rho * t); };
}
inline F mixture(double w, double r1, double r2) {
  return [=](double t) { return w * std::exp(-r1 * t) + (1 - w) * std::exp(-r2 * t); };
}
inline F quasi_hyperbolic(double rho, double tau, double delta) {
  return [=](double t) { return (t <= tau ? 1.0 : delta) * std::exp(-rho * t); };
}
inline F hyperbolic(double a, double b, double rho) {
  return [=](double t) { return std::pow(1 + a * t, -b / a) * std::exp(-rho * t); };
}
inline F truncated(double rho, double T) {
  return [=](double t) { return t <= T ? std::exp(-rho * t) : 0.0; };
}

// closed-form J(a) for the exponential-type families
inline double J_mixture(double w, double r1, double r2, double a) {
  return w / (r1 + a) + (1 - w) / (r2 + a);
}
inline double J_qh(double rho, double tau, double delta, double a) {
  return (1 - (1 - delta) * std::exp(-(rho + a) * tau)) / (rho + a);
}
inline double J_truncated(double rho, double T, double a) {
  const double s = rho + a;
  return s == 0 ? T : -std::expm1(-s * T) / s;
}

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(unsigned long long seed) : gen(seed) {}
  double operator()(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen);
  }
};

inline double rel(double a, double b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); }

}  // namespace oracle
