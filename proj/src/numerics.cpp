#include "timeconsistent/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "timeconsistent/error.hpp"

namespace tc {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Kink: return "kink";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::NoEquilibrium: return "no-equilibrium";
    case ErrorKind::NonConvergence: return "non-convergence";
    case ErrorKind::InadmissibleIterate: return "inadmissible-iterate";
    case ErrorKind::WindowViolation: return "window-violation";
    case ErrorKind::Diagnostic: return "diagnostic";
    case ErrorKind::Config: return "config";
  }
  return "unknown";
}

}  // namespace tc

namespace tc::num {

namespace bq = boost::math::quadrature;

double gauss4(const Fn& f, double a, double b) {
  return bq::gauss<double, 4>::integrate(f, a, b);
}

double gauss16(const Fn& f, double a, double b) {
  return bq::gauss<double, 16>::integrate(f, a, b);
}

double adaptive(const Fn& f, double a, double b, double rel_tol,
                double* error_estimate) {
  if (a == b) {
    if (error_estimate) *error_estimate = 0.0;
    return 0.0;
  }
  double err = 0.0;
  double l1 = 0.0;
  const double v =
      bq::gauss_kronrod<double, 15>::integrate(f, a, b, 20, rel_tol, &err, &l1);
  if (error_estimate) *error_estimate = err;
  return v;
}

double adaptive_split(const Fn& f, double a, double b,
                      std::span<const double> breaks, double rel_tol) {
  std::vector<double> pts{a};
  for (double x : breaks)
    if (x > a && x < b) pts.push_back(x);
  std::sort(pts.begin() + 1, pts.end());
  pts.push_back(b);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    total += adaptive(f, pts[i], pts[i + 1], rel_tol);
  return total;
}

double refine_root(const Fn& f, double lo, double hi, double x_tol,
                   int max_iter) {
  return refine_root(f, lo, hi, f(lo), f(hi), x_tol, max_iter);
}

double refine_root(const Fn& f, double lo, double hi, double f_lo, double f_hi,
                   double x_tol, int max_iter) {
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if ((f_lo > 0) == (f_hi > 0))
    fail(ErrorKind::Domain, "numerics", "refine_root: bracket has no sign change");
  auto tol = [x_tol](double x, double y) { return std::abs(x - y) <= x_tol; };
  std::uintmax_t iters = static_cast<std::uintmax_t>(max_iter);
  const auto r = boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi, tol, iters);
  return 0.5 * (r.first + r.second);
}

std::vector<Bracket> sign_changes(const Fn& f, std::span<const double> points) {
  std::vector<Bracket> out;
  bool have_prev = false;
  double x_prev = 0.0;
  double f_prev = 0.0;
  for (double x : points) {
    double fx;
    try {
      fx = f(x);
    } catch (const Error&) {
      continue;
    }
    if (!std::isfinite(fx)) continue;
    if (have_prev && ((f_prev < 0 && fx > 0) || (f_prev > 0 && fx < 0)))
      out.push_back({x_prev, x, f_prev, fx});
    if (fx == 0.0 && (!have_prev || f_prev != 0.0))
      out.push_back({x, x, 0.0, 0.0});
    have_prev = true;
    x_prev = x;
    f_prev = fx;
  }
  return out;
}

std::vector<double> logspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  const double la = std::log(lo);
  const double lb = std::log(hi);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = std::exp(la + (lb - la) * static_cast<double>(i) /
                             static_cast<double>(n - 1));
  v.front() = lo;
  v.back() = hi;
  return v;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  v.back() = hi;
  return v;
}

unsigned thread_count() {
  if (const char* env = std::getenv("TIMECONSISTENT_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(thread_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr first_error;
  std::mutex mu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      // Static striding keeps the index-to-thread map deterministic.
      for (std::size_t i = w; i < n; i += workers) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace tc::num
