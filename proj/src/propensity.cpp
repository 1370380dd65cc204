#include "timeconsistent/propensity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "timeconsistent/error.hpp"
#include "timeconsistent/numerics.hpp"

namespace tc {

namespace {

constexpr const char* kModule = "propensity";
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string str(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

void check_inputs(double r, double gamma) {
  require(std::isfinite(r) && r > 0, kModule, "interest rate r must be > 0");
  require(std::isfinite(gamma) && gamma > 0, kModule, "gamma must be > 0");
}

double margin_for(double decay, double r, double gamma, double lambda) {
  if (!std::isfinite(decay)) return kInf;
  return decay + (1 - gamma) * (lambda - r);
}

// Scan points on (lo, hi) that cluster at both ends, where the admissible
// roots of these equations tend to sit.
std::vector<double> two_sided_scan(double lo, double hi, std::size_t n) {
  const auto s = num::logspace(1e-10, 0.5, n / 2);
  std::vector<double> pts;
  pts.reserve(n);
  for (double x : s) pts.push_back(lo + (hi - lo) * x);
  for (auto it = s.rbegin(); it != s.rend(); ++it) pts.push_back(hi - (hi - lo) * *it);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

double refine(const num::Fn& f, const num::Bracket& b) {
  if (b.lo == b.hi) return b.lo;
  return num::refine_root(f, b.lo, b.hi, b.f_lo, b.f_hi, 1e-15 * std::max(1.0, b.hi));
}

// e^z Gamma(s, z) for real s and z > 0.
double scaled_upper_gamma(double s, double z) {
  if (s > 0) return std::exp(z) * boost::math::tgamma(s, z);
  if (s == 0) return std::exp(z) * boost::math::expint(1, z);
  // Gamma(s, z) = (Gamma(s + 1, z) - z^s e^{-z}) / s.
  return (scaled_upper_gamma(s + 1, z) - std::pow(z, s)) / s;
}

}  // namespace

const char* to_string(PropensityMethod m) {
  return m == PropensityMethod::ClosedForm ? "closed_form" : "root_find";
}

PropensityResult::PropensityResult(double lambda, double integrability_margin,
                                   PropensityMethod method, std::vector<std::string> notes,
                                   int roots_found)
    : lambda_(lambda),
      margin_(integrability_margin),
      method_(method),
      notes_(std::move(notes)),
      roots_found_(roots_found) {
  if (!(lambda > 0 && std::isfinite(lambda)))
    fail(ErrorKind::NoEquilibrium, kModule, "propensity must be > 0 (got " + str(lambda) + ")");
  if (!(integrability_margin > 0))
    fail(ErrorKind::Divergence, kModule,
         "integrability margin must be > 0 (got " + str(integrability_margin) + ")");
}

double constant_residual(const DiscountSpec& h, double r, double gamma, double lambda) {
  return 1 - lambda * weighted_integral(h, (1 - gamma) * (lambda - r));
}

PropensityResult lambda_constant(const DiscountSpec& h, double r, double gamma) {
  check_inputs(r, gamma);
  const double d = decay_floor(h);
  const double mass = total_mass(h);
  if (gamma == 1.0) {
    const double lam = 1 / mass;
    return {lam, margin_for(d, r, gamma, lam), PropensityMethod::ClosedForm};
  }
  if (std::abs(r * mass - 1) < 1e-12)
    return {r, margin_for(d, r, gamma, r), PropensityMethod::ClosedForm, {"knife-edge: lambda = r"}};

  // Admissible propensities keep the discount integral finite.
  double lo = 0.0;
  double hi = kInf;
  if (std::isfinite(d)) {
    if (gamma > 1)
      hi = r + d / (gamma - 1);
    else
      lo = std::max(0.0, r - d / (1 - gamma));
  }

  auto F = [&](double lam) {
    const double a = (1 - gamma) * (lam - r);
    if (!weighted_integral_converges(h, a)) return std::numeric_limits<double>::quiet_NaN();
    return lam * weighted_integral(h, a) - 1;
  };

  std::vector<num::Bracket> brackets;
  bool any_finite = false;
  double cap = 10 * (r + inst_rate(h, 0.0)) + 10;
  for (int attempt = 0; attempt < 12; ++attempt) {
    const double top = std::isfinite(hi) ? hi : cap;
    const auto pts = two_sided_scan(lo, top, 256);
    for (double p : pts)
      if (std::isfinite(F(p))) {
        any_finite = true;
        break;
      }
    brackets = num::sign_changes(F, pts);
    if (!brackets.empty() || std::isfinite(hi)) break;
    cap *= 4;
  }
  if (!any_finite)
    fail(ErrorKind::Divergence, kModule,
         "integrability violated: the discount integral diverges on the whole admissible range");
  if (brackets.empty())
    fail(ErrorKind::NoEquilibrium, kModule,
         "no equilibrium propensity: 1 - lambda J((1-gamma)(lambda-r)) has no sign change on the "
         "admissible range");

  const double lam = refine(F, brackets.front());
  std::vector<std::string> notes;
  if (brackets.size() > 1)
    notes.push_back("multiple roots found (" + std::to_string(brackets.size()) +
                    "); smallest admissible root returned");
  const bool proved =
      h.as<Exponential>() != nullptr ||
      ((h.as<Mixture>() || h.as<GeneralizedHyperbolic>()) && gamma > 1) ||
      (h.as<QuasiHyperbolic>() && gamma < 1);
  if (!proved) notes.push_back("uniqueness unproved for this family and gamma");
  return {lam, margin_for(d, r, gamma, lam), PropensityMethod::RootFind, std::move(notes),
          static_cast<int>(brackets.size())};
}

PropensityResult lambda_exponential(double rho, double r, double gamma) {
  check_inputs(r, gamma);
  require(rho > 0, kModule, "rho must be > 0");
  if (!(rho - r * (1 - gamma) > 0))
    fail(ErrorKind::NoEquilibrium, kModule,
         "lambda_0 <= 0: rho - r(1 - gamma) = " + str(rho - r * (1 - gamma)) + " must be > 0");
  const double lam = r + (rho - r) / gamma;
  return {lam, rho + (1 - gamma) * (lam - r), PropensityMethod::ClosedForm};
}

MixturePropensity lambda_mixture(double omega, double rho1, double rho2, double r,
                                 double gamma) {
  check_inputs(r, gamma);
  require(gamma > 1, kModule, "lambda_mixture requires gamma > 1");
  require(omega > 0 && omega < 1, kModule, "lambda_mixture requires omega in (0, 1)");
  require(rho1 > 0 && rho1 < rho2, kModule, "lambda_mixture requires 0 < rho1 < rho2");

  auto f = [&](double lam) {
    const double shift = (lam - r) * (1 - gamma);
    return omega / (rho1 + shift) + (1 - omega) / (rho2 + shift) - 1 / lam;
  };
  const double upper = r + rho1 / (gamma - 1);
  // f is increasing on (0, upper) from -inf to +inf.
  double lo = upper * 1e-12;
  double hi = upper * (1 - 1e-15);
  while (!(f(lo) < 0)) lo *= 1e-3;
  while (!(f(hi) > 0) && hi < upper) hi = std::nextafter(hi, upper);
  const double lam = num::refine_root(f, lo, hi, 1e-15 * std::max(1.0, upper));

  const double rho0 = omega * rho1 + (1 - omega) * rho2;
  const double under = r + (rho1 - r) / gamma;
  const double over = r + (rho0 - r) / gamma;
  if (!(under < lam))
    fail(ErrorKind::Diagnostic, kModule,
         "mixture ordering violated: lambda_under = " + str(under) + " >= lambda_1 = " + str(lam));
  return {PropensityResult(lam, rho1 + (1 - gamma) * (lam - r), PropensityMethod::RootFind),
          under, over};
}

PropensityResult lambda_quasi_hyperbolic(double rho, double tau, double delta, double r,
                                         double gamma) {
  check_inputs(r, gamma);
  require(rho > 0 && tau > 0, kModule, "quasi-hyperbolic requires rho > 0 and tau > 0");
  require(delta > 0 && delta <= 1, kModule, "quasi-hyperbolic requires delta in (0, 1]");
  if (delta == 1) return lambda_exponential(rho, r, gamma);
  const double rt = rho - r * (1 - gamma);
  require(rt > 0, kModule, "quasi-hyperbolic requires rho - r(1 - gamma) > 0");

  auto margin = [&](double lam) { return rt + lam * (1 - gamma); };
  if (gamma == 1) {
    const double lam = rho / (1 - (1 - delta) * std::exp(-rho * tau));
    return {lam, margin(lam), PropensityMethod::ClosedForm};
  }

  auto f = [&](double lam) {
    return gamma - (1 - delta) * std::exp(-margin(lam) * tau) - rt / lam;
  };
  std::vector<num::Bracket> brackets;
  if (gamma > 1) {
    // f(0+) = -inf and f(rt / (gamma - 1)) = delta > 0.
    const double upper = rt / (gamma - 1);
    brackets = num::sign_changes(f, two_sided_scan(0.0, upper, 256));
    if (brackets.empty() && f(upper) > 0) {
      double lo = upper * 1e-12;
      while (!(f(lo) < 0)) lo *= 1e-3;
      brackets.push_back({lo, upper, f(lo), f(upper)});
    }
  } else {
    // f is increasing from -inf to gamma.
    double hi = 10 * (rt + r) + 1;
    while (!(f(hi) > 0)) hi *= 2;
    brackets = num::sign_changes(f, two_sided_scan(0.0, hi, 256));
  }
  if (brackets.empty())
    fail(ErrorKind::NoEquilibrium, kModule, "no equilibrium propensity for quasi-hyperbolic h");
  const double lam = refine(f, brackets.front());
  std::vector<std::string> notes;
  if (brackets.size() > 1)
    notes.push_back("multiple roots found (" + std::to_string(brackets.size()) +
                    "); smallest admissible root returned");
  if (gamma > 1) notes.push_back("uniqueness unproved for this family and gamma");
  return {lam, margin(lam), PropensityMethod::RootFind, std::move(notes),
          static_cast<int>(brackets.size())};
}

double hyperbolic_laplace(double a, double b, double c) {
  require(a > 0 && b > 0 && c > 0, kModule, "hyperbolic_laplace needs a, b, c > 0");
  const double p = b / a;
  const double z = c / a;
  // Beyond this e^z Gamma(s, z) cannot be formed from the unscaled function.
  if (z > 600) return weighted_integral(DiscountSpec(GeneralizedHyperbolic{a, b, 0.0 + c}), 0.0);
  return std::pow(z, p - 1) * scaled_upper_gamma(1 - p, z) / a;
}

PropensityResult lambda_hyperbolic(double a, double b, double rho, double r, double gamma) {
  check_inputs(r, gamma);
  require(a > 0 && b > 0 && rho > 0, kModule, "lambda_hyperbolic requires a, b, rho > 0");
  require(gamma > 1, kModule, "lambda_hyperbolic requires gamma > 1");
  const double upper = r + rho / (gamma - 1);
  auto f = [&](double lam) {
    return hyperbolic_laplace(a, b, rho + (lam - r) * (1 - gamma)) - 1 / lam;
  };
  double lo = upper * 1e-12;
  while (!(f(lo) < 0)) lo *= 1e-3;
  double hi = upper * (1 - 1e-12);
  if (!(f(hi) > 0))
    fail(ErrorKind::NoEquilibrium, kModule,
         "no equilibrium propensity on (0, r + rho/(gamma-1)) for the generalized hyperbolic h");
  const double lam = num::refine_root(f, lo, hi, 1e-15 * std::max(1.0, upper));
  return {lam, rho + (1 - gamma) * (lam - r), PropensityMethod::RootFind};
}

}  // namespace tc
