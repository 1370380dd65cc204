#pragma once

// Constant propensities to consume in a constant-interest environment.
//
// With r(t) = r and lambda(t) = lambda the fixed-point equation for the
// propensity collapses to the scalar root problem
//
//     1 = lambda * J((1 - gamma) (lambda - r)),   J(a) = int_0^inf h(t) e^{-a t} dt,
//
// which lambda_constant solves for any discount family. The family-specific
// solvers work from their own closed forms or reduced equations and serve as
// independent routes to the same root.

#include <string>
#include <vector>

#include "timeconsistent/discount.hpp"

namespace tc {

enum class PropensityMethod { ClosedForm, RootFind };

const char* to_string(PropensityMethod m);

class PropensityResult {
 public:
  /// Throws unless lambda > 0 and integrability_margin > 0.
  PropensityResult(double lambda, double integrability_margin, PropensityMethod method,
                   std::vector<std::string> notes = {}, int roots_found = 1);

  double lambda() const noexcept { return lambda_; }
  /// d + (1 - gamma)(lambda - r) with d the asymptotic decay rate of h; the
  /// quantity the integrability condition requires to be positive (+inf when
  /// h has compact support).
  double integrability_margin() const noexcept { return margin_; }
  PropensityMethod method() const noexcept { return method_; }
  const std::vector<std::string>& notes() const noexcept { return notes_; }
  int roots_found() const noexcept { return roots_found_; }

 private:
  double lambda_;
  double margin_;
  PropensityMethod method_;
  std::vector<std::string> notes_;
  int roots_found_;
};

/// 1 - lambda J((1 - gamma)(lambda - r)).
double constant_residual(const DiscountSpec& h, double r, double gamma, double lambda);

PropensityResult lambda_constant(const DiscountSpec& h, double r, double gamma);

/// lambda_0 = r + (rho - r) / gamma.
PropensityResult lambda_exponential(double rho, double r, double gamma);

struct MixturePropensity {
  PropensityResult result;
  /// Propensity if the discount rate were constant at rho1 (long run).
  double lambda_under;
  /// Propensity if the discount rate were constant at omega rho1 + (1 - omega) rho2.
  double lambda_over;
};

/// Unique root of the reduced rational equation on (0, r + rho1/(gamma - 1)); gamma > 1.
MixturePropensity lambda_mixture(double omega, double rho1, double rho2, double r, double gamma);

/// Root of gamma - (1 - delta) e^{-(rt + lambda (1 - gamma)) tau} - rt / lambda with
/// rt = rho - r (1 - gamma).
PropensityResult lambda_quasi_hyperbolic(double rho, double tau, double delta, double r,
                                         double gamma);

/// Unique root on (0, r + rho/(gamma - 1)) for the generalized hyperbolic family;
/// the discount integral is evaluated through the upper incomplete gamma function.
PropensityResult lambda_hyperbolic(double a, double b, double rho, double r, double gamma);

/// int_0^inf (1 + a s)^{-b/a} e^{-c s} ds by the incomplete gamma function
/// (c > 0).
double hyperbolic_laplace(double a, double b, double c);

}  // namespace tc
