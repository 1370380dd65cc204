#pragma once

// Discount functions h(t): h(0) = 1, non-increasing, vanishing at infinity.
//
// Five parametric families are supported. All of them decay at least like an
// exponential times a power, which is what the quadrature fallbacks rely on.

#include <optional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "json.hpp"

namespace tc {

struct Exponential {
  double rho;
};

/// h(t) = omega e^{-rho1 t} + (1 - omega) e^{-rho2 t}, 0 < rho1 < rho2.
struct Mixture {
  double omega;
  double rho1;
  double rho2;
};

/// e^{-rho t} up to tau (inclusive), delta e^{-rho t} afterwards.
struct QuasiHyperbolic {
  double rho;
  double tau;
  double delta;
};

/// h(t) = (1 + a t)^{-b/a} e^{-rho t}.
struct GeneralizedHyperbolic {
  double a;
  double b;
  double rho;
};

/// e^{-rho t} on [0, t_cut], 0 afterwards.
struct TruncatedExponential {
  double rho;
  double t_cut;
};

using DiscountFamily = std::variant<Exponential, Mixture, QuasiHyperbolic,
                                    GeneralizedHyperbolic, TruncatedExponential>;

/// Immutable, validated discount function.
class DiscountSpec {
 public:
  DiscountSpec(DiscountFamily family);  // NOLINT: implicit by design of the API
  template <class T>
    requires std::is_constructible_v<DiscountFamily, T>
  DiscountSpec(T family) : DiscountSpec(DiscountFamily(family)) {}  // NOLINT

  const DiscountFamily& family() const noexcept { return family_; }
  std::string family_name() const;

  template <class T>
  const T* as() const noexcept {
    return std::get_if<T>(&family_);
  }

  friend bool operator==(const DiscountSpec& a, const DiscountSpec& b);

 private:
  DiscountFamily family_;
};

/// A point where h jumps: h(at+) - h(at-) = size (negative).
struct Jump {
  double at;
  double size;
};

double eval_h(const DiscountSpec& h, double t);

/// dh/dt. Throws ErrorKind::Kink exactly at a jump of h.
double eval_h_prime(const DiscountSpec& h, double t);

/// -h'(t)/h(t). Throws when h(t) = 0.
double inst_rate(const DiscountSpec& h, double t);

/// J(a) = int_0^inf h(t) e^{-a t} dt. Throws ErrorKind::Divergence outside the
/// convergence region.
double weighted_integral(const DiscountSpec& h, double a);

/// int_{u0}^inf h(u) e^{-a (u - u0)} du, u0 >= 0. weighted_integral(h, a) is
/// tail_integral(h, a, 0).
double tail_integral(const DiscountSpec& h, double a, double u0);

/// int_0^inf h(t) dt.
double total_mass(const DiscountSpec& h);

/// Smallest asymptotic exponential decay rate d: J(a) converges for a > -d.
/// +infinity for the truncated family.
double decay_floor(const DiscountSpec& h);

/// Whether J converges at a (handles the boundary case of the generalized
/// hyperbolic family).
bool weighted_integral_converges(const DiscountSpec& h, double a);

/// Discontinuities of h on (0, inf).
std::vector<Jump> jumps(const DiscountSpec& h);

/// Points where h or h' is not smooth (jump locations).
std::vector<double> kinks(const DiscountSpec& h);

void to_json(nlohmann::json& j, const DiscountSpec& h);
DiscountSpec discount_from_json(const nlohmann::json& j);

}  // namespace tc
