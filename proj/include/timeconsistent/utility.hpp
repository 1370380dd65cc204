#pragma once

// CRRA utility u(c) = c^{1-gamma} / (1 - gamma), with gamma == 1 meaning log.
// i is the inverse of the marginal utility and u_tilde the concave conjugate
// u_tilde(x) = max_c [u(c) - x c] = u(i(x)) - x i(x).

namespace tc {

class UtilitySpec {
 public:
  explicit UtilitySpec(double gamma);

  double gamma() const noexcept { return gamma_; }
  bool is_log() const noexcept { return gamma_ == 1.0; }

  double u(double c) const;
  double u_prime(double c) const;
  double u_second(double c) const;
  /// Inverse marginal utility: i(u'(c)) = c.
  double i(double x) const;
  double u_tilde(double x) const;
  /// Derivative of u_tilde; equals -i(x).
  double u_tilde_prime(double x) const;

  friend bool operator==(const UtilitySpec&, const UtilitySpec&) = default;

 private:
  double gamma_;
};

}  // namespace tc
