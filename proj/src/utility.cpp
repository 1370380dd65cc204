#include "timeconsistent/utility.hpp"

#include <cmath>
#include <string>

#include "timeconsistent/error.hpp"

namespace tc {

namespace {
constexpr const char* kModule = "utility";

void positive(double x, const char* what) {
  if (!(x > 0 && std::isfinite(x)))
    fail(ErrorKind::Domain, kModule, std::string(what) + " requires a strictly positive argument");
}
}  // namespace

UtilitySpec::UtilitySpec(double gamma) : gamma_(gamma) {
  require(gamma > 0 && std::isfinite(gamma), kModule, "gamma must be > 0");
}

double UtilitySpec::u(double c) const {
  positive(c, "u");
  if (is_log()) return std::log(c);
  return std::pow(c, 1 - gamma_) / (1 - gamma_);
}

double UtilitySpec::u_prime(double c) const {
  positive(c, "u'");
  return std::pow(c, -gamma_);
}

double UtilitySpec::u_second(double c) const {
  positive(c, "u''");
  return -gamma_ * std::pow(c, -gamma_ - 1);
}

double UtilitySpec::i(double x) const {
  positive(x, "i");
  if (is_log()) return 1 / x;
  return std::pow(x, -1 / gamma_);
}

double UtilitySpec::u_tilde(double x) const {
  positive(x, "u_tilde");
  if (is_log()) return -std::log(x) - 1;
  return gamma_ / (1 - gamma_) * std::pow(x, (gamma_ - 1) / gamma_);
}

double UtilitySpec::u_tilde_prime(double x) const { return -i(x); }

}  // namespace tc
