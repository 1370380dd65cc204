#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "check.hpp"
#include "oracles.hpp"
#include "timeconsistent/utility.hpp"

using namespace tc;

TEST_CASE("crra and log") {
  const UtilitySpec u2(2.0);
  CHECK(u2.u(2.0) == doctest::Approx(-0.5));
  CHECK(u2.u_prime(2.0) == doctest::Approx(0.25));
  CHECK(u2.u_second(2.0) == doctest::Approx(-0.25));
  const UtilitySpec lg(1.0);
  CHECK(lg.is_log());
  CHECK(lg.u(std::exp(1.5)) == doctest::Approx(1.5));
  CHECK(lg.u_prime(4.0) == doctest::Approx(0.25));
}

TEST_CASE("inverse marginal utility and conjugate") {
  for (double g : {0.5, 1.0, 2.0, 3.7}) {
    const UtilitySpec u(g);
    for (double c : {0.1, 1.0, 2.5, 40.0}) {
      CAPTURE(g);
      CAPTURE(c);
      CHECK(u.i(u.u_prime(c)) == doctest::Approx(c).epsilon(1e-13));
      const double x = u.u_prime(c);
      // conjugate is the max of u(c) - x c; compare with a golden search
      auto obj = [&](double y) { return u.u(y) - x * y; };
      double lo = c / 50, hi = c * 50;
      for (int k = 0; k < 200; ++k) {
        const double m1 = lo + (hi - lo) * 0.382, m2 = lo + (hi - lo) * 0.618;
        (obj(m1) < obj(m2) ? lo : hi) = obj(m1) < obj(m2) ? m1 : m2;
      }
      CHECK(u.u_tilde(x) == doctest::Approx(obj(0.5 * (lo + hi))).epsilon(1e-10));
      // conjugate slope is -i
      const double e = 1e-6 * x;
      CHECK(u.u_tilde_prime(x) == doctest::Approx(-u.i(x)));
      CHECK((u.u_tilde(x + e) - u.u_tilde(x - e)) / (2 * e) ==
            doctest::Approx(u.u_tilde_prime(x)).epsilon(1e-6));
    }
  }
}

TEST_CASE("domain") {
  CHECK(error_kind([] { UtilitySpec(0.0); }) == ErrorKind::Domain);
  CHECK(error_kind([] { UtilitySpec(-1.0); }) == ErrorKind::Domain);
  CHECK(error_kind([] { UtilitySpec(2.0).u(0.0); }) == ErrorKind::Domain);
  CHECK(error_kind([] { UtilitySpec(2.0).i(-1.0); }) == ErrorKind::Domain);
}
