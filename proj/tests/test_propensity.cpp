#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "check.hpp"
#include "oracles.hpp"
#include "timeconsistent/propensity.hpp"

using namespace tc;

namespace {

// root of 1 = lambda J((1-g)(lambda-r)) with J from quadrature of the given h
double oracle_lambda(const oracle::F& h, double r, double g, double lo, double hi,
                     const std::vector<double>& knots = {}) {
  auto F = [&](double lam) {
    const double a = (1 - g) * (lam - r);
    return lam * oracle::integrate_inf([&](double t) { return h(t) * std::exp(-a * t); }, 0.0,
                                       knots) -
           1;
  };
  return oracle::bisect(F, lo, hi);
}

}  // namespace

TEST_CASE("exponential closed form") {
  const auto p = lambda_exponential(0.05, 0.03, 2.0);
  CHECK(p.lambda() == doctest::Approx(0.04));
  CHECK(p.method() == PropensityMethod::ClosedForm);
  CHECK(lambda_constant(Exponential{0.05}, 0.03, 2.0).lambda() == doctest::Approx(0.04));
  CHECK(lambda_constant(Exponential{0.05}, 0.03, 0.5).lambda() == doctest::Approx(0.07));
  CHECK(error_kind([] { lambda_exponential(0.01, 0.03, 0.5); }) == ErrorKind::NoEquilibrium);
}

TEST_CASE("log utility gives 1 / int h") {
  const auto p = lambda_constant(Mixture{0.5, 0.02, 0.1}, 0.04, 1.0);
  CHECK(p.lambda() == doctest::Approx(1.0 / 30));
  CHECK(p.method() == PropensityMethod::ClosedForm);
}

TEST_CASE("knife edge r int h = 1") {
  const auto p = lambda_constant(Mixture{0.5, 0.02, 0.1}, 1.0 / 30, 3.0);
  CHECK(p.lambda() == doctest::Approx(1.0 / 30).epsilon(1e-12));
  REQUIRE_FALSE(p.notes().empty());
}

TEST_CASE("mixture: reduced equation, generic root and quadrature agree") {
  const auto m = lambda_mixture(0.5, 0.02, 0.1, 0.03, 2.0);
  const auto g = lambda_constant(Mixture{0.5, 0.02, 0.1}, 0.03, 2.0);
  const double ref = oracle_lambda(oracle::mixture(0.5, 0.02, 0.1), 0.03, 2.0, 1e-6, 0.05 - 1e-9);
  CHECK(m.result.lambda() == doctest::Approx(ref).epsilon(1e-10));
  CHECK(g.lambda() == doctest::Approx(ref).epsilon(1e-10));
  CHECK(g.integrability_margin() > 0);
  // bounded by the propensities of the extreme constant rates
  CHECK(m.lambda_under < m.result.lambda());
  CHECK(m.result.lambda() < m.lambda_over);
  CHECK(constant_residual(Mixture{0.5, 0.02, 0.1}, 0.03, 2.0, g.lambda()) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("quasi-hyperbolic") {
  for (double g : {0.5, 2.0, 4.0}) {
    CAPTURE(g);
    const double rho = 0.05, tau = 1.5, delta = 0.7, r = 0.03;
    const auto q = lambda_quasi_hyperbolic(rho, tau, delta, r, g);
    const auto c = lambda_constant(QuasiHyperbolic{rho, tau, delta}, r, g);
    auto F = [&](double lam) { return lam * oracle::J_qh(rho, tau, delta, (1 - g) * (lam - r)) - 1; };
    CHECK(F(q.lambda()) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(q.lambda() == doctest::Approx(c.lambda()).epsilon(1e-10));
  }
  // tiny tau: the jump acts at once and delta scales the whole future
  CHECK(lambda_quasi_hyperbolic(0.05, 1e-6, 0.7, 0.03, 2.0).lambda() ==
        doctest::Approx((0.05 + 0.03) / 1.7).epsilon(1e-4));
  // delta = 1 is exponential
  CHECK(lambda_quasi_hyperbolic(0.05, 2.0, 1.0, 0.03, 2.0).lambda() == doctest::Approx(0.04));
}

TEST_CASE("generalized hyperbolic") {
  struct P {
    double a, b, rho, r, g;
  };
  for (const P& p : {P{1.0, 0.05, 0.05, 0.03, 2.0}, P{1.0, 0.5, 0.02, 0.03, 3.0},
                     P{2.0, 1.0, 0.01, 0.02, 0.6}, P{0.5, 1.3, 0.0, 0.02, 0.5}}) {
    CAPTURE(p.a);
    CAPTURE(p.b);
    const auto c = lambda_constant(GeneralizedHyperbolic{p.a, p.b, p.rho}, p.r, p.g);
    CHECK(c.integrability_margin() > 0);
    if (p.g > 1) {
      const auto h = lambda_hyperbolic(p.a, p.b, p.rho, p.r, p.g);
      CHECK(h.lambda() == doctest::Approx(c.lambda()).epsilon(1e-9));
      CHECK(h.integrability_margin() > 0);
    }
    auto F = [&](double lam) {
      const double a = (1 - p.g) * (lam - p.r);
      return lam * oracle::integrate_inf(
                       [&](double t) { return oracle::hyperbolic(p.a, p.b, p.rho)(t) * std::exp(-a * t); },
                       0.0) -
             1;
    };
    CHECK(std::abs(F(c.lambda())) < 1e-9);
  }
  // Laplace transform through the incomplete gamma function
  for (double c : {0.01, 0.3, 5.0, 900.0}) {
    const double ref = oracle::integrate_inf(
        [&](double t) { return std::pow(1 + 1.5 * t, -0.8 / 1.5) * std::exp(-c * t); }, 0.0);
    CHECK(hyperbolic_laplace(1.5, 0.8, c) == doctest::Approx(ref).epsilon(1e-10));
  }
}

TEST_CASE("truncated exponential: infinite margin, root by quadrature") {
  const auto p = lambda_constant(TruncatedExponential{0.02, 10.0}, 0.03, 2.0);
  CHECK(std::isinf(p.integrability_margin()));
  auto F = [&](double lam) { return lam * oracle::J_truncated(0.02, 10.0, -(lam - 0.03)) - 1; };
  CHECK(p.lambda() == doctest::Approx(oracle::bisect(F, 1e-6, 5.0)).epsilon(1e-10));
}

TEST_CASE("no equilibrium and bad inputs") {
  // lambda J stays below one on the whole admissible range
  CHECK(error_kind([] { lambda_constant(GeneralizedHyperbolic{0.5, 1.2, 0.05}, 0.03, 3.0); }) ==
        ErrorKind::NoEquilibrium);
  CHECK(error_kind([] { lambda_constant(Exponential{0.05}, -0.01, 2.0); }) == ErrorKind::Domain);
  CHECK(error_kind([] { lambda_constant(Exponential{0.05}, 0.03, 0.0); }) == ErrorKind::Domain);
  CHECK(error_kind([] { lambda_mixture(0.5, 0.02, 0.1, 0.03, 0.5); }) == ErrorKind::Domain);
  CHECK(error_kind([] { lambda_hyperbolic(1.0, 0.5, 0.02, 0.03, 0.5); }) == ErrorKind::Domain);
  CHECK(error_kind([] { PropensityResult(-1.0, 1.0, PropensityMethod::RootFind); }) ==
        ErrorKind::NoEquilibrium);
  CHECK(error_kind([] { PropensityResult(0.1, -1.0, PropensityMethod::RootFind); }) ==
        ErrorKind::Divergence);
}

TEST_CASE("uniqueness note") {
  const auto p = lambda_constant(QuasiHyperbolic{0.05, 1.0, 0.6}, 0.03, 2.0);
  bool noted = false;
  for (const auto& n : p.notes()) noted |= n.find("uniqueness") != std::string::npos;
  CHECK(noted);
  CHECK(lambda_constant(Mixture{0.5, 0.02, 0.1}, 0.03, 2.0).notes().empty());
}
