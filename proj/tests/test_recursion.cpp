#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "check.hpp"
#include "oracles.hpp"
#include "timeconsistent/propensity.hpp"
#include "timeconsistent/recursion.hpp"

using namespace tc;

namespace {

MarketPath stepped_market() {
  return {TimeFunction(TimeFunction::PiecewiseConstant{{5.0, 12.0}, {0.02, 0.05, 0.035}}),
          TimeFunction(1.0), 0.0};
}

double sup_diff(const PropensityPath& a, const PropensityPath& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i)
    m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

}  // namespace

TEST_CASE("propensity path interpolation and integral") {
  const PropensityPath p({0.0, 1.0, 3.0}, {0.1, 0.3, 0.2});
  CHECK(p(0.5) == doctest::Approx(0.2));
  CHECK(p(10.0) == 0.2);
  CHECK(p.antiderivative(3.0) == doctest::Approx(0.2 + 0.5));
  CHECK(p.integral(3.0, 5.0) == doctest::Approx(0.4));
  CHECK(error_kind([] { PropensityPath({0.0, 1.0}, {0.1, -0.1}); }) ==
        ErrorKind::InadmissibleIterate);
}

TEST_CASE("grid contains the breakpoints and reaches the horizon") {
  const auto g = recursion_grid(stepped_market(), 0.3);
  CHECK(std::find(g.begin(), g.end(), 5.0) != g.end());
  CHECK(std::find(g.begin(), g.end(), 12.0) != g.end());
  CHECK(g.back() == 40.0);
  MarketPath short_m = stepped_market();
  short_m.t_infinity = 8.0;
  CHECK(error_kind([&] { recursion_grid(short_m, 0.1); }) == ErrorKind::Domain);
}

TEST_CASE("closed form for exponential discount is a fixed point") {
  const auto m = stepped_market();
  const DiscountSpec h = Exponential{0.05};
  RecursionOptions opt;
  opt.step = 0.1;
  const auto res = solve_recursion(h, m, 2.0, opt);
  const auto bar = lambda_bar_constant_discount(m, 0.05, 2.0, res.path.grid());
  CHECK(sup_diff(res.path, bar) < 1e-6);
  // after the last break the closed form is the constant-market propensity
  CHECK(bar(30.0) == doctest::Approx(lambda_exponential(0.05, 0.035, 2.0).lambda()).epsilon(1e-10));
  CHECK(res.residual < opt.tol);
  CHECK(res.residual_history.size() == static_cast<std::size_t>(res.iterations));
}

TEST_CASE("log utility: lambda = 1 / int h whatever the market") {
  const DiscountSpec h = Mixture{0.5, 0.02, 0.1};
  RecursionOptions opt;
  opt.step = 0.2;
  const auto res = solve_recursion(h, stepped_market(), 1.0, opt);
  for (double v : res.path.values()) CHECK(v == doctest::Approx(1.0 / 30).epsilon(1e-10));
}

TEST_CASE("constant market reproduces the constant propensity") {
  const MarketPath flat{TimeFunction(0.03), TimeFunction(1.0), 0.0};
  RecursionOptions opt;
  opt.step = 0.2;
  for (const DiscountSpec& h :
       {DiscountSpec(Mixture{0.5, 0.02, 0.1}), DiscountSpec(QuasiHyperbolic{0.05, 1.0, 0.7}),
        DiscountSpec(GeneralizedHyperbolic{1.0, 0.5, 0.02})}) {
    CAPTURE(h.family_name());
    const double want = lambda_constant(h, 0.03, 2.0).lambda();
    const auto res = solve_recursion(h, flat, 2.0, opt);
    double err = 0.0;
    for (double v : res.path.values()) err = std::max(err, std::abs(v - want));
    CHECK(err < 1e-6);
  }
}

TEST_CASE("closed-form value solves the integral equation") {
  const auto m = stepped_market();
  const DiscountSpec h = Mixture{0.5, 0.02, 0.1};
  RecursionOptions opt;
  opt.step = 0.05;
  const auto res = solve_recursion(h, m, 2.0, opt);
  for (double t : {0.0, 3.0, 6.5}) {
    for (double k : {0.5, 4.0}) {
      CAPTURE(t);
      CAPTURE(k);
      const double closed = value_phe(res.path, m, 2.0, t, k);
      CHECK(ie_value(res.path, m, h, 2.0, t, k) == doctest::Approx(closed).epsilon(2e-5));
    }
  }
  CHECK(error_kind([&] { value_phe(res.path, m, 1.0, 0.0, 1.0); }) == ErrorKind::Domain);
}

TEST_CASE("flow closed form: semigroup and consumption rule") {
  const auto m = stepped_market();
  const PropensityPath lam({0.0, 5.0, 40.0}, {0.05, 0.04, 0.045});
  const double k = 3.0;
  for (double t : {0.0, 2.0})
    for (double u : {4.0, 7.0}) {
      const double s = 15.0;
      const double direct = flow_closed_form(lam, m, s, t, k);
      const double composed = flow_closed_form(lam, m, s, u, flow_closed_form(lam, m, u, t, k));
      CHECK(direct == doctest::Approx(composed).epsilon(1e-12));
    }
  CHECK(policy_sigma(lam, m, 0.0, k) == doctest::Approx(0.05 * (k + human_wealth(m, 0.0))));
}

TEST_CASE("non-convergence carries the residual history") {
  RecursionOptions opt;
  opt.step = 0.5;
  opt.max_iter = 2;
  try {
    solve_recursion(Mixture{0.5, 0.02, 0.1}, stepped_market(), 2.0, opt);
    FAIL("expected non-convergence");
  } catch (const NonConvergenceError& e) {
    CHECK(e.kind() == ErrorKind::NonConvergence);
    CHECK(e.residual_history().size() == 2);
  }
}

TEST_CASE("divergent closed form is reported") {
  // (1 - gamma) r - rho >= 0: the denominator integral diverges
  const MarketPath m{TimeFunction(0.1), TimeFunction(1.0), 0.0};
  CHECK(error_kind([&] {
          lambda_bar_constant_discount(m, 0.02, 0.5, recursion_grid(m, 1.0));
        }) == ErrorKind::Divergence);
}
