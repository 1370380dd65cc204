#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "check.hpp"
#include "oracles.hpp"
#include "timeconsistent/propensity.hpp"
#include "timeconsistent/recursion.hpp"
#include "timeconsistent/trajectory.hpp"

using namespace tc;

TEST_CASE("rk4 flow matches the closed-form flow") {
  const MarketPath m{TimeFunction(TimeFunction::PiecewiseConstant{{5.0}, {0.02, 0.04}}),
                     TimeFunction(TimeFunction::Tabulated{{0.0, 8.0}, {1.0, 1.5}}), 0.0};
  const PropensityPath lam({0.0, 2.0, 5.0, 40.0}, {0.05, 0.045, 0.04, 0.042});
  const Policy pol = [&](double t, double k) { return policy_sigma(lam, m, t, k); };
  // borrowing against human wealth is allowed
  const auto path = integrate_flow(pol, Environment(m), 0.0, 2.0, 20.0, 0.01, FlowOptions{false, lam.grid()});
  CHECK_FALSE(path.truncated);
  double err = 0.0;
  for (std::size_t i = 0; i < path.times.size(); ++i)
    err = std::max(err, std::abs(path.capital[i] - flow_closed_form(lam, m, path.times[i], 0.0, 2.0)));
  CHECK(err < 1e-6);
  CHECK(path.times.back() == doctest::Approx(20.0));
}

TEST_CASE("log equilibrium path is the linear ODE solution") {
  const DiscountSpec h = Mixture{0.5, 0.02, 0.1};
  const double H = total_mass(h);
  for (double r : {0.02, 1.0 / 30, 0.05}) {
    CAPTURE(r);
    const auto p = equilibrium_path_log(h, r, 1.0, 3.0, 30.0, 0.5);
    const Policy pol = [&](double, double k) { return (k + 1.0 / r) / H; };
    const auto q = integrate_flow(pol, Environment(MarketPath{TimeFunction(r), TimeFunction(1.0), 0.0}),
                                  0.0, 3.0, 30.0, 0.01, FlowOptions{false});
    CHECK(p.capital.back() == doctest::Approx(q.capital.back()).epsilon(1e-9));
    CHECK(p.consumption.front() == doctest::Approx((3.0 + 1.0 / r) / H));
  }
  // r = 1/H: wealth is stationary and capital moves linearly
  const auto flat = equilibrium_path_log(h, 1.0 / 30, 1.0, 3.0, 10.0, 1.0);
  CHECK(flat.consumption.back() == doctest::Approx(flat.consumption.front()));
}

TEST_CASE("precommitment plans") {
  const DiscountSpec h = Mixture{0.5, 0.02, 0.1};
  const double r = 0.05, w = 1.0, k0 = 2.0;
  const auto p = precommitment_path_log(h, r, w, k0, 10.0, 0.5);
  const double c0 = (k0 + w / r) / total_mass(h);
  CHECK(p.consumption.front() == doctest::Approx(c0));
  CHECK(p.consumption[4] == doctest::Approx(c0 * eval_h(h, 2.0) * std::exp(r * 2.0)));
  // the budget holds: the plan exhausts wealth
  const double pv = oracle::integrate_inf(
      [&](double t) { return c0 * eval_h(h, t) * std::exp(r * t) * std::exp(-r * t); }, 0.0);
  CHECK(pv == doctest::Approx(k0 + w / r).epsilon(1e-9));
  CHECK(error_kind([&] { precommitment_path_log(h, 0.02, w, k0, 10.0, 0.5); }) ==
        ErrorKind::Domain);

  const auto pc = precommitment_path(h, r, w, 2.0, k0, 10.0, 0.5);
  const double c0c = naive_propensity(h, r, 2.0) * (k0 + w / r);
  CHECK(pc.consumption.front() == doctest::Approx(c0c));
  CHECK(pc.consumption[6] ==
        doctest::Approx(c0c * std::sqrt(eval_h(h, 3.0) * std::exp(r * 3.0))));
}

TEST_CASE("optimal log propensity and naive propensity") {
  const DiscountSpec h = Mixture{0.5, 0.02, 0.1};
  const double tail2 = 0.5 * std::exp(-0.04) / 0.02 + 0.5 * std::exp(-0.2) / 0.1;
  CHECK(optimal_propensity_log(h, 2.0) == doctest::Approx(eval_h(h, 2.0) / tail2));
  CHECK(naive_propensity(h, 0.03, 1.0) == doctest::Approx(1.0 / 30));
  // CRRA: quadrature of h^{1/gamma} e^{-r (gamma-1) s / gamma}
  const auto ref = oracle::mixture(0.5, 0.02, 0.1);
  const double den = oracle::integrate_inf(
      [&](double s) { return std::pow(ref(s), 0.5) * std::exp(-0.03 * 0.5 * s); }, 0.0);
  CHECK(naive_propensity(h, 0.03, 2.0) == doctest::Approx(1.0 / den).epsilon(1e-10));
  const auto q = oracle::quasi_hyperbolic(0.05, 2.0, 0.6);
  const double dq = oracle::integrate_inf(
      [&](double s) { return std::pow(q(s), 1 / 3.0) * std::exp(-0.03 * 2.0 / 3.0 * s); }, 0.0,
      {2.0});
  CHECK(naive_propensity(QuasiHyperbolic{0.05, 2.0, 0.6}, 0.03, 3.0) ==
        doctest::Approx(1.0 / dq).epsilon(1e-10));
}

TEST_CASE("constant propensity path") {
  const auto p = constant_propensity_path(0.04, 0.03, 1.0, 2.0, 10.0, 1.0, "x");
  const double W0 = 2.0 + 1.0 / 0.03;
  CHECK(p.capital.back() == doctest::Approx(W0 * std::exp(-0.01 * 10) - 1.0 / 0.03));
  CHECK(p.consumption.back() == doctest::Approx(0.04 * W0 * std::exp(-0.1)));
  CHECK(p.label == "x");
}

TEST_CASE("flows that exhaust capital are truncated") {
  const Policy pol = [](double, double) { return 1.0; };
  const auto p = integrate_flow(pol, Environment(MarketPath{TimeFunction(0.0), TimeFunction(0.0), 0.0}),
                                0.0, 2.0, 10.0, 0.1);
  CHECK(p.truncated);
  CHECK(p.truncated_at == doctest::Approx(2.0).epsilon(0.06));
  CHECK(p.capital.back() > 0);
}
