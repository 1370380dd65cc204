#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "check.hpp"
#include "oracles.hpp"
#include "timeconsistent/market.hpp"

using namespace tc;

TEST_CASE("time functions and their antiderivatives") {
  const TimeFunction c(0.03);
  CHECK(c(7.0) == 0.03);
  CHECK(c.antiderivative(2.0) == doctest::Approx(0.06));

  const TimeFunction p(TimeFunction::PiecewiseConstant{{1.0, 3.0}, {0.01, 0.05, 0.02}});
  CHECK(p(0.5) == 0.01);
  CHECK(p(1.0) == 0.05);
  CHECK(p(10.0) == 0.02);
  CHECK(p.antiderivative(4.0) == doctest::Approx(0.01 + 0.1 + 0.02));
  CHECK(p.last_breakpoint() == 3.0);

  const TimeFunction tab(TimeFunction::Tabulated{{0.0, 2.0, 5.0}, {1.0, 2.0, 0.5}});
  CHECK(tab(1.0) == doctest::Approx(1.5));
  CHECK(tab(9.0) == 0.5);
  const double want = oracle::integrate([&](double s) { return tab(s); }, 0.0, 2.0) +
                      oracle::integrate([&](double s) { return tab(s); }, 2.0, 5.0) + 0.5 * 2.0;
  CHECK(tab.antiderivative(7.0) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("human wealth") {
  const MarketPath flat{TimeFunction(0.04), TimeFunction(2.0), 0.0};
  CHECK(human_wealth(flat, 0.0) == doctest::Approx(50.0));
  CHECK(human_wealth(flat, 13.0) == doctest::Approx(50.0));

  const MarketPath m{TimeFunction(TimeFunction::PiecewiseConstant{{5.0}, {0.02, 0.04}}),
                     TimeFunction(TimeFunction::Tabulated{{0.0, 4.0}, {1.0, 2.0}}), 0.0};
  for (double t : {0.0, 2.0, 4.5, 8.0}) {
    auto integrand = [&](double s) { return std::exp(-m.r.integral(t, s)) * m.w(s); };
    const double want = oracle::integrate_inf(integrand, t, {4.0, 5.0});
    CHECK(human_wealth(m, t) == doctest::Approx(want).epsilon(1e-10));
  }
  const std::vector<double> grid{0.0, 1.0, 4.0, 5.0, 6.0};
  const auto tabled = human_wealth_on(m, grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(tabled[i] == doctest::Approx(human_wealth(m, grid[i])).epsilon(1e-12));
  CHECK(stationary_from(m) == 5.0);
  CHECK(horizon(m) == 40.0);
}

TEST_CASE("validation") {
  CHECK(error_kind([] { validate(MarketPath{TimeFunction(0.0), TimeFunction(1.0), 0.0}); }) ==
        ErrorKind::Divergence);
  CHECK(error_kind([] { validate(MarketPath{TimeFunction(0.03), TimeFunction(-1.0), 0.0}); }) ==
        ErrorKind::Domain);
  CHECK(error_kind([] {
          TimeFunction(TimeFunction::PiecewiseConstant{{2.0, 1.0}, {0.1, 0.2, 0.3}});
        }) == ErrorKind::Domain);
}

TEST_CASE("production functions") {
  const ProductionFunction cd = CobbDouglas{1.0, 0.3};
  CHECK(cd.f(8.0) == doctest::Approx(std::pow(8.0, 0.3)));
  CHECK(cd.f_prime(8.0) == doctest::Approx(0.3 * std::pow(8.0, -0.7)));
  CHECK(cd.f_prime(cd.k_for_marginal_product(0.05)) == doctest::Approx(0.05));
  const ProductionFunction af = AffineCapital{0.03, 1.0};
  CHECK(af.f(10.0) == doctest::Approx(1.3));
  CHECK(af.f_second(10.0) == 0.0);
  CHECK(error_kind([] { ProductionFunction(CobbDouglas{1.0, 1.2}); }) == ErrorKind::Domain);
}

TEST_CASE("json round trip") {
  const MarketPath m{TimeFunction(TimeFunction::PiecewiseConstant{{5.0}, {0.02, 0.04}}),
                     TimeFunction(TimeFunction::Tabulated{{0.0, 4.0}, {1.0, 2.0}}), 50.0};
  const Environment env(m);
  nlohmann::json j = env;
  CHECK(environment_from_json(nlohmann::json::parse(j.dump())) == env);
  const Environment prod(ProductionFunction(CobbDouglas{1.0, 0.3}));
  nlohmann::json jp = prod;
  CHECK(environment_from_json(jp) == prod);
}
