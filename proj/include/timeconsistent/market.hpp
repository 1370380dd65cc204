#pragma once

// Deterministic environments: market paths (r(t), w(t)) for the
// consumption-saving problem and production functions f(k) for the growth
// problem.

#include <optional>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

namespace tc {

/// A scalar function of time with an exact antiderivative. Every
/// representation is constant past its last breakpoint.
class TimeFunction {
 public:
  struct Constant {
    double value;
  };
  /// values[0] on [0, breaks[0]), values[i] on [breaks[i-1], breaks[i]),
  /// values.back() afterwards.
  struct PiecewiseConstant {
    std::vector<double> breaks;
    std::vector<double> values;
  };
  /// Linear interpolation between (times[i], values[i]); constant outside.
  struct Tabulated {
    std::vector<double> times;
    std::vector<double> values;
  };
  using Repr = std::variant<Constant, PiecewiseConstant, Tabulated>;

  TimeFunction(double constant = 0.0);  // NOLINT
  TimeFunction(Repr repr);              // NOLINT
  template <class T>
    requires(!std::is_arithmetic_v<T> && std::is_constructible_v<Repr, T>)
  TimeFunction(T repr) : TimeFunction(Repr(std::move(repr))) {}  // NOLINT

  const Repr& repr() const noexcept { return repr_; }

  double operator()(double t) const;
  /// int_0^t f(s) ds.
  double antiderivative(double t) const;
  double integral(double t0, double t1) const {
    return antiderivative(t1) - antiderivative(t0);
  }
  /// Points where f or f' is discontinuous.
  std::vector<double> breakpoints() const;
  /// Time past which f is constant.
  double last_breakpoint() const;
  double final_value() const;
  double min_value(double horizon) const;
  double max_value(double horizon) const;

  friend bool operator==(const TimeFunction& a, const TimeFunction& b);

 private:
  Repr repr_;
  std::vector<double> cumulative_;  // antiderivative at breakpoints
};

void to_json(nlohmann::json& j, const TimeFunction& f);
TimeFunction time_function_from_json(const nlohmann::json& j, const std::string& context);

/// Interest rate and wage paths. t_infinity <= 0 selects the automatic
/// truncation horizon.
struct MarketPath {
  TimeFunction r;
  TimeFunction w;
  double t_infinity = 0.0;

  friend bool operator==(const MarketPath&, const MarketPath&) = default;
};

void validate(const MarketPath& m);

/// Time after which both r and w are constant.
double stationary_from(const MarketPath& m);

/// Truncation horizon: t_infinity if set, else max(40, stationary_from + 10).
double horizon(const MarketPath& m);

/// Present value at t of future wages: int_t^inf exp(-int_t^s r) w(s) ds.
/// Past stationary_from the integrand is an exact exponential.
double human_wealth(const MarketPath& m, double t);

/// Human wealth tabulated on a grid (single backward pass).
std::vector<double> human_wealth_on(const MarketPath& m, const std::vector<double>& grid);

struct CobbDouglas {
  double A;
  double theta;
};

/// f(k) = r k + w.
struct AffineCapital {
  double r;
  double w;
};

class ProductionFunction {
 public:
  using Repr = std::variant<CobbDouglas, AffineCapital>;
  ProductionFunction(Repr repr);  // NOLINT
  template <class T>
    requires std::is_constructible_v<Repr, T>
  ProductionFunction(T repr) : ProductionFunction(Repr(repr)) {}  // NOLINT

  const Repr& repr() const noexcept { return repr_; }
  double f(double k) const;
  double f_prime(double k) const;
  double f_second(double k) const;
  /// Capital with f'(k) = x (Cobb-Douglas only).
  double k_for_marginal_product(double x) const;

  friend bool operator==(const ProductionFunction&, const ProductionFunction&);

 private:
  Repr repr_;
};

void to_json(nlohmann::json& j, const ProductionFunction& f);
ProductionFunction production_from_json(const nlohmann::json& j);

/// Law of motion dk/dt = f(t, k) - c.
class Environment {
 public:
  Environment(MarketPath market);          // NOLINT
  Environment(ProductionFunction production);  // NOLINT

  double f(double t, double k) const;
  double f_k(double t, double k) const;
  const MarketPath* market() const noexcept { return std::get_if<MarketPath>(&env_); }
  const ProductionFunction* production() const noexcept {
    return std::get_if<ProductionFunction>(&env_);
  }

  friend bool operator==(const Environment&, const Environment&) = default;

 private:
  std::variant<MarketPath, ProductionFunction> env_;
};

void to_json(nlohmann::json& j, const Environment& e);
Environment environment_from_json(const nlohmann::json& j);
MarketPath market_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const MarketPath& m);

}  // namespace tc
