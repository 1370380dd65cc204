#include "timeconsistent/market.hpp"

#include <algorithm>
#include <cmath>

#include "timeconsistent/error.hpp"
#include "timeconsistent/json_util.hpp"
#include "timeconsistent/numerics.hpp"

namespace tc {

namespace {

constexpr const char* kModule = "market";

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_increasing(const std::vector<double>& v, const char* what) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    require(std::isfinite(v[i]), kModule, std::string(what) + " must be finite");
    if (i > 0)
      require(v[i] > v[i - 1], kModule, std::string(what) + " must be strictly increasing");
  }
}

void check_finite_all(const std::vector<double>& v, const char* what) {
  for (double x : v) require(std::isfinite(x), kModule, std::string(what) + " must be finite");
}

}  // namespace

TimeFunction::TimeFunction(double constant) : repr_(Constant{constant}) {
  require(std::isfinite(constant), kModule, "constant time function must be finite");
}

TimeFunction::TimeFunction(Repr repr) : repr_(std::move(repr)) {
  std::visit(
      overloaded{
          [](const Constant& c) {
            require(std::isfinite(c.value), kModule, "constant time function must be finite");
          },
          [this](const PiecewiseConstant& p) {
            require(!p.values.empty() && p.values.size() == p.breaks.size() + 1, kModule,
                    "piecewise_constant needs exactly one more value than breaks");
            check_increasing(p.breaks, "breaks");
            check_finite_all(p.values, "values");
            require(p.breaks.empty() || p.breaks.front() > 0, kModule,
                    "piecewise_constant breaks must be > 0");
            double acc = 0.0;
            double prev = 0.0;
            for (std::size_t i = 0; i < p.breaks.size(); ++i) {
              acc += p.values[i] * (p.breaks[i] - prev);
              prev = p.breaks[i];
              cumulative_.push_back(acc);
            }
          },
          [this](const Tabulated& t) {
            require(!t.times.empty() && t.times.size() == t.values.size(), kModule,
                    "tabulated needs matching, non-empty times and values");
            check_increasing(t.times, "times");
            check_finite_all(t.values, "values");
            require(t.times.front() >= 0, kModule, "tabulated times must be >= 0");
            double acc = t.values.front() * t.times.front();
            cumulative_.push_back(acc);
            for (std::size_t i = 1; i < t.times.size(); ++i) {
              acc += 0.5 * (t.values[i] + t.values[i - 1]) * (t.times[i] - t.times[i - 1]);
              cumulative_.push_back(acc);
            }
          },
      },
      repr_);
}

double TimeFunction::operator()(double t) const {
  return std::visit(
      overloaded{
          [](const Constant& c) { return c.value; },
          [t](const PiecewiseConstant& p) {
            const auto it = std::upper_bound(p.breaks.begin(), p.breaks.end(), t);
            return p.values[static_cast<std::size_t>(it - p.breaks.begin())];
          },
          [t](const Tabulated& tab) {
            if (t <= tab.times.front()) return tab.values.front();
            if (t >= tab.times.back()) return tab.values.back();
            const auto it = std::upper_bound(tab.times.begin(), tab.times.end(), t);
            const std::size_t i = static_cast<std::size_t>(it - tab.times.begin());
            const double w = (t - tab.times[i - 1]) / (tab.times[i] - tab.times[i - 1]);
            return (1 - w) * tab.values[i - 1] + w * tab.values[i];
          },
      },
      repr_);
}

double TimeFunction::antiderivative(double t) const {
  return std::visit(
      overloaded{
          [t](const Constant& c) { return c.value * t; },
          [this, t](const PiecewiseConstant& p) {
            const auto it = std::upper_bound(p.breaks.begin(), p.breaks.end(), t);
            const std::size_t i = static_cast<std::size_t>(it - p.breaks.begin());
            const double base = i == 0 ? 0.0 : cumulative_[i - 1];
            const double start = i == 0 ? 0.0 : p.breaks[i - 1];
            return base + p.values[i] * (t - start);
          },
          [this, t](const Tabulated& tab) {
            if (t <= tab.times.front()) return tab.values.front() * t;
            if (t >= tab.times.back())
              return cumulative_.back() + tab.values.back() * (t - tab.times.back());
            const auto it = std::upper_bound(tab.times.begin(), tab.times.end(), t);
            const std::size_t i = static_cast<std::size_t>(it - tab.times.begin());
            const double dt = t - tab.times[i - 1];
            const double slope =
                (tab.values[i] - tab.values[i - 1]) / (tab.times[i] - tab.times[i - 1]);
            return cumulative_[i - 1] + tab.values[i - 1] * dt + 0.5 * slope * dt * dt;
          },
      },
      repr_);
}

std::vector<double> TimeFunction::breakpoints() const {
  return std::visit(overloaded{
                        [](const Constant&) { return std::vector<double>{}; },
                        [](const PiecewiseConstant& p) { return p.breaks; },
                        [](const Tabulated& t) { return t.times; },
                    },
                    repr_);
}

double TimeFunction::last_breakpoint() const {
  const auto b = breakpoints();
  return b.empty() ? 0.0 : b.back();
}

double TimeFunction::final_value() const {
  return std::visit(overloaded{
                        [](const Constant& c) { return c.value; },
                        [](const PiecewiseConstant& p) { return p.values.back(); },
                        [](const Tabulated& t) { return t.values.back(); },
                    },
                    repr_);
}

double TimeFunction::min_value(double horizon) const {
  double m = (*this)(0.0);
  for (double b : breakpoints())
    if (b <= horizon) m = std::min({m, (*this)(b), (*this)(std::nextafter(b, 0.0))});
  return std::min(m, (*this)(horizon));
}

double TimeFunction::max_value(double horizon) const {
  double m = (*this)(0.0);
  for (double b : breakpoints())
    if (b <= horizon) m = std::max({m, (*this)(b), (*this)(std::nextafter(b, 0.0))});
  return std::max(m, (*this)(horizon));
}

bool operator==(const TimeFunction& a, const TimeFunction& b) {
  if (a.repr_.index() != b.repr_.index()) return false;
  return std::visit(
      overloaded{
          [&](const TimeFunction::Constant& x) {
            return x.value == std::get<TimeFunction::Constant>(b.repr_).value;
          },
          [&](const TimeFunction::PiecewiseConstant& x) {
            const auto& y = std::get<TimeFunction::PiecewiseConstant>(b.repr_);
            return x.breaks == y.breaks && x.values == y.values;
          },
          [&](const TimeFunction::Tabulated& x) {
            const auto& y = std::get<TimeFunction::Tabulated>(b.repr_);
            return x.times == y.times && x.values == y.values;
          },
      },
      a.repr_);
}

void to_json(nlohmann::json& j, const TimeFunction& f) {
  j = std::visit(overloaded{
                     [](const TimeFunction::Constant& c) { return nlohmann::json(c.value); },
                     [](const TimeFunction::PiecewiseConstant& p) {
                       return nlohmann::json{{"type", "piecewise_constant"},
                                             {"breaks", p.breaks},
                                             {"values", p.values}};
                     },
                     [](const TimeFunction::Tabulated& t) {
                       return nlohmann::json{
                           {"type", "tabulated"}, {"times", t.times}, {"values", t.values}};
                     },
                 },
                 f.repr());
}

TimeFunction time_function_from_json(const nlohmann::json& j, const std::string& context) {
  try {
    if (j.is_number()) return TimeFunction(j.get<double>());
    jsonu::expect_object(j, context);
    const std::string type = jsonu::string(j, "type", context);
    if (type == "piecewise_constant") {
      jsonu::check_keys(j, {"type", "breaks", "values"}, context);
      return TimeFunction(TimeFunction::PiecewiseConstant{jsonu::numbers(j, "breaks", context),
                                                          jsonu::numbers(j, "values", context)});
    }
    if (type == "tabulated") {
      jsonu::check_keys(j, {"type", "times", "values"}, context);
      return TimeFunction(TimeFunction::Tabulated{jsonu::numbers(j, "times", context),
                                                  jsonu::numbers(j, "values", context)});
    }
    jsonu::config_error(context, "unknown time function type '" + type + "'");
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    jsonu::config_error(context, e.what());
  }
}

namespace {
double stationary_tail(const MarketPath& m);
}

void validate(const MarketPath& m) {
  const double hz = horizon(m);
  require(m.w.min_value(hz) >= 0, kModule, "wage path must be >= 0");
  require(std::isfinite(m.t_infinity), kModule, "t_infinity must be finite");
  stationary_tail(m);  // throws when human wealth diverges
}

double stationary_from(const MarketPath& m) {
  return std::max(m.r.last_breakpoint(), m.w.last_breakpoint());
}

double horizon(const MarketPath& m) {
  if (m.t_infinity > 0) return m.t_infinity;
  return std::max(40.0, stationary_from(m) + 10.0);
}

namespace {

// Sorted panel edges on [a, b] including the breakpoints of r and w and with
// panels no longer than max_width.
std::vector<double> panel_edges(const MarketPath& m, double a, double b, double max_width) {
  std::vector<double> pts{a};
  for (const auto* f : {&m.r, &m.w})
    for (double x : f->breakpoints())
      if (x > a && x < b) pts.push_back(x);
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::vector<double> out{pts.front()};
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double len = pts[i] - pts[i - 1];
    const int pieces = std::max(1, static_cast<int>(std::ceil(len / max_width)));
    for (int k = 1; k <= pieces; ++k)
      out.push_back(k == pieces ? pts[i] : pts[i - 1] + len * k / pieces);
  }
  return out;
}

double wage_segment(const MarketPath& m, double a, double b) {
  double total = 0.0;
  const auto edges = panel_edges(m, a, b, 1.0);
  const double ra = m.r.antiderivative(a);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    total += num::gauss16(
        [&](double s) { return std::exp(-(m.r.antiderivative(s) - ra)) * m.w(s); }, edges[i],
        edges[i + 1]);
  }
  return total;
}

double stationary_tail(const MarketPath& m) {
  const double we = m.w.final_value();
  if (we == 0.0) return 0.0;
  const double re = m.r.final_value();
  if (!(re > 0))
    fail(ErrorKind::Divergence, kModule,
         "human wealth diverges: the long-run interest rate must be > 0 when wages are positive");
  return we / re;
}

}  // namespace

double human_wealth(const MarketPath& m, double t) {
  require(t >= 0 && std::isfinite(t), kModule, "human wealth needs t >= 0");
  const double x = std::max(t, stationary_from(m));
  const double head = x > t ? wage_segment(m, t, x) : 0.0;
  return head + std::exp(-m.r.integral(t, x)) * stationary_tail(m);
}

std::vector<double> human_wealth_on(const MarketPath& m, const std::vector<double>& grid) {
  std::vector<double> out(grid.size());
  if (grid.empty()) return out;
  out.back() = human_wealth(m, grid.back());
  for (std::size_t i = grid.size() - 1; i-- > 0;) {
    out[i] = wage_segment(m, grid[i], grid[i + 1]) +
             std::exp(-m.r.integral(grid[i], grid[i + 1])) * out[i + 1];
  }
  return out;
}

ProductionFunction::ProductionFunction(Repr repr) : repr_(std::move(repr)) {
  std::visit(overloaded{
                 [](const CobbDouglas& c) {
                   require(c.A > 0 && std::isfinite(c.A), "steady_state",
                           "cobb_douglas: A must be > 0");
                   require(c.theta > 0 && c.theta < 1, "steady_state",
                           "cobb_douglas: theta must lie in (0, 1)");
                 },
                 [](const AffineCapital& a) {
                   require(std::isfinite(a.r), "steady_state", "affine: r must be finite");
                   require(a.w >= 0 && std::isfinite(a.w), "steady_state",
                           "affine: w must be >= 0");
                 },
             },
             repr_);
}

double ProductionFunction::f(double k) const {
  return std::visit(overloaded{
                        [k](const CobbDouglas& c) {
                          require(k > 0, "steady_state", "cobb_douglas: k must be > 0");
                          return c.A * std::pow(k, c.theta);
                        },
                        [k](const AffineCapital& a) { return a.r * k + a.w; },
                    },
                    repr_);
}

double ProductionFunction::f_prime(double k) const {
  return std::visit(overloaded{
                        [k](const CobbDouglas& c) {
                          require(k > 0, "steady_state", "cobb_douglas: k must be > 0");
                          return c.theta * c.A * std::pow(k, c.theta - 1);
                        },
                        [](const AffineCapital& a) { return a.r; },
                    },
                    repr_);
}

double ProductionFunction::f_second(double k) const {
  return std::visit(overloaded{
                        [k](const CobbDouglas& c) {
                          require(k > 0, "steady_state", "cobb_douglas: k must be > 0");
                          return c.theta * (c.theta - 1) * c.A * std::pow(k, c.theta - 2);
                        },
                        [](const AffineCapital&) { return 0.0; },
                    },
                    repr_);
}

double ProductionFunction::k_for_marginal_product(double x) const {
  const auto* c = std::get_if<CobbDouglas>(&repr_);
  require(c != nullptr, "steady_state", "k_for_marginal_product needs a Cobb-Douglas technology");
  require(x > 0, "steady_state", "marginal product must be > 0");
  return std::pow(c->theta * c->A / x, 1 / (1 - c->theta));
}

bool operator==(const ProductionFunction& a, const ProductionFunction& b) {
  if (a.repr_.index() != b.repr_.index()) return false;
  if (const auto* x = std::get_if<CobbDouglas>(&a.repr_)) {
    const auto& y = std::get<CobbDouglas>(b.repr_);
    return x->A == y.A && x->theta == y.theta;
  }
  const auto& x = std::get<AffineCapital>(a.repr_);
  const auto& y = std::get<AffineCapital>(b.repr_);
  return x.r == y.r && x.w == y.w;
}

void to_json(nlohmann::json& j, const ProductionFunction& f) {
  j = std::visit(overloaded{
                     [](const CobbDouglas& c) {
                       return nlohmann::json{
                           {"type", "cobb_douglas"}, {"A", c.A}, {"theta", c.theta}};
                     },
                     [](const AffineCapital& a) {
                       return nlohmann::json{{"type", "affine"}, {"r", a.r}, {"w", a.w}};
                     },
                 },
                 f.repr());
}

ProductionFunction production_from_json(const nlohmann::json& j) {
  const std::string ctx = "environment";
  const std::string type = jsonu::string(j, "type", ctx);
  try {
    if (type == "cobb_douglas") {
      jsonu::check_keys(j, {"type", "A", "theta"}, ctx);
      return ProductionFunction(CobbDouglas{jsonu::number(j, "A", ctx), jsonu::number(j, "theta", ctx)});
    }
    if (type == "affine") {
      jsonu::check_keys(j, {"type", "r", "w"}, ctx);
      return ProductionFunction(AffineCapital{jsonu::number(j, "r", ctx), jsonu::number(j, "w", ctx)});
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    jsonu::config_error(ctx, e.what());
  }
  jsonu::config_error(ctx, "unknown production type '" + type + "'");
}

Environment::Environment(MarketPath market) : env_(std::move(market)) {
  validate(std::get<MarketPath>(env_));
}

Environment::Environment(ProductionFunction production) : env_(std::move(production)) {}

double Environment::f(double t, double k) const {
  if (const auto* m = market()) return m->w(t) + m->r(t) * k;
  return production()->f(k);
}

double Environment::f_k(double t, double k) const {
  if (const auto* m = market()) return m->r(t);
  return production()->f_prime(k);
}

void to_json(nlohmann::json& j, const MarketPath& m) {
  j = nlohmann::json{{"type", "market"}, {"r", m.r}, {"w", m.w}};
  if (m.t_infinity > 0) j["t_infinity"] = m.t_infinity;
}

MarketPath market_from_json(const nlohmann::json& j) {
  const std::string ctx = "environment";
  jsonu::check_keys(j, {"type", "r", "w", "t_infinity"}, ctx);
  if (!j.contains("r")) jsonu::config_error(ctx, "missing required key 'r'");
  MarketPath m{time_function_from_json(j.at("r"), "environment.r"),
               j.contains("w") ? time_function_from_json(j.at("w"), "environment.w")
                               : TimeFunction(0.0),
               jsonu::number_or(j, "t_infinity", 0.0, ctx)};
  try {
    validate(m);
  } catch (const Error& e) {
    jsonu::config_error(ctx, e.what());
  }
  return m;
}

void to_json(nlohmann::json& j, const Environment& e) {
  if (const auto* m = e.market())
    to_json(j, *m);
  else
    to_json(j, *e.production());
}

Environment environment_from_json(const nlohmann::json& j) {
  const std::string ctx = "environment";
  jsonu::expect_object(j, ctx);
  const std::string type = jsonu::string(j, "type", ctx);
  if (type == "market") return Environment(market_from_json(j));
  return Environment(production_from_json(j));
}

}  // namespace tc
