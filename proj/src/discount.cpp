#include "timeconsistent/discount.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "timeconsistent/error.hpp"
#include "timeconsistent/json_util.hpp"
#include "timeconsistent/numerics.hpp"

namespace tc {

namespace {

constexpr const char* kModule = "discount";
constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string str(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

void check_finite(double x, const char* name) {
  require(std::isfinite(x), kModule, std::string(name) + " must be finite");
}

void validate(const Exponential& e) {
  check_finite(e.rho, "rho");
  require(e.rho > 0, kModule, "exponential: rho must be > 0");
}

void validate(const Mixture& m) {
  check_finite(m.omega, "omega");
  check_finite(m.rho1, "rho1");
  check_finite(m.rho2, "rho2");
  require(m.omega >= 0 && m.omega <= 1, kModule, "mixture: omega must lie in [0, 1]");
  require(m.rho1 > 0 && m.rho1 < m.rho2, kModule,
          "mixture: requires 0 < rho1 < rho2");
}

void validate(const QuasiHyperbolic& q) {
  check_finite(q.rho, "rho");
  check_finite(q.tau, "tau");
  check_finite(q.delta, "delta");
  require(q.rho > 0, kModule, "quasi_hyperbolic: rho must be > 0");
  require(q.tau > 0, kModule, "quasi_hyperbolic: tau must be > 0");
  require(q.delta > 0 && q.delta <= 1, kModule,
          "quasi_hyperbolic: delta must lie in (0, 1]");
}

void validate(const GeneralizedHyperbolic& g) {
  check_finite(g.a, "a");
  check_finite(g.b, "b");
  check_finite(g.rho, "rho");
  require(g.a > 0, kModule, "generalized_hyperbolic: a must be > 0");
  require(g.b > 0, kModule, "generalized_hyperbolic: b must be > 0");
  require(g.rho >= 0, kModule, "generalized_hyperbolic: rho must be >= 0");
  require(g.rho > 0 || g.b > g.a, kModule,
          "generalized_hyperbolic: rho = 0 requires b > a for a finite integral of h");
}

void validate(const TruncatedExponential& t) {
  check_finite(t.rho, "rho");
  check_finite(t.t_cut, "t_cut");
  require(t.rho >= 0, kModule, "truncated_exponential: rho must be >= 0");
  require(t.t_cut > 0, kModule, "truncated_exponential: t_cut must be > 0");
}

void require_time(double t) {
  if (!(std::isfinite(t) && t >= 0))
    fail(ErrorKind::Domain, kModule, "time must be >= 0 (got " + str(t) + ")");
}

[[noreturn]] void diverge(const std::string& what) {
  fail(ErrorKind::Divergence, kModule, "weighted integral diverges: " + what);
}

// int_0^L e^{-c x} dx, stable near c = 0.
double exp_segment(double c, double length) {
  if (length <= 0) return 0.0;
  if (c == 0.0) return length;
  return -std::expm1(-c * length) / c;
}

double gh_tail(const GeneralizedHyperbolic& g, double a, double u0) {
  const double c = g.rho + a;
  const double p = g.b / g.a;
  if (c < 0 || (c == 0 && p <= 1))
    diverge("generalized_hyperbolic requires a > -rho, or a = -rho with b > a (a = " +
            str(a) + ", -rho = " + str(-g.rho) + ")");
  auto integrand = [&](double u) {
    return std::exp(-p * std::log1p(g.a * u) - g.rho * u - a * (u - u0));
  };
  // Doubling panels until the remaining tail is negligible. Beyond X the
  // integrand is bounded by integrand(X) e^{-c (u - X)} when c > 0; for c = 0
  // the tail is the exact power-law integral.
  double width = std::min(1.0, 1.0 / (c + g.b));
  double x = u0;
  double total = 0.0;
  for (int panel = 0; panel < 200; ++panel) {
    const double next = x + width;
    total += num::adaptive(integrand, x, next, 1e-13);
    x = next;
    width *= 2.0;
    if (c == 0.0) {
      if (panel >= 8) {
        total += std::exp(-g.rho * u0) * std::pow(1 + g.a * x, 1 - p) / (g.a * (p - 1));
        return total;
      }
      continue;
    }
    const double bound = integrand(x) / c;
    if (bound <= 1e-14 * total) return total;
    if (x > 1e9) break;
  }
  return total;
}

}  // namespace

DiscountSpec::DiscountSpec(DiscountFamily family) : family_(std::move(family)) {
  std::visit([](const auto& f) { validate(f); }, family_);
}

std::string DiscountSpec::family_name() const {
  return std::visit(overloaded{
                        [](const Exponential&) { return "exponential"; },
                        [](const Mixture&) { return "mixture"; },
                        [](const QuasiHyperbolic&) { return "quasi_hyperbolic"; },
                        [](const GeneralizedHyperbolic&) { return "generalized_hyperbolic"; },
                        [](const TruncatedExponential&) { return "truncated_exponential"; },
                    },
                    family_);
}

bool operator==(const DiscountSpec& a, const DiscountSpec& b) {
  if (a.family_.index() != b.family_.index()) return false;
  return std::visit(
      overloaded{
          [&](const Exponential& x) {
            return x.rho == std::get<Exponential>(b.family_).rho;
          },
          [&](const Mixture& x) {
            const auto& y = std::get<Mixture>(b.family_);
            return x.omega == y.omega && x.rho1 == y.rho1 && x.rho2 == y.rho2;
          },
          [&](const QuasiHyperbolic& x) {
            const auto& y = std::get<QuasiHyperbolic>(b.family_);
            return x.rho == y.rho && x.tau == y.tau && x.delta == y.delta;
          },
          [&](const GeneralizedHyperbolic& x) {
            const auto& y = std::get<GeneralizedHyperbolic>(b.family_);
            return x.a == y.a && x.b == y.b && x.rho == y.rho;
          },
          [&](const TruncatedExponential& x) {
            const auto& y = std::get<TruncatedExponential>(b.family_);
            return x.rho == y.rho && x.t_cut == y.t_cut;
          },
      },
      a.family_);
}

double eval_h(const DiscountSpec& h, double t) {
  require_time(t);
  return std::visit(
      overloaded{
          [t](const Exponential& e) { return std::exp(-e.rho * t); },
          [t](const Mixture& m) {
            return m.omega * std::exp(-m.rho1 * t) + (1 - m.omega) * std::exp(-m.rho2 * t);
          },
          [t](const QuasiHyperbolic& q) {
            const double base = std::exp(-q.rho * t);
            return t <= q.tau ? base : q.delta * base;
          },
          [t](const GeneralizedHyperbolic& g) {
            return std::exp(-(g.b / g.a) * std::log1p(g.a * t) - g.rho * t);
          },
          [t](const TruncatedExponential& tr) {
            return t <= tr.t_cut ? std::exp(-tr.rho * t) : 0.0;
          },
      },
      h.family());
}

double eval_h_prime(const DiscountSpec& h, double t) {
  require_time(t);
  return std::visit(
      overloaded{
          [t](const Exponential& e) { return -e.rho * std::exp(-e.rho * t); },
          [t](const Mixture& m) {
            return -m.omega * m.rho1 * std::exp(-m.rho1 * t) -
                   (1 - m.omega) * m.rho2 * std::exp(-m.rho2 * t);
          },
          [t](const QuasiHyperbolic& q) {
            if (t == q.tau && q.delta < 1)
              fail(ErrorKind::Kink, kModule,
                   "h' is undefined at the quasi-hyperbolic switch time tau = " + str(q.tau) +
                       "; use one-sided values");
            const double base = -q.rho * std::exp(-q.rho * t);
            return t <= q.tau ? base : q.delta * base;
          },
          [t](const GeneralizedHyperbolic& g) {
            const double ht = std::exp(-(g.b / g.a) * std::log1p(g.a * t) - g.rho * t);
            return -ht * (g.rho + g.b / (1 + g.a * t));
          },
          [t](const TruncatedExponential& tr) {
            if (t == tr.t_cut)
              fail(ErrorKind::Kink, kModule,
                   "h' is undefined at the truncation time t_cut = " + str(tr.t_cut) +
                       "; use one-sided values");
            return t < tr.t_cut ? -tr.rho * std::exp(-tr.rho * t) : 0.0;
          },
      },
      h.family());
}

double inst_rate(const DiscountSpec& h, double t) {
  require_time(t);
  if (const auto* g = h.as<GeneralizedHyperbolic>()) return g->rho + g->b / (1 + g->a * t);
  if (const auto* e = h.as<Exponential>()) return e->rho;
  const double ht = eval_h(h, t);
  if (ht <= 0)
    fail(ErrorKind::Domain, kModule,
         "instantaneous rate undefined where h(t) = 0 (t = " + str(t) + ")");
  return -eval_h_prime(h, t) / ht;
}

double decay_floor(const DiscountSpec& h) {
  return std::visit(overloaded{
                        [](const Exponential& e) { return e.rho; },
                        [](const Mixture& m) { return m.omega > 0 ? m.rho1 : m.rho2; },
                        [](const QuasiHyperbolic& q) { return q.rho; },
                        [](const GeneralizedHyperbolic& g) { return g.rho; },
                        [](const TruncatedExponential&) { return kInf; },
                    },
                    h.family());
}

bool weighted_integral_converges(const DiscountSpec& h, double a) {
  if (!std::isfinite(a)) return false;
  if (const auto* g = h.as<GeneralizedHyperbolic>())
    return a > -g->rho || (a == -g->rho && g->b > g->a);
  return a > -decay_floor(h);
}

double tail_integral(const DiscountSpec& h, double a, double u0) {
  require_time(u0);
  require(std::isfinite(a), kModule, "weighted integral: rate must be finite");
  return std::visit(
      overloaded{
          [&](const Exponential& e) {
            if (!(e.rho + a > 0))
              diverge("exponential requires a > -rho (a = " + str(a) + ", -rho = " +
                      str(-e.rho) + ")");
            return std::exp(-e.rho * u0) / (e.rho + a);
          },
          [&](const Mixture& m) {
            const double d = m.omega > 0 ? m.rho1 : m.rho2;
            if (!(d + a > 0))
              diverge("mixture requires a > -rho1 (a = " + str(a) + ", -rho1 = " +
                      str(-d) + ")");
            double v = (1 - m.omega) * std::exp(-m.rho2 * u0) / (m.rho2 + a);
            if (m.omega > 0) v += m.omega * std::exp(-m.rho1 * u0) / (m.rho1 + a);
            return v;
          },
          [&](const QuasiHyperbolic& q) {
            const double c = q.rho + a;
            if (!(c > 0))
              diverge("quasi_hyperbolic requires a > -rho (a = " + str(a) + ", -rho = " +
                      str(-q.rho) + ")");
            if (u0 >= q.tau) return q.delta * std::exp(-q.rho * u0) / c;
            return std::exp(-q.rho * u0) *
                   (1 - (1 - q.delta) * std::exp(-c * (q.tau - u0))) / c;
          },
          [&](const GeneralizedHyperbolic& g) { return gh_tail(g, a, u0); },
          [&](const TruncatedExponential& tr) {
            if (u0 >= tr.t_cut) return 0.0;
            return std::exp(-tr.rho * u0) * exp_segment(tr.rho + a, tr.t_cut - u0);
          },
      },
      h.family());
}

double weighted_integral(const DiscountSpec& h, double a) { return tail_integral(h, a, 0.0); }

double total_mass(const DiscountSpec& h) { return weighted_integral(h, 0.0); }

std::vector<Jump> jumps(const DiscountSpec& h) {
  if (const auto* q = h.as<QuasiHyperbolic>()) {
    if (q->delta < 1) return {{q->tau, -(1 - q->delta) * std::exp(-q->rho * q->tau)}};
  }
  if (const auto* t = h.as<TruncatedExponential>())
    return {{t->t_cut, -std::exp(-t->rho * t->t_cut)}};
  return {};
}

std::vector<double> kinks(const DiscountSpec& h) {
  std::vector<double> out;
  for (const auto& j : jumps(h)) out.push_back(j.at);
  return out;
}

void to_json(nlohmann::json& j, const DiscountSpec& h) {
  j = std::visit(
      overloaded{
          [](const Exponential& e) {
            return nlohmann::json{{"family", "exponential"}, {"rho", e.rho}};
          },
          [](const Mixture& m) {
            return nlohmann::json{
                {"family", "mixture"}, {"omega", m.omega}, {"rho1", m.rho1}, {"rho2", m.rho2}};
          },
          [](const QuasiHyperbolic& q) {
            return nlohmann::json{
                {"family", "quasi_hyperbolic"}, {"rho", q.rho}, {"tau", q.tau}, {"delta", q.delta}};
          },
          [](const GeneralizedHyperbolic& g) {
            return nlohmann::json{
                {"family", "generalized_hyperbolic"}, {"a", g.a}, {"b", g.b}, {"rho", g.rho}};
          },
          [](const TruncatedExponential& t) {
            return nlohmann::json{
                {"family", "truncated_exponential"}, {"rho", t.rho}, {"t_cut", t.t_cut}};
          },
      },
      h.family());
}

DiscountSpec discount_from_json(const nlohmann::json& j) {
  const std::string ctx = "discount";
  jsonu::expect_object(j, ctx);
  const std::string fam = jsonu::string(j, "family", ctx);
  try {
    if (fam == "exponential") {
      jsonu::check_keys(j, {"family", "rho"}, ctx);
      return DiscountSpec(Exponential{jsonu::number(j, "rho", ctx)});
    }
    if (fam == "mixture") {
      jsonu::check_keys(j, {"family", "omega", "rho1", "rho2"}, ctx);
      return DiscountSpec(Mixture{jsonu::number(j, "omega", ctx), jsonu::number(j, "rho1", ctx),
                     jsonu::number(j, "rho2", ctx)});
    }
    if (fam == "quasi_hyperbolic") {
      jsonu::check_keys(j, {"family", "rho", "tau", "delta"}, ctx);
      return DiscountSpec(QuasiHyperbolic{jsonu::number(j, "rho", ctx), jsonu::number(j, "tau", ctx),
                             jsonu::number(j, "delta", ctx)});
    }
    if (fam == "generalized_hyperbolic") {
      jsonu::check_keys(j, {"family", "a", "b", "rho"}, ctx);
      return DiscountSpec(GeneralizedHyperbolic{jsonu::number(j, "a", ctx), jsonu::number(j, "b", ctx),
                                   jsonu::number(j, "rho", ctx)});
    }
    if (fam == "truncated_exponential") {
      jsonu::check_keys(j, {"family", "rho", "t_cut"}, ctx);
      return DiscountSpec(TruncatedExponential{jsonu::number(j, "rho", ctx),
                                  jsonu::number(j, "t_cut", ctx)});
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    jsonu::config_error(ctx, e.what());
  }
  jsonu::config_error(ctx, "unknown family '" + fam + "'");
}

}  // namespace tc
