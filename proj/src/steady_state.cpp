#include "timeconsistent/steady_state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "timeconsistent/error.hpp"
#include "timeconsistent/numerics.hpp"

namespace tc {

namespace {

constexpr const char* kModule = "steady_state";

std::string str(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

std::vector<double> scan_points(double lo, double hi) {
  // Dense near both ends: the integral blows up at lo and the residual
  // flattens out at hi.
  const auto s = num::logspace(1e-10, 0.5, 128);
  std::vector<double> pts;
  for (double x : s) pts.push_back(lo + (hi - lo) * x);
  for (double x : s) pts.push_back(hi - (hi - lo) * x);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

}  // namespace

const char* to_string(AlphaStatus s) {
  switch (s) {
    case AlphaStatus::Solved: return "Solved";
    case AlphaStatus::NoSolution: return "NoSolution";
    case AlphaStatus::Degenerate: return "Degenerate";
  }
  return "unknown";
}

double alpha_residual(const DiscountSpec& h, double x, double alpha) {
  return alpha * weighted_integral(h, alpha - x) - 1;
}

AlphaResult solve_alpha(const DiscountSpec& h, double x) {
  require(std::isfinite(x) && x > 0, kModule, "marginal product x must be > 0");
  const double d = decay_floor(h);
  const double lo = std::isfinite(d) ? std::max(0.0, x - d) : 0.0;
  auto g = [&](double a) { return alpha_residual(h, x, a); };

  const double scale = std::max({x, inst_rate(h, 0.0), 1e-2});
  bool flat = true;
  for (double m : {0.5, 2.0, 10.0})
    if (!(std::abs(g(lo + m * scale)) < 1e-12)) flat = false;
  if (flat) return {AlphaStatus::Degenerate, 0.0, true, 0.0, 0};

  double hi = x + 10 * inst_rate(h, 0.0) + 10;
  std::vector<num::Bracket> brackets;
  for (;;) {
    brackets = num::sign_changes(g, scan_points(lo, hi));
    if (!brackets.empty() || hi >= 1e4) break;
    hi = std::min(2 * hi, 1e4);
  }
  if (brackets.empty()) return {};

  std::vector<double> roots;
  for (const auto& b : brackets)
    roots.push_back(num::refine_root(g, b.lo, b.hi, b.f_lo, b.f_hi, 1e-15 * std::max(1.0, b.hi)));
  auto pick = std::find_if(roots.begin(), roots.end(), [&](double a) { return a >= x; });
  const double alpha = pick != roots.end() ? *pick : roots.front();
  return {AlphaStatus::Solved, alpha, alpha >= x, g(alpha), static_cast<int>(roots.size())};
}

double alpha_exponential_quadratic(const ProductionFunction& f, double k_bar, double rho,
                                   const UtilitySpec& u) {
  require(k_bar > 0 && rho > 0, kModule, "alpha_exponential_quadratic needs k > 0, rho > 0");
  const double fp = f.f_prime(k_bar);
  if (!(std::abs(fp - rho) <= 1e-8))
    fail(ErrorKind::Domain, kModule,
         "not a steady state: f'(k) = " + str(fp) + " differs from rho = " + str(rho));
  const double c = f.f(k_bar);
  require(c > 0, kModule, "steady consumption f(k) must be > 0");
  const double disc = 1 + 4 * u.u_prime(c) * f.f_second(k_bar) / (fp * fp * u.u_second(c));
  if (disc < 0)
    fail(ErrorKind::Domain, kModule, "complex roots: discriminant " + str(disc) + " < 0");
  const double alpha = fp * (1 + std::sqrt(disc)) / 2;
  if (!(alpha >= fp))
    fail(ErrorKind::Diagnostic, kModule, "root alpha = " + str(alpha) + " below f'(k)");
  return alpha;
}

double phi(double x) {
  require(std::isfinite(x) && x > 0, kModule, "phi needs x > 0");
  if (x == 1.0) return 1.0;
  const double u = x - 1;
  if (std::abs(u) < 0.02) {
    // Near the fold ln y - y is flat and the bracket below would drown in
    // rounding; the reflection y - 1 = -u + 2u^2/3 - ... converges fast here.
    static constexpr double c[] = {-1.0,           2.0 / 3,       -4.0 / 9,
                                   44.0 / 135,     -104.0 / 405,  40.0 / 189,
                                   -7648.0 / 42525, 2848.0 / 18225};
    double acc = 0.0;
    for (int k = 7; k >= 0; --k) acc = (acc + c[k]) * u;
    return 1 + acc;
  }
  // Work with ln y - y, which is monotone on each branch and does not
  // underflow for large arguments.
  const double target = std::log(x) - x;
  auto F = [&](double y) { return std::log(y) - y - target; };
  double lo, hi;
  if (x < 1) {
    lo = 1.0;  // F(1) > 0, F decreasing on (1, inf)
    hi = 2.0;
    while (F(hi) > 0) hi *= 2;
  } else {
    hi = 1.0;  // F(1) > 0, F increasing on (0, 1)
    lo = 0.5 * std::exp(target);
    while (F(lo) > 0) lo *= 0.5;
  }
  for (int i = 0; i < 400 && hi - lo > 1e-13 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = F(mid);
    if (fm == 0) return mid;
    // Keep the sign convention F(lo) and F(hi) on opposite sides.
    if ((fm > 0) == (F(lo) > 0))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::optional<double> truncated_exponential_steady_state(double rho, double t_cut, double x) {
  require(rho >= 0 && t_cut > 0, kModule, "truncated steady state needs rho >= 0, T > 0");
  require(std::isfinite(x), kModule, "x must be finite");
  const double gap = x - rho;
  // compare against rho + 1/T itself: (x - rho) T can round past 1 at the edge
  if (!(gap > 0) || x > rho + 1 / t_cut) return std::nullopt;
  return phi(std::min(gap * t_cut, 1.0)) / t_cut;
}

SteadyStateReport scan_equilibrium_points(const DiscountSpec& h, const ProductionFunction& f,
                                          std::vector<double> k_grid) {
  require(!k_grid.empty(), kModule, "capital grid must not be empty");
  for (std::size_t i = 0; i < k_grid.size(); ++i)
    require(k_grid[i] > 0 && (i == 0 || k_grid[i] > k_grid[i - 1]), kModule,
            "capital grid must be positive and strictly increasing");
  if (const auto* e = h.as<Exponential>(); e && std::holds_alternative<CobbDouglas>(f.repr())) {
    const double kb = f.k_for_marginal_product(e->rho);
    if (kb > k_grid.front() && kb < k_grid.back() &&
        !std::binary_search(k_grid.begin(), k_grid.end(), kb)) {
      k_grid.insert(std::upper_bound(k_grid.begin(), k_grid.end(), kb), kb);
    }
  }

  SteadyStateReport rep;
  rep.rows.resize(k_grid.size());
  num::parallel_for(k_grid.size(), [&](std::size_t i) {
    const double x = f.f_prime(k_grid[i]);
    rep.rows[i] = {k_grid[i], x, solve_alpha(h, x)};
  });
  for (const auto& row : rep.rows) {
    if (!row.alpha.admissible) continue;
    auto widen = [](std::optional<std::pair<double, double>>& r, double v) {
      if (!r)
        r = {v, v};
      else
        r = {std::min(r->first, v), std::max(r->second, v)};
    };
    widen(rep.admissible_fprime, row.fprime);
    widen(rep.admissible_k, row.k);
  }
  return rep;
}

}  // namespace tc
