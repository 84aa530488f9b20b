#include "displab/hopf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "displab/detail/fit.hpp"
#include "displab/detail/rootfind.hpp"

namespace displab::hopf {

std::vector<double> characteristic_roots(const datum::InitialDatum& d, double x, double t) {
  if (!(t >= 0.0) || !std::isfinite(t) || !std::isfinite(x))
    throw validation_error("characteristic_roots: need finite x and t >= 0");
  auto g = [&](double xi) { return xi + 6.0 * t * d(xi) - x; };
  auto dg = [&](double xi) { return 1.0 + 6.0 * t * d.derivative(xi, 1); };

  // u0 <= 0 confines every foot to [x, x + 6 t |min u0|].
  const double margin = 1e-6 * (1.0 + std::abs(x));
  const double lo = x - margin;
  const double hi = x + 6.0 * t * std::abs(d.minimum_value()) + margin;

  const std::size_t N = 4096;
  std::vector<double> roots;
  double prev_xi = lo;
  double prev_g = g(lo);
  for (std::size_t i = 1; i <= N; ++i) {
    const double xi = lo + (hi - lo) * static_cast<double>(i) / N;
    const double gi = g(xi);
    if (prev_g == 0.0 || (prev_g > 0) != (gi > 0)) {
      const double r = (prev_g == 0.0)
                           ? prev_xi
                           : detail::newton_bisect(g, dg, prev_xi, xi, prev_g, gi, 1e-14, 1e-13);
      if (roots.empty() || r - roots.back() > 1e-10) roots.push_back(r);
    }
    prev_xi = xi;
    prev_g = gi;
  }
  if (g(hi) == 0.0 && (roots.empty() || hi - roots.back() > 1e-10)) roots.push_back(hi);
  return roots;
}

double hopf_evaluate(const datum::InitialDatum& d, double x, double t) {
  const auto roots = characteristic_roots(d, x, t);
  if (roots.empty()) throw numerical_error("hopf_evaluate: no characteristic reaches the point");
  if (roots.size() > 1)
    throw multivalued_error(
        "hopf_evaluate: " + std::to_string(roots.size()) + " characteristics cross at the point",
        roots);
  return d(roots.front());
}

CatastrophePoint find_catastrophe(const datum::InitialDatum& d, bool require_generic) {
  const double S = d.decay_scale();
  const double xm = d.minimum_location();
  auto slope = [&](double xi) { return -d.derivative(xi, 1); };

  // Scan the decreasing branch for local maxima of -u0'.
  const std::size_t N = 8192;
  const double lo = -S;
  const double hi = xm;
  std::vector<double> xs(N + 1), ms(N + 1);
  for (std::size_t i = 0; i <= N; ++i) {
    xs[i] = lo + (hi - lo) * static_cast<double>(i) / N;
    ms[i] = slope(xs[i]);
  }
  std::vector<std::size_t> maxima;
  for (std::size_t i = 1; i + 1 <= N; ++i)
    if (ms[i] >= ms[i - 1] && ms[i] >= ms[i + 1] && ms[i] > 0.0) maxima.push_back(i);
  if (maxima.empty())
    throw validation_error("find_catastrophe: no steepest point on the decreasing branch");
  const std::size_t best =
      *std::max_element(maxima.begin(), maxima.end(),
                        [&](std::size_t u, std::size_t v) { return ms[u] < ms[v]; });
  double second = -1.0;
  double second_at = 0.0;
  for (std::size_t i : maxima)
    if (std::abs(xs[i] - xs[best]) > 1e-3 * S && ms[i] > second) {
      second = ms[i];
      second_at = xs[i];
    }

  double a = xs[best - 1];
  double b = xs[best + 1];
  double xi_c = detail::golden_max(slope, a, b, 1e-13);
  const double d2a = d.derivative(a, 2);
  const double d2b = d.derivative(b, 2);
  // xtol-driven polish: at a degenerate (quartically flat) steepest point the
  // residual of u0'' alone would leave xi_c several orders too loose.
  if (d2a < 0.0 && d2b > 0.0)
    xi_c = detail::newton_bisect([&](double t_) { return d.derivative(t_, 2); },
                                 [&](double t_) { return d.derivative(t_, 3); }, a, b, d2a, d2b,
                                 1e-15, 0.0);

  const double peak = slope(xi_c);
  if (second > 0.0 && peak - second < 1e-8 * peak && std::abs(second_at - xi_c) > 1e-3 * S)
    throw validation_error("find_catastrophe: two competing steepest points (tie)");

  CatastrophePoint cp;
  cp.xi_c = xi_c;
  cp.t_c = 1.0 / (6.0 * peak);
  cp.u_c = d(xi_c);
  cp.x_c = 6.0 * cp.t_c * cp.u_c + cp.xi_c;
  if (std::abs(1.0 + 6.0 * cp.t_c * d.derivative(xi_c, 1)) > 1e-9)
    throw numerical_error("find_catastrophe: breaking condition did not converge");

  try {
    cp.k = -datum::fl_derivatives(d, cp.u_c, 3);
  } catch (const domain_error&) {
    throw numerical_error("find_catastrophe: curvature constant not computable at u_c");
  }
  if (require_generic && !(cp.k > 1e-8))
    throw genericity_error("find_catastrophe: degenerate breaking (curvature constant k <= 0)");
  return cp;
}

double local_exponent(const datum::InitialDatum& d, const CatastrophePoint& cp,
                      std::span<const double> offsets) {
  if (offsets.size() < 3) throw validation_error("local_exponent: need at least 3 offsets");
  std::vector<double> lx, ly;
  for (double delta : offsets) {
    if (delta == 0.0) throw validation_error("local_exponent: offsets must be nonzero");
    const double u = hopf_evaluate(d, cp.x_c + delta, cp.t_c);
    lx.push_back(std::log(std::abs(delta)));
    ly.push_back(std::log(std::abs(u - cp.u_c)));
  }
  const auto fit = detail::fit_line(lx, ly);
  if (fit.max_residual > 0.05)
    throw numerical_error("local_exponent: power-law fit residual exceeds 0.05");
  return fit.slope;
}

ResidualTriple critical_residual(const datum::InitialDatum& d, double x, double t, double lambda) {
  ResidualTriple r;
  r.F = -x + 6.0 * lambda * t + datum::invert_decreasing(d, lambda);
  r.dF = 6.0 * t + datum::fl_derivatives(d, lambda, 1);
  r.d2F = datum::fl_derivatives(d, lambda, 2);
  return r;
}

}  // namespace displab::hopf
