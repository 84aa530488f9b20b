#include "displab/painleve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "displab/detail/collocation.hpp"
#include "displab/detail/fornberg.hpp"

namespace displab::painleve {

namespace {

using Vec4 = Eigen::Matrix<double, 4, 1>;
using Mat4 = Eigen::Matrix<double, 4, 4>;
using Vec2 = Eigen::Matrix<double, 2, 1>;
using Mat2 = Eigen::Matrix<double, 2, 2>;
using Vec2c = Eigen::Matrix<Complex, 2, 1>;

/// Real roots of t^3 + p t + q = 0.
std::vector<double> depressed_cubic_roots(double p, double q) {
  const double disc = -4.0 * p * p * p - 27.0 * q * q;
  if (disc > 0.0) {
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    const double theta = std::acos(arg);
    std::vector<double> r(3);
    for (int k = 0; k < 3; ++k) r[k] = m * std::cos(theta / 3.0 - 2.0 * M_PI * k / 3.0);
    return r;
  }
  const double shifted = std::sqrt(std::max(0.0, q * q / 4.0 + p * p * p / 27.0));
  return {std::cbrt(-q / 2.0 + shifted) + std::cbrt(-q / 2.0 - shifted)};
}

Vec4 p12_rhs(double X, double T, const Vec4& y) {
  Vec4 f;
  f[0] = y[1];
  f[1] = y[2];
  f[2] = y[3];
  f[3] = 240.0 * (T * y[0] - X - y[0] * y[0] * y[0] / 6.0 - y[1] * y[1] / 24.0 -
                  y[0] * y[2] / 12.0);
  return f;
}

Mat4 p12_jacobian(double, double T, const Vec4& y) {
  Mat4 A = Mat4::Zero();
  A(0, 1) = A(1, 2) = A(2, 3) = 1.0;
  A(3, 0) = 240.0 * (T - y[0] * y[0] / 2.0 - y[2] / 12.0);
  A(3, 1) = -20.0 * y[1];
  A(3, 2) = -20.0 * y[0];
  return A;
}

std::vector<Vec4> cubic_seed(const std::vector<double>& xs, double T) {
  std::vector<Vec4> seed(xs.size(), Vec4::Zero());
  double prev = std::cbrt(-6.0 * xs.front());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto roots = depressed_cubic_roots(-6.0 * T, 6.0 * xs[i]);
    double best = roots.front();
    for (double r : roots)
      if (std::abs(r - prev) < std::abs(best - prev)) best = r;
    seed[i][0] = best;
    prev = best;
  }
  // Slopes from one-sided differences; curvature left at zero.
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    seed[i][1] = (seed[i + 1][0] - seed[i][0]) / (xs[i + 1] - xs[i]);
  seed.back()[1] = seed[xs.size() - 2][1];
  return seed;
}

P12Solution solve_p12_seeded(double T, const P12Options& opts, std::vector<Vec4> seed) {
  if (!(opts.x_max >= 50.0))
    throw validation_error("p12: the matching interval must reach x_max >= 50");
  if (opts.n < 2000) throw validation_error("p12: mesh too coarse (need n >= 2000)");

  std::vector<double> xs(opts.n);
  for (std::size_t i = 0; i < opts.n; ++i)
    xs[i] = -opts.x_max +
            2.0 * opts.x_max * static_cast<double>(i) / static_cast<double>(opts.n - 1);

  if (seed.empty()) seed = cubic_seed(xs, T);

  // Far-field values from X = T U - U^3/6: with s = cbrt(6X) the decaying
  // branch is U = -s - 2T/s + O(T^3 s^-5), so U_X = -2/s^2 + 4T/s^4.
  const double edge_u = std::cbrt(6.0 * opts.x_max);
  const double edge_du = 2.0 * T / edge_u;
  const double edge_v =
      -2.0 / (edge_u * edge_u) + 4.0 * T / (edge_u * edge_u * edge_u * edge_u);
  const std::vector<detail::BoundaryCondition> bcs = {{false, 0, edge_u + edge_du},
                                                      {false, 1, edge_v},
                                                      {true, 0, -edge_u - edge_du},
                                                      {true, 1, edge_v}};

  auto f = [T](double X, const Vec4& y) { return p12_rhs(X, T, y); };
  auto df = [T](double X, const Vec4& y) { return p12_jacobian(X, T, y); };
  auto y = detail::solve_collocation<4>(xs, f, df, bcs, std::move(seed), opts.tol, opts.max_iter);

  P12Solution sol;
  sol.T = T;
  sol.xs = std::move(xs);
  for (int c = 0; c < 4; ++c) {
    sol.comp[c].resize(opts.n);
    for (std::size_t i = 0; i < opts.n; ++i) sol.comp[c][i] = y[i][c];
  }
  return sol;
}

}  // namespace

double p12_residual(const P12Solution& sol) {
  const std::size_t n = sol.xs.size();
  if (n < 2 || sol.comp[0].size() != n || sol.comp[1].size() != n ||
      sol.comp[2].size() != n || sol.comp[3].size() != n)
    throw validation_error("p12 residual: solution arrays are inconsistent");
  auto node = [&](std::size_t i) {
    return Vec4(sol.comp[0][i], sol.comp[1][i], sol.comp[2][i], sol.comp[3][i]);
  };
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = sol.xs[i + 1] - sol.xs[i];
    const Vec4 yi = node(i), yi1 = node(i + 1);
    const Vec4 fi = p12_rhs(sol.xs[i], sol.T, yi);
    const Vec4 fi1 = p12_rhs(sol.xs[i + 1], sol.T, yi1);
    const Vec4 ym = 0.5 * (yi + yi1) + (h / 8.0) * (fi - fi1);
    const Vec4 fm = p12_rhs(0.5 * (sol.xs[i] + sol.xs[i + 1]), sol.T, ym);
    const Vec4 defect = yi1 - yi - (h / 6.0) * (fi + 4.0 * fm + fi1);
    worst = std::max(worst, defect.cwiseAbs().maxCoeff());
  }
  return worst;
}

namespace {

double interp_six(const std::vector<double>& xs, const std::vector<double>& vals, double x) {
  const std::size_t n = xs.size();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::ptrdiff_t idx = it - xs.begin();
  const std::ptrdiff_t i0 =
      std::clamp<std::ptrdiff_t>(idx - 3, 0, static_cast<std::ptrdiff_t>(n) - 6);
  const auto w =
      detail::fd_weights(x, std::span<const double>(xs.data() + i0, 6), 0);
  double acc = 0.0;
  for (int i = 0; i < 6; ++i) acc += w[static_cast<std::size_t>(i)] * vals[i0 + i];
  return acc;
}

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

Complex tail_series_q(Complex Z) {
  return -std::sqrt(Z / 6.0) - 1.0 / (48.0 * Z * Z) +
         49.0 * std::sqrt(6.0) / 4608.0 * std::pow(Z, -4.5);
}

Complex tail_series_qp(Complex Z) {
  return -0.5 / std::sqrt(6.0 * Z) + 1.0 / (24.0 * Z * Z * Z) -
         4.5 * 49.0 * std::sqrt(6.0) / 4608.0 * std::pow(Z, -5.5);
}

/// WKB rate of the fastest-growing solution of delta'' = 12 Q delta with
/// Q ~ -sqrt(Z/6), per unit arclength travelled in the direction e^{i psi}.
double tritronquee_growth_rate(Complex Z, double psi) {
  const double root = std::sqrt(2.0 * std::sqrt(6.0)) * std::pow(std::abs(Z), 0.25);
  return root * std::abs(std::sin(psi + std::arg(Z) / 4.0));
}

}  // namespace

double P12Solution::evaluate(double X, int deriv) const {
  if (deriv < 0 || deriv > 3) throw validation_error("p12: derivative order must be 0..3");
  if (X < xs.front() || X > xs.back())
    throw domain_error("p12: evaluation point outside the solved interval");
  return interp_six(xs, comp[static_cast<std::size_t>(deriv)], X);
}

P12Solution solve_p12(double T, const P12Options& opts) { return solve_p12_seeded(T, opts, {}); }

std::vector<P12Solution> solve_p12_family(std::span<const double> Ts, const P12Options& opts) {
  std::vector<std::size_t> order(Ts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return Ts[a] < Ts[b]; });

  std::vector<P12Solution> out(Ts.size());
  std::vector<Vec4> warm;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const std::size_t i = order[rank];
    out[i] = solve_p12_seeded(Ts[i], opts, warm);
    warm.resize(out[i].xs.size());
    for (std::size_t j = 0; j < warm.size(); ++j)
      for (int c = 0; c < 4; ++c) warm[j][c] = out[i].comp[static_cast<std::size_t>(c)][j];
  }
  return out;
}

double tritronquee_series(double Z) {
  if (!(Z > 0.0)) throw domain_error("tritronquee: series tail needs Z > 0");
  return -std::sqrt(Z / 6.0) - 1.0 / (48.0 * Z * Z) +
         49.0 * std::sqrt(6.0) / 4608.0 * std::pow(Z, -4.5);
}

double TritronqueeSolution::evaluate(double Z, int deriv) const {
  if (deriv < 0 || deriv > 1) throw validation_error("tritronquee: derivative order must be 0..1");
  if (Z < zs.front() || Z > zs.back())
    throw domain_error("tritronquee: evaluation point outside the solved interval");
  return interp_six(zs, deriv == 0 ? q : qp, Z);
}

TritronqueeSolution solve_tritronquee(double z_left, double z_right, std::size_t n) {
  if (!(z_left > 0.0) || !(z_right > z_left))
    throw validation_error("tritronquee: need 0 < z_left < z_right");
  if (n < 100) throw validation_error("tritronquee: mesh too coarse (need n >= 100)");

  std::vector<double> zs(n);
  for (std::size_t i = 0; i < n; ++i)
    zs[i] = z_left + (z_right - z_left) * static_cast<double>(i) / static_cast<double>(n - 1);

  std::vector<Vec2> seed(n);
  for (std::size_t i = 0; i < n; ++i) {
    seed[i][0] = tritronquee_series(zs[i]);
    seed[i][1] = -0.5 / std::sqrt(6.0 * zs[i]);
  }

  auto f = [](double Z, const Vec2& y) { return Vec2(y[1], 6.0 * y[0] * y[0] - Z); };
  auto df = [](double, const Vec2& y) {
    Mat2 A;
    A << 0.0, 1.0, 12.0 * y[0], 0.0;
    return A;
  };
  const std::vector<detail::BoundaryCondition> bcs = {
      {false, 0, tritronquee_series(z_left)}, {true, 0, tritronquee_series(z_right)}};
  const auto y = detail::solve_collocation<2>(zs, f, df, bcs, std::move(seed));

  TritronqueeSolution sol;
  sol.zs = std::move(zs);
  sol.q.resize(n);
  sol.qp.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    sol.q[i] = y[i][0];
    sol.qp[i] = y[i][1];
  }
  return sol;
}

std::size_t MarchResult::index_of(double z) const {
  for (std::size_t i = 0; i < zs.size(); ++i)
    if (std::abs(zs[i] - z) < 1e-9) return i;
  throw validation_error("march: no accepted point at the requested location");
}

MarchResult march_tritronquee(double q0, double qp0, double z_start, double z_end, double tol,
                              std::span<const double> checkpoints) {
  if (z_end == z_start) throw validation_error("march: empty interval");
  if (!(tol > 0.0) || tol > 1e-4) throw validation_error("march: tolerance must lie in (0, 1e-4]");
  const double dir = (z_end > z_start) ? 1.0 : -1.0;

  std::vector<double> cps(checkpoints.begin(), checkpoints.end());
  for (double c : cps)
    if ((c - z_start) * dir < 0.0 || (c - z_end) * dir > 0.0)
      throw validation_error("march: checkpoint outside the interval");
  std::sort(cps.begin(), cps.end(),
            [dir](double a, double b) { return (a - b) * dir < 0.0; });

  auto rhs = [](double z, const Vec2& y) { return Vec2(y[1], 6.0 * y[0] * y[0] - z); };

  MarchResult res;
  double z = z_start;
  Vec2 y(q0, qp0);
  auto push = [&] {
    res.zs.push_back(z);
    res.q.push_back(y[0]);
    res.qp.push_back(y[1]);
  };
  push();

  const double span_len = std::abs(z_end - z_start);
  double h = dir * std::min(0.01, span_len / 10.0);
  std::size_t cp_idx = 0;
  const double atol = 1e-12;

  for (long step = 0; step < 2000000; ++step) {
    const double target = (cp_idx < cps.size()) ? cps[cp_idx] : z_end;
    bool clamped = false;
    double h_used = h;
    if ((z + h_used - target) * dir > 0.0) {
      h_used = target - z;
      clamped = true;
    }
    if (std::abs(h_used) < 1e-14 * std::max(1.0, std::abs(z)))
      throw numerical_error("march: step size underflow");

    const Vec2 k1 = rhs(z, y);
    const Vec2 k2 = rhs(z + h_used * a21, y + h_used * (a21 * k1));
    const Vec2 k3 = rhs(z + h_used * 0.3, y + h_used * (a31 * k1 + a32 * k2));
    const Vec2 k4 = rhs(z + h_used * 0.8, y + h_used * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vec2 k5 =
        rhs(z + h_used * (8.0 / 9.0), y + h_used * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vec2 y6 = y + h_used * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    const Vec2 k6 = rhs(z + h_used, y6);
    const Vec2 ynew = y + h_used * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Vec2 k7 = rhs(z + h_used, ynew);
    const Vec2 err_vec =
        h_used * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double err = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double scale = atol + tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      const double r = err_vec[i] / scale;
      err += r * r;
    }
    err = std::sqrt(err / 2.0);
    if (!std::isfinite(err)) err = 1e10;

    if (err <= 1.0) {
      z = clamped ? target : z + h_used;
      y = ynew;
      push();
      if (std::abs(y[0]) > 1e6) {
        res.pole_found = true;
        res.pole_location = z + 2.0 * y[0] / y[1];
        return res;
      }
      if (cp_idx < cps.size() && z == cps[cp_idx]) ++cp_idx;
      if (z == z_end || (z - z_end) * dir >= 0.0) return res;
      const double factor = std::clamp(0.9 * std::pow(err + 1e-300, -0.2), 0.2, 5.0);
      h = h_used * factor;
    } else {
      h = h_used * std::max(0.2, 0.9 * std::pow(err, -0.2));
    }
  }
  throw numerical_error("march: step limit exceeded");
}

RayTrajectory march_tritronquee_ray(double angle, double r_far, double r_near,
                                    double record_step, double tol) {
  if (!(std::abs(angle) < 0.8 * M_PI))
    throw validation_error("ray march: the tail expansion only seeds rays with |angle| < 4*pi/5");
  if (!(r_far >= 50.0)) throw validation_error("ray march: the tail seed needs r_far >= 50");
  if (!(r_near < r_far)) throw validation_error("ray march: r_near must lie below r_far");
  if (!(record_step > 0.0)) throw validation_error("ray march: record step must be positive");
  if (!(tol > 0.0) || tol > 1e-4)
    throw validation_error("ray march: tolerance must lie in (0, 1e-4]");

  if ((r_far - r_near) / record_step > 1e7)
    throw validation_error("ray march: record step too small for the interval");
  std::vector<double> cps;
  for (std::size_t k = 0;; ++k) {
    const double rr = r_far - static_cast<double>(k) * record_step;
    if (rr <= r_near + 0.5 * record_step) break;
    cps.push_back(rr);
  }
  cps.push_back(r_near);

  const Complex dirZ = std::polar(1.0, angle);
  auto rhs = [dirZ](double r, const Vec2c& y) {
    return Vec2c(dirZ * y[1], dirZ * (6.0 * y[0] * y[0] - r * dirZ));
  };

  RayTrajectory res;
  res.angle = angle;
  double r = r_far;
  Vec2c y(tail_series_q(r * dirZ), tail_series_qp(r * dirZ));
  auto push = [&] {
    res.rs.push_back(r);
    res.q.push_back(y[0]);
    res.qp.push_back(y[1]);
  };
  push();

  double h = -std::min(0.01, (r_far - r_near) / 10.0);
  std::size_t cp_idx = 1;
  const double atol = 1e-12;

  for (long step = 0; step < 2000000; ++step) {
    const double target = cps[cp_idx];
    bool clamped = false;
    double h_used = h;
    if (r + h_used < target) {
      h_used = target - r;
      clamped = true;
    }
    if (std::abs(h_used) < 1e-14 * std::max(1.0, std::abs(r)))
      throw numerical_error("ray march: step size underflow");

    const Vec2c k1 = rhs(r, y);
    const Vec2c k2 = rhs(r + h_used * a21, y + h_used * (a21 * k1));
    const Vec2c k3 = rhs(r + h_used * 0.3, y + h_used * (a31 * k1 + a32 * k2));
    const Vec2c k4 = rhs(r + h_used * 0.8, y + h_used * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vec2c k5 =
        rhs(r + h_used * (8.0 / 9.0), y + h_used * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vec2c y6 = y + h_used * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    const Vec2c k6 = rhs(r + h_used, y6);
    const Vec2c ynew = y + h_used * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Vec2c k7 = rhs(r + h_used, ynew);
    const Vec2c err_vec =
        h_used * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double err = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double scale = atol + tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      const double ratio = std::abs(err_vec[i]) / scale;
      err += ratio * ratio;
    }
    err = std::sqrt(err / 2.0);
    if (!std::isfinite(err)) err = 1e10;

    if (err <= 1.0) {
      const double r_mid = r + 0.5 * h_used;
      r = clamped ? target : r + h_used;
      y = ynew;
      res.growth_exponent +=
          tritronquee_growth_rate(r_mid * dirZ, angle) * std::abs(h_used);
      if (std::abs(y[0]) > 1e6) {
        res.pole_found = true;
        res.pole_location = r * dirZ + 2.0 * y[0] / y[1];
        return res;
      }
      if (clamped || std::abs(r - target) < 1e-12 * std::max(1.0, std::abs(r))) {
        push();
        ++cp_idx;
        if (cp_idx == cps.size()) return res;
      }
      const double factor = std::clamp(0.9 * std::pow(err + 1e-300, -0.2), 0.2, 5.0);
      h = h_used * factor;
    } else {
      h = h_used * std::max(0.2, 0.9 * std::pow(err, -0.2));
    }
  }
  throw numerical_error("ray march: step limit exceeded");
}

RayTrajectory solve_tritronquee_ray(double angle, double r_near, double r_far, std::size_t n) {
  if (!(std::abs(angle) < 0.8 * M_PI))
    throw validation_error("tritronquee ray: the pole-free sector is |angle| < 4*pi/5");
  if (!(r_far >= 50.0))
    throw validation_error("tritronquee ray: the tail datum needs r_far >= 50");
  if (!(r_near > 0.0) || !(r_near < r_far))
    throw validation_error("tritronquee ray: need 0 < r_near < r_far");
  if (n < 100) throw validation_error("tritronquee ray: mesh too coarse (need n >= 100)");

  const Complex dirZ = std::polar(1.0, angle);
  std::vector<double> rs(n);
  for (std::size_t i = 0; i < n; ++i)
    rs[i] = r_near + (r_far - r_near) * static_cast<double>(i) / static_cast<double>(n - 1);

  std::vector<Vec4> seed(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Complex q = tail_series_q(rs[i] * dirZ);
    const Complex p = tail_series_qp(rs[i] * dirZ);
    seed[i] = Vec4(q.real(), q.imag(), p.real(), p.imag());
  }

  auto f = [dirZ](double r, const Vec4& y) {
    const Complex q(y[0], y[1]), p(y[2], y[3]);
    const Complex dq = dirZ * p;
    const Complex dp = dirZ * (6.0 * q * q - r * dirZ);
    return Vec4(dq.real(), dq.imag(), dp.real(), dp.imag());
  };
  auto df = [dirZ](double, const Vec4& y) {
    Mat4 A = Mat4::Zero();
    A(0, 2) = dirZ.real();
    A(0, 3) = -dirZ.imag();
    A(1, 2) = dirZ.imag();
    A(1, 3) = dirZ.real();
    const Complex c = 12.0 * dirZ * Complex(y[0], y[1]);
    A(2, 0) = c.real();
    A(2, 1) = -c.imag();
    A(3, 0) = c.imag();
    A(3, 1) = c.real();
    return A;
  };

  const Complex qL = tail_series_q(r_near * dirZ);
  const Complex qR = tail_series_q(r_far * dirZ);
  const std::vector<detail::BoundaryCondition> bcs = {{false, 0, qL.real()},
                                                      {false, 1, qL.imag()},
                                                      {true, 0, qR.real()},
                                                      {true, 1, qR.imag()}};
  const auto y = detail::solve_collocation<4>(rs, f, df, bcs, std::move(seed));

  RayTrajectory out;
  out.angle = angle;
  out.rs = std::move(rs);
  out.q.resize(n);
  out.qp.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.q[i] = Complex(y[i][0], y[i][1]);
    out.qp[i] = Complex(y[i][2], y[i][3]);
  }
  return out;
}

}  // namespace displab::painleve
