#include "displab/rh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "displab/errors.hpp"

namespace displab::rh {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kPi = std::numbers::pi;

Mat2 make_mat(Complex a, Complex b, Complex c, Complex d) {
  Mat2 m;
  m << a, b, c, d;
  return m;
}

/// Indices of fan.rays in the order a counterclockwise walk starting just
/// above the positive real axis crosses them: angles in (0, pi] first, then
/// (-pi, 0], each ascending.
std::vector<std::size_t> crossing_order(const RayFan& fan) {
  for (const RayJump& ray : fan.rays) {
    if (!std::isfinite(ray.angle) || ray.angle <= -kPi || ray.angle > kPi)
      throw validation_error("ray fan: angles must lie in (-pi, pi]");
  }
  std::vector<std::size_t> order(fan.rays.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto key = [&](std::size_t i) {
    const double a = fan.rays[i].angle;
    return a > 0.0 ? a : a + 2.0 * kPi;
  };
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return key(i) < key(j); });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (key(order[i - 1]) == key(order[i]))
      throw validation_error("ray fan: duplicate ray angle");
  }
  return order;
}

double identity_defect(const Mat2& p) {
  return (p - Mat2::Identity()).cwiseAbs().maxCoeff();
}

int parse_hierarchy_index(const std::string& name, const std::string& prefix) {
  const std::string digits = name.substr(prefix.size());
  if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
    throw validation_error("builtin_reflection: malformed name '" + name + "'");
  return std::stoi(digits);
}

ReflectionFamily kdv_family(const std::string& label, int m) {
  if (m < 1 || m > 6)
    throw validation_error("builtin_reflection: hierarchy index must lie in 1..6");
  ReflectionFamily fam;
  fam.label = label;
  fam.spectral_min = -2.0;
  fam.spectral_max = -0.02;
  const double rate = 2.0 * std::pow(4.0, m);
  const double power = 0.5 * (2 * m + 1);
  fam.evolution = [rate, power](double lambda, double t, double eps) {
    if (!(lambda < 0.0))
      throw domain_error("reflection evolution: lambda must be negative");
    if (!(eps > 0.0)) throw validation_error("reflection evolution: eps must be positive");
    return std::polar(1.0, rate * t * std::pow(-lambda, power) / eps);
  };
  fam.jump = [](double lambda, double x, double /*t*/, double eps, Complex r) {
    if (!(eps > 0.0)) throw validation_error("reflection jump: eps must be positive");
    if (lambda == 0.0)
      throw domain_error("reflection jump: lambda = 0 separates the two spectral bands");
    if (lambda > 0.0) return make_mat(0.0, 1.0, 1.0, 0.0);
    const Complex osc = std::polar(1.0, 2.0 * x * std::sqrt(-lambda) / eps);
    return make_mat(1.0, r * osc, -std::conj(r) / osc, 1.0 - std::norm(r));
  };
  return fam;
}

}  // namespace

RayFan builtin_fan(const std::string& name) {
  RayFan fan;
  fan.label = name;
  if (name == "p12") {
    fan.rays = {
        {0.0, false, make_mat(1.0, 1.0, 0.0, 1.0)},
        {6.0 * kPi / 7.0, true, make_mat(1.0, 0.0, 1.0, 1.0)},
        {kPi, true, make_mat(0.0, 1.0, -1.0, 0.0)},
        {-6.0 * kPi / 7.0, true, make_mat(1.0, 0.0, 1.0, 1.0)},
    };
    return fan;
  }
  if (name == "p1") {
    fan.rays = {
        {0.0, false, make_mat(1.0, 0.0, kI, 1.0)},
        {2.0 * kPi / 5.0, false, make_mat(1.0, kI, 0.0, 1.0)},
        {kPi, true, make_mat(0.0, kI, kI, 0.0)},
        {-2.0 * kPi / 5.0, false, make_mat(1.0, kI, 0.0, 1.0)},
    };
    return fan;
  }
  throw validation_error("builtin_fan: unknown fan '" + name + "'");
}

Mat2 normalization_matrix(const std::string& name) {
  const double s = 1.0 / std::sqrt(2.0);
  if (name == "p12") {
    const Complex w = std::polar(1.0, -kPi / 4.0);
    return make_mat(s * w, s * std::conj(w), -s * w, s * std::conj(w));
  }
  if (name == "p1") return make_mat(s, s, s, -s);
  throw validation_error("normalization_matrix: unknown fan '" + name + "'");
}

double cyclic_defect(const RayFan& fan) {
  const auto order = crossing_order(fan);
  unsigned mask = 0;
  for (std::size_t i = 0; i < order.size(); ++i)
    if (fan.rays[order[i]].toward_node) mask |= 1u << i;
  return cyclic_defect_pattern(fan, mask);
}

double cyclic_defect_pattern(const RayFan& fan, unsigned invert_mask) {
  const auto order = crossing_order(fan);
  if (order.size() < 8 * sizeof(unsigned) && invert_mask >> order.size())
    throw validation_error("cyclic_defect_pattern: mask has bits beyond the ray count");
  Mat2 prod = Mat2::Identity();
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Mat2& v = fan.rays[order[i]].matrix;
    prod = prod * ((invert_mask >> i) & 1u ? Mat2(v.inverse()) : v);
  }
  return identity_defect(prod);
}

Complex p12_phase(Complex zeta, double X, double T) {
  const Complex root = std::sqrt(zeta);
  const Complex z3 = root * root * root;
  return z3 * z3 * root / 105.0 - (T / 3.0) * z3 + X * root;
}

Complex p1_phase(Complex zeta, double Z) {
  const Complex root = std::sqrt(zeta);
  return 0.8 * zeta * zeta * root - Z * root;
}

ReflectionFamily builtin_reflection(const std::string& name) {
  if (name == "kdv") return kdv_family(name, 1);
  if (name.rfind("kdv_hierarchy_", 0) == 0)
    return kdv_family(name, parse_hierarchy_index(name, "kdv_hierarchy_"));
  if (name == "ch") {
    ReflectionFamily fam;
    fam.label = name;
    fam.spectral_min = -3.0;
    fam.spectral_max = 3.0;
    fam.evolution = [](double z, double t, double eps) {
      if (!(eps > 0.0)) throw validation_error("reflection evolution: eps must be positive");
      return std::polar(1.0, 4.0 * t * z / (eps * (1.0 + 4.0 * z * z)));
    };
    fam.jump = [](double z, double y, double /*t*/, double eps, Complex r) {
      if (!(eps > 0.0)) throw validation_error("reflection jump: eps must be positive");
      const Complex osc = std::polar(1.0, -2.0 * y * z);
      return make_mat(1.0 - std::norm(r), r * osc, -std::conj(r) / osc, 1.0);
    };
    return fam;
  }
  if (name == "nls_defocusing" || name == "nls_focusing") {
    const double sign = (name == "nls_focusing") ? 1.0 : -1.0;
    ReflectionFamily fam;
    fam.label = name;
    fam.spectral_min = -3.0;
    fam.spectral_max = 3.0;
    fam.evolution = [](double z, double t, double eps) {
      if (!(eps > 0.0)) throw validation_error("reflection evolution: eps must be positive");
      return std::polar(1.0, 4.0 * t * z * z / eps);
    };
    fam.jump = [sign](double z, double x, double /*t*/, double eps, Complex r) {
      if (!(eps > 0.0)) throw validation_error("reflection jump: eps must be positive");
      const Complex osc = std::polar(1.0, 2.0 * x * z / eps);
      return make_mat(1.0 + sign * std::norm(r), sign * std::conj(r) / osc, r * osc, 1.0);
    };
    return fam;
  }
  throw validation_error("builtin_reflection: unknown family '" + name + "'");
}

double det_defect(const ReflectionFamily& family) {
  if (!family.jump) throw validation_error("det_defect: family has no jump callable");
  if (!(family.spectral_min < family.spectral_max))
    throw validation_error("det_defect: empty spectral band");
  constexpr int kNodes = 25;
  const double xs[] = {-1.1, 0.7};
  const double ts[] = {0.0, 0.3};
  const double epss[] = {0.05, 0.2};
  double worst = 0.0;
  for (int j = 0; j < kNodes; ++j) {
    const double z = family.spectral_min +
                     (family.spectral_max - family.spectral_min) * j / (kNodes - 1.0);
    const Complex r = 0.9 * std::exp(-z * z / 3.0) *
                      std::polar(1.0, 0.8 * z + 0.3 * z * z * z);
    for (double x : xs)
      for (double t : ts)
        for (double eps : epss) {
          const Mat2 v = family.jump(z, x, t, eps, r);
          worst = std::max(worst, std::abs(v.determinant() - 1.0));
        }
  }
  return worst;
}

double rho_wkb(const datum::BranchInverse& fl, double lambda) {
  if (!std::isfinite(lambda) || lambda <= fl.umin() || lambda > -1e-6)
    throw domain_error("rho_wkb: lambda must lie in (umin, -1e-6]");
  const double s_max = std::sqrt(-lambda);
  auto f = [&](double s) { return fl.value(lambda + s * s); };

  // Dyadic panels graded toward the endpoint s_max, where the integrand is
  // logarithmically singular; stop once the remaining sliver maps to
  // |u| < 1e-10, below which the branch inverse stops resolving.
  const double u_floor = 1e-10;
  const double t_star = std::sqrt(s_max * s_max - u_floor);
  using Gauss = boost::math::quadrature::gauss<double, 32>;
  double acc = 0.0;
  double left = 0.0;
  while (left < t_star) {
    double right = s_max - 0.5 * (s_max - left);
    if (right >= t_star) right = t_star;
    acc += Gauss::integrate(f, left, right);
    left = right;
  }

  // Close the sliver with a local p + q log(s_max - s) model.
  const double w = s_max - t_star;
  const double g1 = f(s_max - w);
  const double g2 = f(s_max - 2.0 * w);
  const double q = (g2 - g1) / std::log(2.0);
  const double p = g1 - q * std::log(w);
  acc += p * w + q * w * (std::log(w) - 1.0);
  return acc;
}

Complex wkb_reflection(const datum::BranchInverse& fl, double lambda, double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps))
    throw validation_error("wkb_reflection: eps must be positive");
  return kI * std::exp(Complex(0.0, -2.0 * rho_wkb(fl, lambda) / eps));
}

double phi_eval(const datum::BranchInverse& fl, const hopf::CatastrophePoint& cp,
                double lambda, double x, double t) {
  if (!std::isfinite(x) || !std::isfinite(t))
    throw validation_error("phi_eval: x and t must be finite");
  if (!std::isfinite(lambda) || lambda <= fl.umin() || lambda > cp.u_c)
    throw domain_error("phi_eval: lambda must lie in (umin, u_c]");
  const double d = cp.u_c - lambda;
  const double F0 = -x + 6.0 * t * cp.u_c + cp.xi_c;
  const double F1 = 6.0 * t + fl.derivative(cp.u_c, 1);
  const double F2 = fl.derivative(cp.u_c, 2);
  double integral = 0.0;
  if (d > 0.0) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    auto f = [&](double xi) {
      const double gap = xi - lambda;
      return fl.derivative(xi, 3) * gap * gap * std::sqrt(gap);
    };
    integral = GK::integrate(f, lambda, cp.u_c, 15, 1e-10);
  }
  const double root = std::sqrt(d);
  return -root * F0 + (2.0 / 3.0) * d * root * F1 - (4.0 / 15.0) * d * d * root * F2 +
         (4.0 / 15.0) * integral;
}

Mat2 global_parametrix(double u_c, Complex lambda) {
  if (!std::isfinite(u_c) || !(u_c < 0.0))
    throw validation_error("global_parametrix: u_c must be negative and finite");
  const Complex front = std::pow(-lambda, 0.25);
  const Complex gap = Complex(u_c, 0.0) - lambda;
  const Complex a = front * std::pow(gap, -0.25);
  const Complex b = front * std::pow(gap, 0.25);
  return make_mat(a, a, kI * b, -kI * b);
}

Complex alpha_phase(Complex lambda, double x, double t) {
  const Complex root = std::sqrt(-lambda);
  return x * root + 4.0 * t * root * root * root;
}

double beta_phase(double z, double y, double t) {
  return -z * (y - 2.0 * t / (1.0 + 4.0 * z * z));
}

}  // namespace displab::rh
