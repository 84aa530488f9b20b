#include "displab/initial_data.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "displab/detail/fornberg.hpp"
#include "displab/detail/rootfind.hpp"

namespace displab::datum {

namespace {

double horner(const std::vector<double>& p, double s) {
  double acc = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * s + *it;
  return acc;
}

std::vector<double> poly_derivative(const std::vector<double>& p) {
  std::vector<double> out;
  for (std::size_t i = 1; i < p.size(); ++i) out.push_back(p[i] * static_cast<double>(i));
  if (out.empty()) out.push_back(0.0);
  return out;
}

// (1 - s^2) * p
std::vector<double> mul_one_minus_s2(const std::vector<double>& p) {
  std::vector<double> out(p.size() + 2, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    out[i] += p[i];
    out[i + 2] -= p[i];
  }
  return out;
}

// Profile -(1 - s^2) q(s), s = tanh x.  Applying d/dx = (1 - s^2) d/ds keeps
// every derivative a polynomial in s, so all orders are closed-form.
class TanhPolyProfile final : public InitialDatum::Profile {
 public:
  explicit TanhPolyProfile(std::vector<double> q) {
    std::vector<double> p0 = mul_one_minus_s2(q);
    for (double& c : p0) c = -c;
    polys_.push_back(std::move(p0));
    for (int m = 1; m <= 6; ++m) polys_.push_back(mul_one_minus_s2(poly_derivative(polys_.back())));
  }

  double value(double x) const override { return horner(polys_[0], std::tanh(x)); }
  double derivative(double x, int order) const override {
    return horner(polys_[static_cast<std::size_t>(order)], std::tanh(x));
  }
  int max_exact_order() const override { return 6; }
  double initial_halfwidth() const override { return 10.0; }

 private:
  std::vector<std::vector<double>> polys_;
};

// Natural cubic spline through given samples; identically zero outside the
// sampled range.
class TableProfile final : public InitialDatum::Profile {
 public:
  TableProfile(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    y2_.assign(n, 0.0);
    std::vector<double> u(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double sig = (x_[i] - x_[i - 1]) / (x_[i + 1] - x_[i - 1]);
      const double p = sig * y2_[i - 1] + 2.0;
      y2_[i] = (sig - 1.0) / p;
      u[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]) - (y_[i] - y_[i - 1]) / (x_[i] - x_[i - 1]);
      u[i] = (6.0 * u[i] / (x_[i + 1] - x_[i - 1]) - sig * u[i - 1]) / p;
    }
    for (std::size_t i = n - 1; i-- > 0;) y2_[i] = y2_[i] * y2_[i + 1] + u[i];
  }

  double value(double t) const override {
    if (t <= x_.front() || t >= x_.back()) return 0.0;
    const auto [k, h, a, b] = locate(t);
    return a * y_[k] + b * y_[k + 1] +
           ((a * a * a - a) * y2_[k] + (b * b * b - b) * y2_[k + 1]) * h * h / 6.0;
  }

  double derivative(double t, int) const override {
    if (t <= x_.front() || t >= x_.back()) return 0.0;
    const auto [k, h, a, b] = locate(t);
    return (y_[k + 1] - y_[k]) / h - (3.0 * a * a - 1.0) / 6.0 * h * y2_[k] +
           (3.0 * b * b - 1.0) / 6.0 * h * y2_[k + 1];
  }

  int max_exact_order() const override { return 1; }
  double initial_halfwidth() const override {
    return std::max(std::abs(x_.front()), std::abs(x_.back()));
  }

 private:
  struct Local {
    std::size_t k;
    double h, a, b;
  };
  Local locate(double t) const {
    const auto it = std::upper_bound(x_.begin(), x_.end(), t);
    std::size_t k = static_cast<std::size_t>(it - x_.begin());
    k = std::clamp<std::size_t>(k, 1, x_.size() - 1) - 1;
    const double h = x_[k + 1] - x_[k];
    return {k, h, (x_[k + 1] - t) / h, (t - x_[k]) / h};
  }

  std::vector<double> x_, y_, y2_;
};

constexpr double kTailTol = 1e-12;

}  // namespace

InitialDatum::InitialDatum(std::shared_ptr<const Profile> profile) : profile_(std::move(profile)) {
  if (!profile_) throw validation_error("datum: null profile");
  validate_and_locate();
}

double InitialDatum::operator()(double x) const { return profile_->value(x); }

double InitialDatum::derivative(double x, int order) const {
  if (order < 1 || order > 5) throw validation_error("datum: derivative order must be 1..5");
  if (order <= profile_->max_exact_order()) return profile_->derivative(x, order);
  return detail::fd_derivative([this](double t) { return profile_->value(t); }, x, order,
                               1e-3 * decay_);
}

void InitialDatum::validate_and_locate() {
  double S = std::max(1.0, profile_->initial_halfwidth());
  while (std::abs(profile_->value(S)) >= kTailTol || std::abs(profile_->value(-S)) >= kTailTol) {
    S *= 1.5;
    if (S > 1e4) throw validation_error("datum: profile does not decay below 1e-12");
  }
  decay_ = S;

  const std::size_t N = 8192;
  std::vector<double> xs(N + 1), us(N + 1);
  std::size_t imin = 0;
  for (std::size_t i = 0; i <= N; ++i) {
    xs[i] = -S + 2.0 * S * static_cast<double>(i) / N;
    us[i] = profile_->value(xs[i]);
    if (!std::isfinite(us[i])) throw validation_error("datum: profile is not finite");
    if (us[i] > kTailTol) throw validation_error("datum: profile takes positive values");
    if (us[i] < us[imin]) imin = i;
  }
  if (imin == 0 || imin == N || us[imin] >= -kTailTol)
    throw validation_error("datum: no interior negative minimum");

  double a = xs[imin - 1];
  double b = xs[imin + 1];
  double xm = detail::golden_max([this](double t) { return -profile_->value(t); }, a, b, 1e-13);
  auto d1 = [this](double t) { return derivative(t, 1); };
  const double da = d1(a);
  const double db = d1(b);
  if (da < 0.0 && db > 0.0)
    xm = detail::newton_bisect(d1, [this](double t) { return derivative(t, 2); }, a, b, da, db,
                               1e-14, 1e-12);
  x_min_ = xm;
  u_min_ = profile_->value(xm);
  if (std::abs(d1(x_min_)) > 1e-10)
    throw numerical_error("datum: minimum location did not converge");

  // Monotone on each side of the hump (no secondary humps above noise level).
  const double slack = 1e-9 * (1.0 + std::abs(u_min_));
  for (std::size_t i = 0; i + 1 <= N; ++i) {
    if (xs[i + 1] <= x_min_) {
      if (us[i + 1] > us[i] + slack) throw validation_error("datum: not monotone left of the minimum");
    } else if (xs[i] >= x_min_) {
      if (us[i + 1] < us[i] - slack) throw validation_error("datum: not monotone right of the minimum");
    }
  }
}

InitialDatum make_sech_datum(double amplitude) {
  if (!(amplitude > 0.0) || !std::isfinite(amplitude))
    throw validation_error("sech datum: amplitude must be positive and finite");
  return InitialDatum(std::make_shared<TanhPolyProfile>(std::vector<double>{amplitude}));
}

InitialDatum make_tanh_poly_datum(std::vector<double> q) {
  if (q.empty()) throw validation_error("tanh-poly datum: empty coefficient list");
  for (double c : q)
    if (!std::isfinite(c)) throw validation_error("tanh-poly datum: coefficients must be finite");
  return InitialDatum(std::make_shared<TanhPolyProfile>(std::move(q)));
}

InitialDatum make_table_datum(std::vector<double> x, std::vector<double> u) {
  if (x.size() != u.size() || x.size() < 8)
    throw validation_error("table datum: need at least 8 matching samples");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(u[i]))
      throw validation_error("table datum: samples must be finite");
    if (i > 0 && x[i] <= x[i - 1])
      throw validation_error("table datum: abscissae must be strictly increasing");
  }
  if (std::abs(u.front()) > 1e-8 || std::abs(u.back()) > 1e-8)
    throw validation_error("table datum: end samples must be negligible (|u| <= 1e-8)");
  return InitialDatum(std::make_shared<TableProfile>(std::move(x), std::move(u)));
}

double invert_decreasing(const InitialDatum& d, double u) {
  const double umin = d.minimum_value();
  if (!(u > umin && u < 0.0))
    throw domain_error("invert_decreasing: u must lie in (min u0, 0)");
  const double xm = d.minimum_location();
  double w = std::max(1e-3, 0.25 * d.decay_scale());
  int guard = 0;
  while (d(xm - w) <= u) {
    w *= 2.0;
    if (++guard > 60) throw numerical_error("invert_decreasing: failed to bracket");
  }
  const double xl = xm - w;
  auto f = [&](double t) { return d(t) - u; };
  return detail::newton_bisect(f, [&](double t) { return d.derivative(t, 1); }, xl, xm, f(xl),
                               umin - u, 1e-15, 5e-13);
}

double fl_derivatives(const InitialDatum& d, double u, int order) {
  if (order < 1 || order > 3) throw validation_error("fl_derivatives: order must be 1..3");
  const double xi = invert_decreasing(d, u);
  const double f1 = d.derivative(xi, 1);
  const double f2 = d.derivative(xi, 2);
  // The preimage is only resolved to ~1e-12 in u, so 1/u0' is meaningless
  // once |u0'|^2 drops below that times the curvature.
  if (std::abs(f1) < 1e-12 || f1 * f1 < 1e-9 * std::abs(f2))
    throw domain_error("fl_derivatives: u0' vanishes at the preimage; inverse derivatives singular");
  if (order == 1) return 1.0 / f1;
  if (order == 2) return -f2 / (f1 * f1 * f1);
  const double f3 = d.derivative(xi, 3);
  return (3.0 * f2 * f2 - f1 * f3) / std::pow(f1, 5);
}

}  // namespace displab::datum
