#pragma once

#include <memory>
#include <vector>

#include "displab/errors.hpp"

namespace displab::datum {

/// Smooth, rapidly decaying profile u0 with a single negative hump: u0 <= 0
/// everywhere (zero only in the tails), one interior minimum, monotone on
/// each side of it.  Construction validates these properties and precomputes
/// the minimum and a decay scale S with |u0| < 1e-12 outside [-S, S].
class InitialDatum {
 public:
  struct Profile {
    virtual ~Profile() = default;
    virtual double value(double x) const = 0;
    /// Exact derivative, available for 1 <= order <= max_exact_order().
    virtual double derivative(double x, int order) const = 0;
    virtual int max_exact_order() const = 0;
    /// Starting half-width for the decay scan.
    virtual double initial_halfwidth() const = 0;
  };

  explicit InitialDatum(std::shared_ptr<const Profile> profile);

  double operator()(double x) const;
  /// d^order u0 / dx^order, 1 <= order <= 5.  Orders beyond the profile's
  /// closed forms use 8th-order central differences with step
  /// 1e-3 * decay_scale().
  double derivative(double x, int order) const;

  double minimum_location() const { return x_min_; }
  double minimum_value() const { return u_min_; }
  double decay_scale() const { return decay_; }

 private:
  void validate_and_locate();

  std::shared_ptr<const Profile> profile_;
  double x_min_ = 0.0;
  double u_min_ = 0.0;
  double decay_ = 0.0;
};

/// u0(x) = -A sech^2(x), A > 0.
InitialDatum make_sech_datum(double amplitude);

/// u0(x) = -(1 - s^2) q(s) with s = tanh(x), where q(s) = q0 + q1 s + ... .
/// All derivatives are closed-form polynomials in s.
InitialDatum make_tanh_poly_datum(std::vector<double> q);

/// Profile interpolating the samples (x_i, u_i) with a natural cubic spline;
/// u0 is taken to vanish outside the sampled range, so the end samples must
/// already be negligible.
InitialDatum make_table_datum(std::vector<double> x, std::vector<double> u);

/// xi < minimum_location() with u0(xi) = u, resolved to |u0(xi) - u| < 1e-12.
/// Requires u in (minimum_value(), 0).
double invert_decreasing(const InitialDatum& d, double u);

/// Derivative of the decreasing-branch inverse f_L at u, order 1..3, from the
/// inverse-function identities evaluated at xi = invert_decreasing(d, u).
/// Throws domain_error when u0'(xi) is too small for the identities to hold
/// (u at the bottom of the hump).
double fl_derivatives(const InitialDatum& d, double u, int order);

/// The decreasing-branch inverse f_L packaged as an object: value(u) is the
/// abscissa with u0(value(u)) = u, defined for u in (umin(), 0), together
/// with its first three derivatives.
class BranchInverse {
 public:
  explicit BranchInverse(InitialDatum d) : datum_(std::move(d)) {}

  double umin() const { return datum_.minimum_value(); }
  double value(double u) const { return invert_decreasing(datum_, u); }
  double derivative(double u, int order) const { return fl_derivatives(datum_, u, order); }
  const InitialDatum& datum() const { return datum_; }

 private:
  InitialDatum datum_;
};

}  // namespace displab::datum
