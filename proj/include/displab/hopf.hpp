#pragma once

#include <span>
#include <vector>

#include "displab/initial_data.hpp"

namespace displab::hopf {

/// First breaking point of the characteristic solution of
/// u_t + 6 u u_x = 0, u(x,0) = u0(x).
struct CatastrophePoint {
  double x_c = 0.0;
  double t_c = 0.0;
  double u_c = 0.0;
  double xi_c = 0.0;
  /// k = -f_L'''(u_c): curvature constant of the branch inverse at breaking.
  double k = 0.0;
};

/// All characteristic feet xi with xi + 6 t u0(xi) = x, for t >= 0.
std::vector<double> characteristic_roots(const datum::InitialDatum& d, double x, double t);

/// u(x,t) along characteristics.  Throws multivalued_error carrying every
/// foot once several characteristics reach (x,t).
double hopf_evaluate(const datum::InitialDatum& d, double x, double t);

/// Locate the first breaking point: the steepest-descent point of u0 on the
/// decreasing branch determines t_c = 1/max(-6 u0').  With require_generic
/// set (the default) a vanishing curvature constant raises genericity_error.
CatastrophePoint find_catastrophe(const datum::InitialDatum& d, bool require_generic = true);

/// Least-squares slope of log|u(x_c + delta, t_c) - u_c| against log|delta|
/// over the given signed offsets.  Throws numerical_error when the fit is
/// poor (max log-residual above 0.05), signalling a broken scaling law.
double local_exponent(const datum::InitialDatum& d, const CatastrophePoint& cp,
                      std::span<const double> offsets);

/// F(lambda; x, t) = -x + 6 lambda t + f_L(lambda) with its first two
/// lambda-derivatives.  All three vanish simultaneously exactly at
/// (x_c, t_c, u_c).
struct ResidualTriple {
  double F;
  double dF;
  double d2F;
};
ResidualTriple critical_residual(const datum::InitialDatum& d, double x, double t, double lambda);

}  // namespace displab::hopf
