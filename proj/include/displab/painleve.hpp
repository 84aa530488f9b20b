#pragma once

#include <array>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "displab/errors.hpp"

namespace displab::painleve {

using Complex = std::complex<double>;

/// Mesh and Newton controls for the fourth-order two-point solve.
struct P12Options {
  double x_max = 120.0;
  std::size_t n = 6001;
  double tol = 1e-11;
  int max_iter = 60;
};

/// Smooth solution U(X) at fixed T of the fourth-order ODE
///   X = T U - (U^3/6 + (U_X^2 + 2 U U_XX)/24 + U_XXXX/240),
/// selected by the root asymptotics U ~ -(6X)^{1/3} at both infinities.
/// Components hold U and its first three derivatives on the mesh.
struct P12Solution {
  double T = 0.0;
  std::vector<double> xs;
  std::array<std::vector<double>, 4> comp;

  /// Interpolate the deriv-th derivative (0..3) through the six nearest
  /// mesh values.  X must lie inside [-x_max, x_max].
  double evaluate(double X, int deriv = 0) const;
};

P12Solution solve_p12(double T, const P12Options& opts = {});

/// Largest Hermite-Simpson interval defect of the stored mesh solution under
/// the first-order form of the equation.  A converged solve keeps this at the
/// Newton tolerance; garbage or truncated component arrays score large.
double p12_residual(const P12Solution& sol);

/// Solve for every T in the list (internally ordered for warm starting;
/// results are returned in input order).
std::vector<P12Solution> solve_p12_family(std::span<const double> Ts,
                                          const P12Options& opts = {});

/// Three-term large-Z tail of the pole-free branch of Q'' = 6Q^2 - Z,
///   Q ~ -sqrt(Z/6) - 1/(48 Z^2) + 49 sqrt(6)/4608 Z^{-9/2},  Z > 0.
double tritronquee_series(double Z);

/// The pole-free branch on a positive interval, anchored at both ends by the
/// asymptotic tail.  Components hold Q and Q'.
struct TritronqueeSolution {
  std::vector<double> zs;
  std::vector<double> q, qp;

  double evaluate(double Z, int deriv = 0) const;
};

TritronqueeSolution solve_tritronquee(double z_left = 20.0, double z_right = 200.0,
                                      std::size_t n = 4001);

/// Adaptive Runge-Kutta continuation of Q'' = 6Q^2 - Z from (q0, qp0) at
/// z_start towards z_end.  Checkpoints are landed on exactly and can be read
/// back via index_of.  Integration stops early when a double pole is
/// detected (|Q| beyond 1e6), reporting its location from the local
/// expansion Q ~ (Z - Z_p)^{-2}.
struct MarchResult {
  std::vector<double> zs, q, qp;
  bool pole_found = false;
  double pole_location = 0.0;

  std::size_t index_of(double z) const;
};

MarchResult march_tritronquee(double q0, double qp0, double z_start, double z_end,
                              double tol = 1e-10, std::span<const double> checkpoints = {});

/// Samples of Q and Q' on the ray Z = r e^{i angle}, on the radius grid rs.
/// growth_exponent accumulates the WKB rate of the fastest-growing mode of
/// the linearization delta'' = 12 Q delta along the traversed path; marched
/// (as opposed to globally solved) trajectories can amplify seed and roundoff
/// error by up to exp(growth_exponent), so about growth_exponent / ln(10)
/// trailing digits are suspect.  The rate vanishes on the positive real axis,
/// where marching is neutrally stable.
struct RayTrajectory {
  double angle = 0.0;
  std::vector<double> rs;
  std::vector<Complex> q, qp;
  bool pole_found = false;
  Complex pole_location{0.0, 0.0};
  double growth_exponent = 0.0;
};

/// March the tail of the pole-free branch inward along Z = r e^{i angle} with
/// an embedded Dormand-Prince 5(4) pair (tolerance per unit arclength),
/// seeding from the asymptotic series at r_far.  Samples are recorded on the
/// uniform radius grid {r_far, r_far - record_step, ...} down to r_near.
/// A negative r_near continues through the origin onto the opposite ray,
/// which is how the first pole of the negative-axis continuation is found.
/// Marching stops early at a double pole (|Q| beyond 1e6), located from the
/// Laurent behavior Q ~ (Z - Z_p)^{-2}.  Check growth_exponent before
/// trusting values far off the positive real axis.
RayTrajectory march_tritronquee_ray(double angle, double r_far = 100.0, double r_near = 1.0,
                                    double record_step = 0.05, double tol = 1e-10);

/// The pole-free branch along the ray segment [r_near, r_far] e^{i angle},
/// solved as a two-point problem with the asymptotic tail imposed at both
/// ends.  Unlike marching, the global solve stays well conditioned across the
/// whole pole-free sector.  Off the axis, the (there inaccurate) tail datum
/// at a small r_near is felt only in a boundary layer next to r_near; on and
/// near the axis the linearized modes oscillate without decay, so small
/// angles need r_near at tail-accurate radii (20 or beyond).
RayTrajectory solve_tritronquee_ray(double angle, double r_near = 20.0, double r_far = 100.0,
                                    std::size_t n = 4001);

}  // namespace displab::painleve
