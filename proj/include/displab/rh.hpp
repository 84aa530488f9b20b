#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

#include "displab/hopf.hpp"
#include "displab/initial_data.hpp"

namespace displab::rh {

using Complex = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;

/// Constant jump matrix on a ray through the origin.  The ray sits at `angle`
/// (in (-pi, pi]) and is oriented toward the origin when `toward_node` is set,
/// away from it otherwise.  The + side of the ray is the left side of its
/// orientation.
struct RayJump {
  double angle = 0.0;
  bool toward_node = false;
  Mat2 matrix;
};

/// A fan of constant-matrix rays meeting at the origin.
struct RayFan {
  std::string label;
  std::vector<RayJump> rays;
};

/// Built-in fans:
///  - "p12": the four-ray fan (angles 0, +-6pi/7, pi) whose sectorial solution
///    is normalized with p12_phase and carries the second member of the
///    Painleve I hierarchy in its residue expansion;
///  - "p1": the four-ray fan (angles 0, +-2pi/5, pi) normalized with p1_phase,
///    attached to the tritronquee solution of Painleve I.
RayFan builtin_fan(const std::string& name);

/// Matrix factor of the sector normalization at infinity for the named fan.
Mat2 normalization_matrix(const std::string& name);

/// Walk a small counterclockwise circle around the node starting just above
/// the positive real axis.  Crossing a ray oriented away from the node
/// multiplies by its matrix, crossing one oriented toward the node multiplies
/// by the inverse.  Returns the max-norm distance from the identity of the
/// accumulated product; a consistent fan gives zero.
double cyclic_defect(const RayFan& fan);

/// Same walk, but bit i of `invert_mask` decides (1 = inverse) the exponent of
/// the i-th factor in crossing order, ignoring the stored orientations.
/// Exactly the masks reproducing the orientation rule and its bitwise
/// complement should annihilate a consistent fan.
double cyclic_defect_pattern(const RayFan& fan, unsigned invert_mask);

/// zeta^{7/2}/105 - (T/3) zeta^{3/2} + X zeta^{1/2}, principal branches.
Complex p12_phase(Complex zeta, double X, double T);

/// (4/5) zeta^{5/2} - Z zeta^{1/2}, principal branches.
Complex p1_phase(Complex zeta, double Z);

/// Jump data of an inverse-scattering problem on the continuous spectrum:
/// the reflection coefficient evolves as r(z;t) = r0(z) * evolution(z,t,eps)
/// and enters the oscillatory jump matrix through `jump`.  The position
/// argument of `jump` is the spatial variable conjugate to z (x, or y for the
/// Camassa-Holm family).  `spectral_min/max` bound the oscillatory band
/// sampled by det_defect.
struct ReflectionFamily {
  std::string label;
  double spectral_min = 0.0;
  double spectral_max = 0.0;
  std::function<Complex(double z, double t, double eps)> evolution;
  std::function<Mat2(double z, double x, double t, double eps, Complex r)> jump;
};

/// Built-in families:
///  - "kdv":              jump on lambda < 0 built from r e^{2ix(-lambda)^{1/2}/eps},
///                        constant antidiagonal swap on lambda > 0, evolution
///                        factor e^{8it(-lambda)^{3/2}/eps};
///  - "kdv_hierarchy_<m>": same jump, evolution e^{2 4^m it(-lambda)^{(2m+1)/2}/eps},
///                        1 <= m <= 6 ("kdv" is m = 1);
///  - "ch":               Camassa-Holm family on the real z-line, phases
///                        e^{-2iyz} and evolution e^{4itz/(eps(1+4z^2))};
///  - "nls_defocusing", "nls_focusing": jumps on the real z-line with phases
///                        e^{2ixz/eps} and evolution e^{4itz^2/eps}.
ReflectionFamily builtin_reflection(const std::string& name);

/// Max |det(jump) - 1| over a deterministic sweep of 200 samples spanning the
/// family's oscillatory band, a smooth decaying reflection profile, and a few
/// positions, times, and eps values.
double det_defect(const ReflectionFamily& family);

/// Phase of the reflection coefficient in the zero-dispersion regime:
/// rho(lambda) = (1/2) int_lambda^0 f_L(xi) / sqrt(xi - lambda) dxi,
/// computed from the decreasing-branch inverse f_L by dyadically graded
/// Gauss-Legendre panels (the integrand has a logarithmic endpoint
/// singularity for exponentially decaying data).  Requires
/// umin < lambda <= -1e-6.
double rho_wkb(const datum::BranchInverse& fl, double lambda);

/// i e^{-2i rho(lambda)/eps}: unimodular leading-order reflection coefficient.
Complex wkb_reflection(const datum::BranchInverse& fl, double lambda, double eps);

/// Exponent controlling the decay of the lensed jump matrices near the edge
/// point u_c of cp (which must come from find_catastrophe on fl.datum()):
///   phi(lambda; x, t) = -sqrt(u_c-lambda) F(u_c)
///                       + (2/3)(u_c-lambda)^{3/2} F'(u_c)
///                       - (4/15)(u_c-lambda)^{5/2} F''(u_c)
///                       + (4/15) int_lambda^{u_c} f_L'''(xi) (xi-lambda)^{5/2} dxi,
/// with F(xi; x, t) = -x + 6 t xi + f_L(xi).  At the catastrophe point all
/// three derivatives of F vanish and phi ~ -(8k/105)(u_c-lambda)^{7/2}; before
/// breaking, at the edge x = 6 u_c t + f_L(u_c), it degenerates to the 3/2
/// power instead.  Requires umin < lambda <= u_c.
double phi_eval(const datum::BranchInverse& fl, const hopf::CatastrophePoint& cp,
                double lambda, double x, double t);

/// Outer model solution once the oscillatory jumps have collapsed:
///   P(lambda) = (-lambda)^{1/4} diag((u_c-lambda)^{-1/4}, (u_c-lambda)^{1/4})
///               * [[1, 1], [i, -i]]
/// with principal branches.  Analytic off [u_c, +infinity); its boundary
/// values satisfy P_+ = P_- * i sigma_1 on (u_c, 0) and P_+ = P_- * sigma_1 on
/// (0, +infinity), and det P = -2i (-lambda)^{1/2}.
Mat2 global_parametrix(double u_c, Complex lambda);

/// x (-lambda)^{1/2} + 4 t (-lambda)^{3/2}, principal branches (cut on
/// lambda > 0); real-valued for real lambda < 0.
Complex alpha_phase(Complex lambda, double x, double t);

/// -z (y - 2t/(1 + 4z^2)): phase of the Camassa-Holm jump in scattering
/// coordinates.
double beta_phase(double z, double y, double t);

}  // namespace displab::rh
