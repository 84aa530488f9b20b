#pragma once

#include <cstddef>
#include <vector>

#include "displab/hopf.hpp"
#include "displab/initial_data.hpp"
#include "displab/painleve.hpp"
#include "displab/spectral.hpp"

namespace displab::universality {

/// Constants of the double-scaling ansatz near a gradient catastrophe,
///   u(x, t) ~ u_c + c1 eps^{2/7} U(X, T),
///   X = c2 (x - x_c - c3 (t - t_c)) / eps^{6/7},
///   T = c4 (t - t_c) / eps^{4/7},
/// fixed by the curvature constant k of the breaking point:
///   c1 = 2 (8k)^{-2/7},  c2 = (8k)^{-1/7},  c3 = 6 u_c,  c4 = 12 (8k)^{-3/7}.
/// With these choices the ansatz maps u_t + 6 u u_x + eps^2 u_xxx = 0 onto
/// U_T + U U_X + U_XXX / 12 = 0 at leading order.
struct ScalingConstants {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double c4 = 0.0;
};

/// Throws genericity_error when cp.k <= 0 (degenerate breaking).
ScalingConstants compute_constants(const hopf::CatastrophePoint& cp);

struct DoubleScaledCoords {
  double X = 0.0;
  double T = 0.0;
};

DoubleScaledCoords double_scaling_coords(const hopf::CatastrophePoint& cp,
                                         const ScalingConstants& sc, double x, double t,
                                         double eps);

/// U(X, T) evaluator built from boundary-value solves at n_t uniformly spaced
/// T-nodes on [-t_span, t_span], combined by six-point (quintic) polynomial
/// interpolation in T.  Requires n_t >= 6.
class UFamily {
 public:
  UFamily(double t_span, int n_t, const painleve::P12Options& opts = {});

  /// deriv in 0..3 differentiates in X; T must lie within the node span.
  double evaluate(double X, double T, int deriv = 0) const;

  double t_span() const { return ts_.back(); }
  const std::vector<double>& nodes() const { return ts_; }

 private:
  std::vector<double> ts_;
  std::vector<painleve::P12Solution> members_;
};

/// u_c + c1 eps^{2/7} U(X(x, t), T(t)).
double predict(const hopf::CatastrophePoint& cp, const ScalingConstants& sc,
               const UFamily& fam, double x, double t, double eps);

struct SweepOptions {
  std::vector<double> eps{0.1, 0.07, 0.05};
  double L = 24.0;
  std::size_t n = 8192;
  double dt = 5e-6;
  double snap_interval = 0.01;
  /// Evolve without recording until t_c - pre_offset, record snapshots until
  /// t_c + post_offset.  Both must be multiples of snap_interval so that the
  /// snapshot grid hits t_c and the control time exactly.
  double pre_offset = 0.15;
  double post_offset = 0.15;
  /// The dispersionless control comparison runs at t_c - control_offset, on
  /// x in [edge + control_offset_lo, edge + control_offset_hi] where edge is
  /// the steepening characteristic 6 u_c t + xi_c.  The band must sit clear
  /// of the edge: approaching it, the O(eps^2) error constant blows up.
  double control_offset = 0.05;
  double control_offset_lo = 0.5;
  double control_offset_hi = 2.0;
  int control_samples = 25;
  double window_X = 1.0;
  double window_T = 1.0;
  int window_samples = 41;
};

/// One comparison point of the t = t_c profile, kept for plot overlays.
struct OverlaySample {
  double x = 0.0;
  double numeric = 0.0;
  double predicted = 0.0;
};

struct EpsMeasurement {
  double eps = 0.0;
  /// |u(x_c, t_c) - u_c|: should scale like eps^{2/7}.
  double amplitude = 0.0;
  /// max |u - prediction| over |X| <= window_X, |T| <= window_T: the ansatz
  /// correction term, expected to scale like eps^{4/7}.
  double window_error = 0.0;
  /// Root-mean-square of u - prediction over the same window samples.
  double window_rms = 0.0;
  /// max |u - characteristic solution| over the smooth band ahead of the
  /// steepening edge at t_c - control_offset, expected to scale like eps^2.
  double control_error = 0.0;
  std::size_t window_count = 0;
  /// The t = t_c slice across |X| <= window_X, window_samples points.
  std::vector<OverlaySample> overlay;
};

struct SweepResult {
  hopf::CatastrophePoint cp;
  ScalingConstants constants;
  std::vector<EpsMeasurement> runs;
  /// Log-log slopes fitted across the eps values.
  double amplitude_rate = 0.0;
  double correction_rate = 0.0;
  double control_rate = 0.0;
};

/// Evolve the datum through its gradient catastrophe for every eps in
/// opts.eps and measure how well the double-scaling ansatz captures the
/// solution.  fam must span at least window_T.
SweepResult run_universality_sweep(const datum::InitialDatum& d, const UFamily& fam,
                                   const SweepOptions& opts = {});

}  // namespace displab::universality
