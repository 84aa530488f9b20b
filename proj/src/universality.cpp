#include "displab/universality.hpp"

#include <algorithm>
#include <cmath>
#include <span>

#include "displab/detail/fit.hpp"
#include "displab/detail/fornberg.hpp"
#include "displab/errors.hpp"

namespace displab::universality {

namespace {

constexpr double kTwoSevenths = 2.0 / 7.0;
constexpr double kFourSevenths = 4.0 / 7.0;
constexpr double kSixSevenths = 6.0 / 7.0;

bool near_multiple(double value, double unit) {
  const double q = value / unit;
  return std::abs(q - std::round(q)) < 1e-9;
}

const spectral::Snapshot& snapshot_at(const spectral::Trajectory& traj, double time,
                                      double slack) {
  for (const spectral::Snapshot& snap : traj.snapshots)
    if (std::abs(snap.time - time) <= slack) return snap;
  throw numerical_error("universality sweep: no snapshot near the requested time");
}

}  // namespace

ScalingConstants compute_constants(const hopf::CatastrophePoint& cp) {
  if (!(cp.k > 0.0) || !std::isfinite(cp.k))
    throw genericity_error("scaling constants: curvature constant k must be positive");
  const double base = 8.0 * cp.k;
  ScalingConstants sc;
  sc.c1 = 2.0 * std::pow(base, -kTwoSevenths);
  sc.c2 = std::pow(base, -1.0 / 7.0);
  sc.c3 = 6.0 * cp.u_c;
  sc.c4 = 12.0 * std::pow(base, -3.0 / 7.0);
  return sc;
}

DoubleScaledCoords double_scaling_coords(const hopf::CatastrophePoint& cp,
                                         const ScalingConstants& sc, double x, double t,
                                         double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps))
    throw validation_error("double_scaling_coords: eps must be positive");
  DoubleScaledCoords out;
  out.X = sc.c2 * (x - cp.x_c - sc.c3 * (t - cp.t_c)) / std::pow(eps, kSixSevenths);
  out.T = sc.c4 * (t - cp.t_c) / std::pow(eps, kFourSevenths);
  return out;
}

UFamily::UFamily(double t_span, int n_t, const painleve::P12Options& opts) {
  if (!(t_span > 0.0) || !std::isfinite(t_span))
    throw validation_error("UFamily: t_span must be positive");
  if (n_t < 6) throw validation_error("UFamily: need at least six T nodes");
  ts_.resize(n_t);
  for (int i = 0; i < n_t; ++i)
    ts_[i] = -t_span + 2.0 * t_span * i / (n_t - 1.0);
  ts_.back() = t_span;
  members_ = painleve::solve_p12_family(ts_, opts);
}

double UFamily::evaluate(double X, double T, int deriv) const {
  if (!std::isfinite(T) || T < ts_.front() || T > ts_.back())
    throw domain_error("UFamily: T outside the node span");
  const double h = ts_[1] - ts_[0];
  const auto n = ts_.size();
  std::size_t idx = static_cast<std::size_t>(std::max(0.0, (T - ts_.front()) / h));
  idx = std::min(idx, n - 1);
  const std::size_t i0 = std::min(n - 6, idx >= 2 ? idx - 2 : 0);
  const auto weights =
      detail::fd_weights(T, std::span<const double>(ts_).subspan(i0, 6), 0);
  double acc = 0.0;
  for (std::size_t j = 0; j < 6; ++j)
    acc += weights[j] * members_[i0 + j].evaluate(X, deriv);
  return acc;
}

double predict(const hopf::CatastrophePoint& cp, const ScalingConstants& sc,
               const UFamily& fam, double x, double t, double eps) {
  const DoubleScaledCoords c = double_scaling_coords(cp, sc, x, t, eps);
  return cp.u_c + sc.c1 * std::pow(eps, kTwoSevenths) * fam.evaluate(c.X, c.T);
}

SweepResult run_universality_sweep(const datum::InitialDatum& d, const UFamily& fam,
                                   const SweepOptions& opts) {
  if (opts.eps.size() < 2)
    throw validation_error("universality sweep: need at least two eps values");
  for (double e : opts.eps)
    if (!(e > 0.0) || !(e < 1.0)) throw validation_error("universality sweep: eps must lie in (0,1)");
  if (!(opts.snap_interval > 0.0))
    throw validation_error("universality sweep: snap_interval must be positive");
  if (!near_multiple(opts.pre_offset, opts.snap_interval) ||
      !near_multiple(opts.post_offset, opts.snap_interval) ||
      !near_multiple(opts.control_offset, opts.snap_interval))
    throw validation_error(
        "universality sweep: offsets must be multiples of snap_interval");
  if (!(opts.control_offset < opts.pre_offset))
    throw validation_error("universality sweep: control time precedes the recording span");
  if (!(opts.window_T <= fam.t_span()))
    throw validation_error("universality sweep: U family does not span window_T");
  if (opts.window_samples < 2 || opts.control_samples < 2)
    throw validation_error("universality sweep: need at least two sample points");
  if (!(opts.control_offset_lo > 0.0) || !(opts.control_offset_hi > opts.control_offset_lo))
    throw validation_error("universality sweep: control band must sit ahead of the edge");

  SweepResult result;
  result.cp = hopf::find_catastrophe(d);
  result.constants = compute_constants(result.cp);
  const hopf::CatastrophePoint& cp = result.cp;
  const ScalingConstants& sc = result.constants;

  const double t_window_max =
      opts.window_T * std::pow(*std::max_element(opts.eps.begin(), opts.eps.end()),
                               kFourSevenths) /
      sc.c4;
  if (t_window_max > std::min(opts.pre_offset, opts.post_offset) + 1e-12)
    throw validation_error(
        "universality sweep: recording span does not cover the |T| <= window_T band");

  const spectral::PeriodicGrid grid{opts.L, opts.n};
  const spectral::EvolutionSpec spec = spectral::builtin_spec("kdv");
  const double xi_c = cp.xi_c;

  for (double eps : opts.eps) {
    EpsMeasurement m;
    m.eps = eps;

    spectral::FieldState initial = spectral::sample_datum(grid, d, eps);
    const double t_record = cp.t_c - opts.pre_offset;
    const spectral::Trajectory lead =
        spectral::evolve(std::move(initial), spec, t_record, opts.dt, 0.0);
    const spectral::Snapshot& handoff = lead.snapshots.back();
    spectral::FieldState resumed =
        spectral::make_state(grid, handoff.samples, eps, handoff.time);
    const spectral::Trajectory traj = spectral::evolve(
        std::move(resumed), spec, cp.t_c + opts.post_offset, opts.dt, opts.snap_interval);
    const double slack = 0.25 * opts.snap_interval;

    {
      const double t_ctl = cp.t_c - opts.control_offset;
      const spectral::Snapshot& snap = snapshot_at(traj, t_ctl, slack);
      const spectral::FieldState s = spectral::make_state(grid, snap.samples, eps, snap.time);
      const double x_edge = 6.0 * cp.u_c * snap.time + xi_c;
      for (int j = 0; j < opts.control_samples; ++j) {
        const double x = x_edge + opts.control_offset_lo +
                         (opts.control_offset_hi - opts.control_offset_lo) * j /
                             (opts.control_samples - 1.0);
        const double err =
            std::abs(spectral::interpolate_real(s, x) - hopf::hopf_evaluate(d, x, snap.time));
        m.control_error = std::max(m.control_error, err);
      }
    }

    const double x_scale = std::pow(eps, kSixSevenths) / sc.c2;

    {
      const spectral::Snapshot& snap = snapshot_at(traj, cp.t_c, slack);
      const spectral::FieldState s = spectral::make_state(grid, snap.samples, eps, snap.time);
      m.amplitude = std::abs(spectral::interpolate_real(s, cp.x_c) - cp.u_c);
      const double x_center = cp.x_c + sc.c3 * (snap.time - cp.t_c);
      m.overlay.reserve(opts.window_samples);
      for (int j = 0; j < opts.window_samples; ++j) {
        const double X = -opts.window_X + 2.0 * opts.window_X * j / (opts.window_samples - 1.0);
        const double x = x_center + X * x_scale;
        m.overlay.push_back({x, spectral::interpolate_real(s, x),
                             predict(cp, sc, fam, x, snap.time, eps)});
      }
    }

    double sq_sum = 0.0;
    std::size_t sq_count = 0;
    for (const spectral::Snapshot& snap : traj.snapshots) {
      const double T = sc.c4 * (snap.time - cp.t_c) / std::pow(eps, kFourSevenths);
      if (std::abs(T) > opts.window_T) continue;
      const spectral::FieldState s = spectral::make_state(grid, snap.samples, eps, snap.time);
      const double x_center = cp.x_c + sc.c3 * (snap.time - cp.t_c);
      for (int j = 0; j < opts.window_samples; ++j) {
        const double X = -opts.window_X + 2.0 * opts.window_X * j / (opts.window_samples - 1.0);
        const double x = x_center + X * x_scale;
        const double err = std::abs(spectral::interpolate_real(s, x) -
                                    predict(cp, sc, fam, x, snap.time, eps));
        m.window_error = std::max(m.window_error, err);
        sq_sum += err * err;
        ++sq_count;
      }
      ++m.window_count;
    }
    if (m.window_count == 0)
      throw numerical_error("universality sweep: no snapshots landed in the T window");
    m.window_rms = std::sqrt(sq_sum / static_cast<double>(sq_count));

    result.runs.push_back(m);
  }

  std::vector<double> log_eps, log_amp, log_win, log_ctl;
  for (const EpsMeasurement& m : result.runs) {
    log_eps.push_back(std::log(m.eps));
    log_amp.push_back(std::log(m.amplitude));
    log_win.push_back(std::log(m.window_error));
    log_ctl.push_back(std::log(m.control_error));
  }
  result.amplitude_rate = detail::fit_line(log_eps, log_amp).slope;
  result.correction_rate = detail::fit_line(log_eps, log_win).slope;
  result.control_rate = detail::fit_line(log_eps, log_ctl).slope;
  return result;
}

}  // namespace displab::universality
