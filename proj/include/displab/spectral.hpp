#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "displab/diffpoly.hpp"
#include "displab/errors.hpp"
#include "displab/initial_data.hpp"

namespace displab::spectral {

using Complex = std::complex<double>;

/// Uniform periodic grid on [-L, L) with a power-of-two point count,
/// x_j = -L + 2 L j / n.
struct PeriodicGrid {
  double L;
  std::size_t n;

  PeriodicGrid(double L_, std::size_t n_);

  double node(std::size_t j) const {
    return -L + 2.0 * L * static_cast<double>(j) / static_cast<double>(n);
  }
  std::vector<double> nodes() const;
  /// Signed wavenumber of FFT bin j (bin n/2 is the negative Nyquist mode).
  double wavenumber(std::size_t j) const;

  bool operator==(const PeriodicGrid&) const = default;
};

/// Grid samples of a (possibly complex) field together with the dispersion
/// parameter and current time.
struct FieldState {
  PeriodicGrid grid;
  std::vector<Complex> samples;
  double eps;
  double time = 0.0;
};

FieldState make_state(const PeriodicGrid& grid, std::vector<Complex> samples, double eps,
                      double time = 0.0);
FieldState make_real_state(const PeriodicGrid& grid, std::span<const double> samples, double eps,
                           double time = 0.0);
/// Sample an initial hump onto the grid.
FieldState sample_datum(const PeriodicGrid& grid, const datum::InitialDatum& d, double eps);

std::vector<double> real_samples(const FieldState& s);

/// One evolution equation u_t = linear + nonlinear in a form the stepper
/// understands: a Fourier multiplier plus (optionally) a pointwise
/// nonlinearity assembled from spectral derivatives, or an exact nonlinear
/// phase for split-step equations.
struct EvolutionSpec {
  std::string label;
  bool complex_field = false;

  enum class Scheme { integrating_factor_rk4, split_step_strang };
  Scheme scheme = Scheme::integrating_factor_rk4;

  /// Growth rate of mode k (applied exactly).
  std::function<Complex(double k, double eps)> linear_symbol;

  /// Physical-space nonlinear term; provider(j) returns samples of the j-th
  /// x-derivative of the current field.  May be empty (purely linear flow).
  std::function<std::vector<Complex>(const std::function<const std::vector<Complex>&(int)>& provider,
                                     double eps)>
      nonlinear;

  /// Split-step only: exact pointwise solution factor of the nonlinear
  /// sub-flow over dt.
  std::function<Complex(Complex value, double dt, double eps)> nonlinear_phase;
};

/// Assemble a spec from a polynomial flow u_t = p: single-factor terms form
/// the Fourier multiplier, the remaining terms the pointwise nonlinearity.
EvolutionSpec spec_from_flow(const diffpoly::DiffPoly& flow, std::string label);

/// Built-in equations: "kdv", "kdv_hierarchy_<m>" (m = 1..6), "kawahara",
/// "gkdv_<n>" (n >= 1), "nls_focusing", "nls_defocusing".
EvolutionSpec builtin_spec(const std::string& name);

/// Fixed-step integrator bound to one grid/spec/eps/dt (owns FFT plans and
/// the cached mode exponentials).  Nonlinear products are de-aliased by the
/// 2/3 rule at every evaluation.
class Stepper {
 public:
  Stepper(const PeriodicGrid& grid, const EvolutionSpec& spec, double eps, double dt);
  ~Stepper();
  Stepper(Stepper&&) noexcept;
  Stepper& operator=(Stepper&&) noexcept;

  /// Advance by one step of size dt().  Throws blowup_error on NaN/overflow
  /// and after violating the nonlinear step-size bound dt * max|u| <= 1.
  void advance(FieldState& state);
  double dt() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Single step convenience wrapper around Stepper.
void step(FieldState& state, const EvolutionSpec& spec, double dt);

struct Snapshot {
  double time;
  std::vector<Complex> samples;
};

struct Trajectory {
  PeriodicGrid grid{1.0, 8};
  double eps = 0.0;
  std::string label;
  std::vector<Snapshot> snapshots;
};

/// Evolution failed mid-run: carries the last healthy time and the snapshots
/// collected so far.
struct blowup_error : numerical_error {
  blowup_error(const std::string& what, double t, Trajectory partial_)
      : numerical_error(what), last_valid_time(t), partial(std::move(partial_)) {}
  double last_valid_time;
  Trajectory partial;
};

/// March to t_end with fixed steps (dt is rounded down so the horizon is hit
/// exactly), recording a snapshot at t0, every snap_interval, and at t_end.
/// The observer (if any) fires at every snapshot.
Trajectory evolve(FieldState state, const EvolutionSpec& spec, double t_end, double dt,
                  double snap_interval,
                  const std::function<void(const FieldState&)>& observer = {});

/// Fourier coefficients of the state (bin layout of PeriodicGrid::wavenumber).
std::vector<Complex> spectrum(const FieldState& s);
/// Trigonometric interpolation of the real part at arbitrary x.
double interpolate_real(const FieldState& s, double x);

double mass(const FieldState& s);         // integral of Re u
double momentum(const FieldState& s);     // integral of (Re u)^2
double hamiltonian_kdv(const FieldState& s);  // integral of u^3 - eps^2 u_x^2 / 2
double nls_mass(const FieldState& s);     // integral of |psi|^2
double max_slope(const FieldState& s);    // max |d Re u / dx|

/// Smooth scalar function together with its first three derivatives, used for
/// the modulation coefficients of the Hamiltonian perturbation family.
struct ModulationFns {
  std::function<double(double)> f, d1, d2, d3;
};
ModulationFns constant_fn(double value);

/// Right-hand side of the two-parameter Hamiltonian perturbation of the
/// quasilinear hump equation:
///   u_t = -[ 6 u u_x
///            + eps^2/24 (2 c u_3x + 4 c' u_x u_2x + c'' u_x^3)
///            + eps^4  (2 p u_5x + 2 p'(5 u_2x u_3x + 3 u_x u_4x)
///                      + p''(7 u_x u_2x^2 + 6 u_x^2 u_3x) + 2 p''' u_x^3 u_2x) ]
/// with c = c(u), p = p(u).  (c, p) = (12, 0) reproduces the first flow.
std::vector<double> hampert_rhs(const FieldState& state, const ModulationFns& c,
                                const ModulationFns& p);

/// Hydrodynamic form of a complex field psi = sqrt(rho) e^{iS/eps}:
/// v = eps Im(psi_x / psi) and u = rho (defocusing) or u = -rho (focusing).
/// Throws domain_error when |psi| dips below the vacuum threshold 1e-8.
struct MadelungFields {
  std::vector<double> u_defocusing;
  std::vector<double> u_focusing;
  std::vector<double> v;
};
MadelungFields madelung(const FieldState& s);

/// Characteristic type of the hydrodynamic system at a point (u, v):
/// wave speeds v +- sqrt(u).
enum class SystemKind { hyperbolic, elliptic, degenerate };
struct Classification {
  SystemKind kind;
  Complex speed_plus;
  Complex speed_minus;
};
Classification classify_system(double u, double v);

}  // namespace displab::spectral
