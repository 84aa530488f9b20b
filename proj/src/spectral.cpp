#include "displab/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace displab::spectral {

namespace {

class Fft {
 public:
  explicit Fft(std::size_t n) : n_(n) {
    in_ = fftw_alloc_complex(n);
    out_ = fftw_alloc_complex(n);
    fwd_ = fftw_plan_dft_1d(static_cast<int>(n), in_, out_, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_1d(static_cast<int>(n), in_, out_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Fft() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(in_);
    fftw_free(out_);
  }
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  /// samples -> coefficients (normalised by 1/n)
  std::vector<Complex> forward(const std::vector<Complex>& x) {
    run(fwd_, x);
    std::vector<Complex> y(n_);
    const double s = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i) y[i] = Complex(out_[i][0] * s, out_[i][1] * s);
    return y;
  }
  /// coefficients -> samples
  std::vector<Complex> backward(const std::vector<Complex>& c) {
    run(bwd_, c);
    std::vector<Complex> y(n_);
    for (std::size_t i = 0; i < n_; ++i) y[i] = Complex(out_[i][0], out_[i][1]);
    return y;
  }

 private:
  void run(fftw_plan p, const std::vector<Complex>& x) {
    for (std::size_t i = 0; i < n_; ++i) {
      in_[i][0] = x[i].real();
      in_[i][1] = x[i].imag();
    }
    fftw_execute(p);
  }
  std::size_t n_;
  fftw_complex *in_, *out_;
  fftw_plan fwd_, bwd_;
};

Complex pow_ik(Complex ik, int j) {
  Complex acc(1.0, 0.0);
  for (int i = 0; i < j; ++i) acc *= ik;
  return acc;
}

double max_abs(const std::vector<Complex>& v) {
  double m = 0.0;
  for (const auto& z : v) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace

PeriodicGrid::PeriodicGrid(double L_, std::size_t n_) : L(L_), n(n_) {
  if (!(L > 0.0) || !std::isfinite(L)) throw validation_error("grid: L must be positive and finite");
  if (n < 8 || (n & (n - 1)) != 0)
    throw validation_error("grid: n must be a power of two, at least 8");
}

std::vector<double> PeriodicGrid::nodes() const {
  std::vector<double> xs(n);
  for (std::size_t j = 0; j < n; ++j) xs[j] = node(j);
  return xs;
}

double PeriodicGrid::wavenumber(std::size_t j) const {
  const auto half = n / 2;
  const double signed_index =
      (j < half) ? static_cast<double>(j) : static_cast<double>(j) - static_cast<double>(n);
  return M_PI / L * signed_index;
}

FieldState make_state(const PeriodicGrid& grid, std::vector<Complex> samples, double eps,
                      double time) {
  if (samples.size() != grid.n) throw validation_error("state: sample count must match the grid");
  if (!(eps > 0.0) || !std::isfinite(eps)) throw validation_error("state: eps must be positive");
  return FieldState{grid, std::move(samples), eps, time};
}

FieldState make_real_state(const PeriodicGrid& grid, std::span<const double> samples, double eps,
                           double time) {
  std::vector<Complex> z(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) z[i] = Complex(samples[i], 0.0);
  return make_state(grid, std::move(z), eps, time);
}

FieldState sample_datum(const PeriodicGrid& grid, const datum::InitialDatum& d, double eps) {
  std::vector<Complex> z(grid.n);
  for (std::size_t j = 0; j < grid.n; ++j) z[j] = Complex(d(grid.node(j)), 0.0);
  return make_state(grid, std::move(z), eps, 0.0);
}

std::vector<double> real_samples(const FieldState& s) {
  std::vector<double> r(s.samples.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = s.samples[i].real();
  return r;
}

EvolutionSpec spec_from_flow(const diffpoly::DiffPoly& flow, std::string label) {
  std::vector<diffpoly::DiffMonomial> lin_terms, nonlin_terms;
  for (const auto& t : flow.terms())
    (t.factors.size() == 1 ? lin_terms : nonlin_terms).push_back(t);

  struct LinTerm {
    double c;
    int eps_power;
    int order;
  };
  std::vector<LinTerm> lin;
  for (const auto& t : lin_terms)
    lin.push_back({t.coeff.convert_to<double>(), t.eps_power, t.factors[0]});

  EvolutionSpec spec;
  spec.label = std::move(label);
  spec.linear_symbol = [lin](double k, double eps) {
    Complex acc(0.0, 0.0);
    for (const auto& t : lin)
      acc += t.c * std::pow(eps, t.eps_power) * pow_ik(Complex(0.0, k), t.order);
    return acc;
  };
  if (!nonlin_terms.empty()) {
    auto compiled = diffpoly::compile_evaluator(diffpoly::DiffPoly::from_terms(nonlin_terms));
    spec.nonlinear = [compiled](const std::function<const std::vector<Complex>&(int)>& provider,
                                double eps) {
      const std::size_t n = provider(compiled.required_orders.front()).size();
      return compiled.evaluate<Complex>(provider, eps, n);
    };
  }
  return spec;
}

EvolutionSpec builtin_spec(const std::string& name) {
  using diffpoly::DiffPoly;
  auto suffix_int = [](const std::string& s, const std::string& prefix) -> int {
    const std::string digits = s.substr(prefix.size());
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
      throw validation_error("builtin_spec: malformed name '" + s + "'");
    return std::stoi(digits);
  };

  if (name == "kdv") return spec_from_flow(diffpoly::hierarchy_flow(1), name);
  if (name.rfind("kdv_hierarchy_", 0) == 0)
    return spec_from_flow(diffpoly::hierarchy_flow(suffix_int(name, "kdv_hierarchy_")), name);
  if (name == "kawahara")
    return spec_from_flow(diffpoly::hierarchy_flow(1) + DiffPoly::monomial(1, 4, {5}), name);
  if (name.rfind("gkdv_", 0) == 0) {
    const int p = suffix_int(name, "gkdv_");
    if (p < 1 || p > 8) throw validation_error("builtin_spec: gkdv power must lie in 1..8");
    std::vector<int> factors(static_cast<std::size_t>(p), 0);
    factors.push_back(1);
    return spec_from_flow(
        DiffPoly::monomial(-6, 0, std::move(factors)) + DiffPoly::monomial(-1, 2, {3}), name);
  }
  if (name == "nls_focusing" || name == "nls_defocusing") {
    const double sign = (name == "nls_focusing") ? 1.0 : -1.0;
    EvolutionSpec spec;
    spec.label = name;
    spec.complex_field = true;
    spec.scheme = EvolutionSpec::Scheme::split_step_strang;
    spec.linear_symbol = [](double k, double eps) { return Complex(0.0, -0.5 * eps * k * k); };
    spec.nonlinear_phase = [sign](Complex v, double dt, double eps) {
      return std::exp(Complex(0.0, sign * std::norm(v) * dt / eps));
    };
    return spec;
  }
  throw validation_error("builtin_spec: unknown equation '" + name + "'");
}

struct Stepper::Impl {
  PeriodicGrid grid;
  EvolutionSpec spec;
  double eps;
  double dt;
  Fft fft;
  std::vector<Complex> E, E2, ik;
  std::vector<char> keep;
  bool first_step = true;

  Impl(const PeriodicGrid& g, const EvolutionSpec& sp, double eps_, double dt_)
      : grid(g), spec(sp), eps(eps_), dt(dt_), fft(g.n), E(g.n), E2(g.n), ik(g.n), keep(g.n) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw validation_error("stepper: dt must be positive");
    if (!(eps > 0.0)) throw validation_error("stepper: eps must be positive");
    for (std::size_t j = 0; j < grid.n; ++j) {
      const double k = grid.wavenumber(j);
      const Complex lambda = spec.linear_symbol ? spec.linear_symbol(k, eps) : Complex(0.0, 0.0);
      E[j] = std::exp(lambda * (dt / 2.0));
      E2[j] = E[j] * E[j];
      ik[j] = Complex(0.0, k);
      const double idx = std::abs(k) * grid.L / M_PI;
      keep[j] = idx < static_cast<double>(grid.n) / 3.0 ? 1 : 0;
    }
  }

  std::vector<Complex> nonlinear_hat(const std::vector<Complex>& vhat) {
    std::map<int, std::vector<Complex>> cache;
    std::function<const std::vector<Complex>&(int)> provider =
        [&](int j) -> const std::vector<Complex>& {
      auto [it, inserted] = cache.try_emplace(j);
      if (inserted) {
        std::vector<Complex> tmp(grid.n);
        for (std::size_t m = 0; m < grid.n; ++m) tmp[m] = vhat[m] * pow_ik(ik[m], j);
        it->second = fft.backward(tmp);
      }
      return it->second;
    };
    auto nhat = fft.forward(spec.nonlinear(provider, eps));
    for (std::size_t m = 0; m < grid.n; ++m)
      if (!keep[m]) nhat[m] = Complex(0.0, 0.0);
    return nhat;
  }

  Trajectory empty_partial() const { return Trajectory{grid, eps, spec.label, {}}; }

  void advance(FieldState& s) {
    if (!(s.grid == grid) || s.samples.size() != grid.n)
      throw validation_error("stepper: state does not match the configured grid");
    const double t0 = s.time;
    const double amp = max_abs(s.samples);
    if (dt * amp > 1.0) {
      const char* msg = "stepper: step-size bound dt * max|u| <= 1 violated";
      if (first_step) throw validation_error(msg);
      throw blowup_error(msg, t0, empty_partial());
    }
    first_step = false;

    if (spec.scheme == EvolutionSpec::Scheme::split_step_strang) {
      advance_split_step(s);
    } else {
      advance_ifrk4(s);
    }
    s.time = t0 + dt;

    for (const auto& z : s.samples)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw blowup_error("stepper: solution is no longer finite", t0, empty_partial());
    if (max_abs(s.samples) > 1e8)
      throw blowup_error("stepper: solution amplitude exploded past 1e8", t0, empty_partial());
  }

  void advance_ifrk4(FieldState& s) {
    const std::size_t n = grid.n;
    auto uhat = fft.forward(s.samples);
    std::vector<Complex> out(n);
    if (!spec.nonlinear) {
      for (std::size_t m = 0; m < n; ++m) out[m] = E2[m] * uhat[m];
    } else {
      std::vector<Complex> stage(n);
      const auto k1 = nonlinear_hat(uhat);
      for (std::size_t m = 0; m < n; ++m) stage[m] = E[m] * (uhat[m] + (dt / 2.0) * k1[m]);
      const auto k2 = nonlinear_hat(stage);
      for (std::size_t m = 0; m < n; ++m) stage[m] = E[m] * uhat[m] + (dt / 2.0) * k2[m];
      const auto k3 = nonlinear_hat(stage);
      for (std::size_t m = 0; m < n; ++m) stage[m] = E2[m] * uhat[m] + dt * E[m] * k3[m];
      const auto k4 = nonlinear_hat(stage);
      for (std::size_t m = 0; m < n; ++m)
        out[m] = E2[m] * uhat[m] +
                 (dt / 6.0) * (E2[m] * k1[m] + 2.0 * E[m] * (k2[m] + k3[m]) + k4[m]);
    }
    s.samples = fft.backward(out);
  }

  void advance_split_step(FieldState& s) {
    if (!spec.nonlinear_phase)
      throw validation_error("stepper: split-step spec lacks a nonlinear phase");
    for (auto& z : s.samples) z *= spec.nonlinear_phase(z, dt / 2.0, eps);
    auto uhat = fft.forward(s.samples);
    for (std::size_t m = 0; m < grid.n; ++m) uhat[m] *= E2[m];
    s.samples = fft.backward(uhat);
    for (auto& z : s.samples) z *= spec.nonlinear_phase(z, dt / 2.0, eps);
  }
};

Stepper::Stepper(const PeriodicGrid& grid, const EvolutionSpec& spec, double eps, double dt)
    : impl_(std::make_unique<Impl>(grid, spec, eps, dt)) {}
Stepper::~Stepper() = default;
Stepper::Stepper(Stepper&&) noexcept = default;
Stepper& Stepper::operator=(Stepper&&) noexcept = default;
void Stepper::advance(FieldState& state) { impl_->advance(state); }
double Stepper::dt() const { return impl_->dt; }

void step(FieldState& state, const EvolutionSpec& spec, double dt) {
  Stepper(state.grid, spec, state.eps, dt).advance(state);
}

Trajectory evolve(FieldState state, const EvolutionSpec& spec, double t_end, double dt,
                  double snap_interval, const std::function<void(const FieldState&)>& observer) {
  if (!(dt > 0.0)) throw validation_error("evolve: dt must be positive");
  if (!(t_end >= state.time)) throw validation_error("evolve: t_end must not precede the state");

  Trajectory traj{state.grid, state.eps, spec.label, {}};
  auto record = [&](const FieldState& s) {
    traj.snapshots.push_back({s.time, s.samples});
    if (observer) observer(s);
  };

  const double T = t_end - state.time;
  const std::size_t nsteps =
      (T > 0.0) ? static_cast<std::size_t>(std::ceil(T / dt - 1e-9)) : 0;
  const double h = nsteps ? T / static_cast<double>(nsteps) : dt;
  Stepper st(state.grid, spec, state.eps, h);

  record(state);
  double next_snap =
      (snap_interval > 0.0) ? state.time + snap_interval : std::numeric_limits<double>::infinity();
  double last_ok = state.time;
  try {
    for (std::size_t i = 0; i < nsteps; ++i) {
      st.advance(state);
      last_ok = state.time;
      if (state.time >= next_snap - 0.5 * h && i + 1 < nsteps) {
        record(state);
        while (next_snap <= state.time + 0.5 * h) next_snap += snap_interval;
      }
    }
  } catch (const numerical_error& e) {
    throw blowup_error(e.what(), last_ok, std::move(traj));
  }
  if (traj.snapshots.back().time != state.time) record(state);
  return traj;
}

std::vector<Complex> spectrum(const FieldState& s) { return Fft(s.grid.n).forward(s.samples); }

double interpolate_real(const FieldState& s, double x) {
  const auto c = spectrum(s);
  Complex acc(0.0, 0.0);
  for (std::size_t m = 0; m < c.size(); ++m) {
    const double k = s.grid.wavenumber(m);
    acc += c[m] * std::exp(Complex(0.0, k * (x + s.grid.L)));
  }
  return acc.real();
}

namespace {

std::vector<std::vector<double>> real_derivatives(const FieldState& s, int max_order) {
  Fft fft(s.grid.n);
  const auto uhat = fft.forward(s.samples);
  std::vector<std::vector<double>> ders;
  for (int j = 0; j <= max_order; ++j) {
    std::vector<Complex> tmp(s.grid.n);
    for (std::size_t m = 0; m < s.grid.n; ++m)
      tmp[m] = uhat[m] * pow_ik(Complex(0.0, s.grid.wavenumber(m)), j);
    const auto phys = fft.backward(tmp);
    std::vector<double> re(s.grid.n);
    for (std::size_t i = 0; i < s.grid.n; ++i) re[i] = phys[i].real();
    ders.push_back(std::move(re));
  }
  return ders;
}

}  // namespace

double mass(const FieldState& s) {
  double acc = 0.0;
  for (const auto& z : s.samples) acc += z.real();
  return acc * 2.0 * s.grid.L / static_cast<double>(s.grid.n);
}

double momentum(const FieldState& s) {
  double acc = 0.0;
  for (const auto& z : s.samples) acc += z.real() * z.real();
  return acc * 2.0 * s.grid.L / static_cast<double>(s.grid.n);
}

double hamiltonian_kdv(const FieldState& s) {
  const auto d = real_derivatives(s, 1);
  double acc = 0.0;
  for (std::size_t i = 0; i < s.grid.n; ++i) {
    const double u = d[0][i];
    const double ux = d[1][i];
    acc += u * u * u - 0.5 * s.eps * s.eps * ux * ux;
  }
  return acc * 2.0 * s.grid.L / static_cast<double>(s.grid.n);
}

double nls_mass(const FieldState& s) {
  double acc = 0.0;
  for (const auto& z : s.samples) acc += std::norm(z);
  return acc * 2.0 * s.grid.L / static_cast<double>(s.grid.n);
}

double max_slope(const FieldState& s) {
  const auto d = real_derivatives(s, 1);
  double m = 0.0;
  for (double v : d[1]) m = std::max(m, std::abs(v));
  return m;
}

ModulationFns constant_fn(double value) {
  auto zero = [](double) { return 0.0; };
  return ModulationFns{[value](double) { return value; }, zero, zero, zero};
}

std::vector<double> hampert_rhs(const FieldState& state, const ModulationFns& c,
                                const ModulationFns& p) {
  if (!c.f || !c.d1 || !c.d2 || !p.f || !p.d1 || !p.d2 || !p.d3)
    throw validation_error("hampert_rhs: modulation functions need f, f', f'', (f''')");
  const auto d = real_derivatives(state, 5);
  const double eps2 = state.eps * state.eps;
  const double eps4 = eps2 * eps2;
  std::vector<double> out(state.grid.n);
  for (std::size_t i = 0; i < state.grid.n; ++i) {
    const double u = d[0][i], ux = d[1][i], u2 = d[2][i], u3 = d[3][i], u4 = d[4][i], u5 = d[5][i];
    const double cv = c.f(u), c1 = c.d1(u), c2 = c.d2(u);
    const double pv = p.f(u), p1 = p.d1(u), p2 = p.d2(u), p3 = p.d3(u);
    const double second = eps2 / 24.0 * (2.0 * cv * u3 + 4.0 * c1 * ux * u2 + c2 * ux * ux * ux);
    const double fourth =
        eps4 * (2.0 * pv * u5 + 2.0 * p1 * (5.0 * u2 * u3 + 3.0 * ux * u4) +
                p2 * (7.0 * ux * u2 * u2 + 6.0 * ux * ux * u3) + 2.0 * p3 * ux * ux * ux * u2);
    out[i] = -(6.0 * u * ux + second + fourth);
  }
  return out;
}

MadelungFields madelung(const FieldState& s) {
  Fft fft(s.grid.n);
  const auto uhat = fft.forward(s.samples);
  std::vector<Complex> tmp(s.grid.n);
  for (std::size_t m = 0; m < s.grid.n; ++m)
    tmp[m] = uhat[m] * Complex(0.0, s.grid.wavenumber(m));
  const auto psix = fft.backward(tmp);

  MadelungFields out;
  out.u_defocusing.resize(s.grid.n);
  out.u_focusing.resize(s.grid.n);
  out.v.resize(s.grid.n);
  for (std::size_t i = 0; i < s.grid.n; ++i) {
    const Complex psi = s.samples[i];
    if (std::abs(psi) < 1e-8)
      throw domain_error("madelung: vacuum point (|psi| < 1e-8); hydrodynamic form undefined");
    const double rho = std::norm(psi);
    out.u_defocusing[i] = rho;
    out.u_focusing[i] = -rho;
    out.v[i] = s.eps * (psix[i] / psi).imag();
  }
  return out;
}

Classification classify_system(double u, double v) {
  Classification c;
  const Complex root = std::sqrt(Complex(u, 0.0));
  c.speed_plus = v + root;
  c.speed_minus = v - root;
  if (u > 1e-12)
    c.kind = SystemKind::hyperbolic;
  else if (u < -1e-12)
    c.kind = SystemKind::elliptic;
  else
    c.kind = SystemKind::degenerate;
  return c;
}

}  // namespace displab::spectral
