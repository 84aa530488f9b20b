#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "displab/diffpoly.hpp"
#include "displab/errors.hpp"
#include "displab/hopf.hpp"
#include "displab/initial_data.hpp"
#include "displab/painleve.hpp"
#include "displab/rh.hpp"
#include "displab/spectral.hpp"
#include "displab/universality.hpp"

namespace displab::cli {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string format_double(double v) {
  std::array<char, 32> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string utc_stamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

double parse_number(const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw validation_error("not a number: '" + text + "'");
  }
  if (used != text.size()) throw validation_error("trailing junk in number: '" + text + "'");
  return v;
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item));
  if (out.empty()) throw validation_error("empty number list");
  return out;
}

/// Collects output files in memory and writes them all at once, so a failed
/// computation leaves no partial run directory behind.
class RunWriter {
 public:
  RunWriter(std::string command, fs::path outdir, std::string label)
      : command_(std::move(command)),
        label_(label.empty() ? utc_stamp() : std::move(label)),
        dir_(std::move(outdir) / command_ / label_),
        start_(std::chrono::steady_clock::now()) {}

  void stage(std::string name, std::string content) {
    files_.emplace_back(std::move(name), std::move(content));
  }

  ordered_json& config() { return config_; }
  ordered_json& diagnostics() { return diagnostics_; }

  fs::path commit() {
    ordered_json manifest;
    manifest["tool"] = "displab";
    manifest["version"] = "0.1.0";
    manifest["command"] = command_;
    manifest["label"] = label_;
    manifest["config"] = config_;
    manifest["diagnostics"] = diagnostics_;
    manifest["timestamp"] = utc_stamp();
    manifest["wall_time_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    files_.emplace_back("manifest.json", manifest.dump(2) + "\n");

    fs::create_directories(dir_);
    for (const auto& [name, content] : files_) {
      std::ofstream f(dir_ / name, std::ios::binary | std::ios::trunc);
      f << content;
      if (!f) throw numerical_error("failed to write " + (dir_ / name).string());
    }
    std::cerr << "wrote " << files_.size() << " files to " << dir_.string() << "\n";
    return dir_;
  }

 private:
  std::string command_;
  std::string label_;
  fs::path dir_;
  std::chrono::steady_clock::time_point start_;
  ordered_json config_ = ordered_json::object();
  ordered_json diagnostics_ = ordered_json::object();
  std::vector<std::pair<std::string, std::string>> files_;
};

void reject_unknown_keys(const ordered_json& j, std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw validation_error("datum config: unknown key '" + key + "'");
  }
}

/// Accepts the shorthands sech2:<amplitude> and tanh_poly:<q0,q1,...> or the
/// path of a JSON file {"kind": ...}; bare file names are also looked up in
/// $DISPLAB_CONFIG_DIR.
datum::InitialDatum load_datum(const std::string& spec) {
  if (spec.rfind("sech2:", 0) == 0)
    return datum::make_sech_datum(parse_number(spec.substr(6)));
  if (spec.rfind("tanh_poly:", 0) == 0)
    return datum::make_tanh_poly_datum(parse_number_list(spec.substr(10)));

  fs::path path = spec;
  if (!fs::exists(path)) {
    if (const char* dir = std::getenv("DISPLAB_CONFIG_DIR")) {
      const fs::path alt = fs::path(dir) / spec;
      if (fs::exists(alt)) path = alt;
    }
  }
  if (!fs::exists(path))
    throw validation_error("datum: '" + spec +
                           "' is neither a sech2:/tanh_poly: shorthand nor a config file");

  std::ifstream f(path);
  ordered_json j;
  try {
    j = ordered_json::parse(f);
  } catch (const std::exception& e) {
    throw validation_error("datum config " + path.string() + ": " + e.what());
  }
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "sech2") {
    reject_unknown_keys(j, {"kind", "amplitude"});
    return datum::make_sech_datum(j.at("amplitude").get<double>());
  }
  if (kind == "tanh_poly") {
    reject_unknown_keys(j, {"kind", "q"});
    return datum::make_tanh_poly_datum(j.at("q").get<std::vector<double>>());
  }
  if (kind == "table") {
    reject_unknown_keys(j, {"kind", "x", "u"});
    return datum::make_table_datum(j.at("x").get<std::vector<double>>(),
                                   j.at("u").get<std::vector<double>>());
  }
  throw validation_error("datum config: unknown kind '" + kind + "'");
}

struct GlobalOptions {
  std::string outdir = "runs";
  std::string label;
};

// ---------------------------------------------------------------------------

struct HopfOptions {
  std::string datum;
  double t = 0.0;
  double xmin = -8.0;
  double xmax = 8.0;
  std::size_t n = 1001;
};

int run_hopf(const GlobalOptions& g, const HopfOptions& o) {
  if (!(o.xmax > o.xmin)) throw validation_error("hopf: need xmin < xmax");
  if (o.n < 2) throw validation_error("hopf: need at least two grid points");
  const auto d = load_datum(o.datum);

  RunWriter w("hopf", g.outdir, g.label);
  w.config() = ordered_json{
      {"datum", o.datum}, {"t", o.t}, {"xmin", o.xmin}, {"xmax", o.xmax}, {"n", o.n}};

  std::string csv = "x,u\n";
  for (std::size_t i = 0; i < o.n; ++i) {
    const double x =
        o.xmin + (o.xmax - o.xmin) * static_cast<double>(i) / static_cast<double>(o.n - 1);
    csv += format_double(x) + "," + format_double(hopf::hopf_evaluate(d, x, o.t)) + "\n";
  }
  w.stage("profile.csv", std::move(csv));
  w.commit();
  return 0;
}

// ---------------------------------------------------------------------------

struct CatastropheOptions {
  std::string datum;
};

int run_catastrophe(const GlobalOptions& g, const CatastropheOptions& o) {
  const auto d = load_datum(o.datum);
  const auto cp = hopf::find_catastrophe(d);

  RunWriter w("catastrophe", g.outdir, g.label);
  w.config() = ordered_json{{"datum", o.datum}};
  const ordered_json report{
      {"x_c", cp.x_c}, {"t_c", cp.t_c}, {"u_c", cp.u_c}, {"xi_c", cp.xi_c}, {"k", cp.k}};
  w.stage("catastrophe.json", report.dump(2) + "\n");
  w.diagnostics() = report;
  w.commit();
  std::cout << report.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct HierarchyOptions {
  int m = 1;
};

ordered_json terms_to_json(const diffpoly::DiffPoly& p) {
  ordered_json arr = ordered_json::array();
  for (const auto& term : p.terms()) {
    std::ostringstream coeff;
    coeff << term.coeff;
    arr.push_back(ordered_json{
        {"coeff", coeff.str()}, {"eps_power", term.eps_power}, {"factors", term.factors}});
  }
  return arr;
}

int run_hierarchy(const GlobalOptions& g, const HierarchyOptions& o) {
  if (o.m < 1 || o.m > 6) throw validation_error("hierarchy: m must lie in 1..6");
  const auto lenard = diffpoly::lenard(o.m);
  const auto flow = diffpoly::hierarchy_flow(o.m);

  const std::string text = "L_" + std::to_string(o.m) + " = " + diffpoly::to_text(lenard) +
                           "\nu_t = " + diffpoly::to_text(flow) + "\n";

  RunWriter w("hierarchy", g.outdir, g.label);
  w.config() = ordered_json{{"m", o.m}};
  w.stage("flow.txt", text);
  const ordered_json terms{
      {"m", o.m}, {"lenard", terms_to_json(lenard)}, {"flow", terms_to_json(flow)}};
  w.stage("terms.json", terms.dump(2) + "\n");
  w.commit();
  std::cout << text;
  return 0;
}

// ---------------------------------------------------------------------------

struct EvolveOptions {
  std::string eq = "kdv";
  std::string datum;
  double eps = 0.1;
  double L = 20.0;
  std::size_t n = 4096;
  double dt = 1e-5;
  double t_end = 0.25;
  double snap = 0.01;
};

int run_evolve(const GlobalOptions& g, const EvolveOptions& o) {
  if (!(o.eps > 0.0)) throw validation_error("evolve: eps must be positive");
  if (!(o.dt > 0.0) || !(o.t_end > 0.0) || !(o.snap > 0.0))
    throw validation_error("evolve: dt, t-end, snap must be positive");
  const auto d = load_datum(o.datum);
  const auto spec = spectral::builtin_spec(o.eq);
  const spectral::PeriodicGrid grid(o.L, o.n);

  if (std::abs(d(-o.L)) > 1e-8 || std::abs(d(o.L)) > 1e-8)
    std::cerr << "warning: |u0| = " << std::max(std::abs(d(-o.L)), std::abs(d(o.L)))
              << " at the domain edge; periodic wrap-around will pollute the run\n";

  auto state = spectral::sample_datum(grid, d, o.eps);

  std::vector<double> times, masses, momenta, hams;
  const bool track_ham = o.eq == "kdv";
  auto observer = [&](const spectral::FieldState& s) {
    times.push_back(s.time);
    if (spec.complex_field) {
      masses.push_back(spectral::nls_mass(s));
    } else {
      masses.push_back(spectral::mass(s));
      momenta.push_back(spectral::momentum(s));
      if (track_ham) hams.push_back(spectral::hamiltonian_kdv(s));
    }
  };

  RunWriter w("evolve", g.outdir, g.label);
  w.config() = ordered_json{{"eq", o.eq}, {"datum", o.datum}, {"eps", o.eps}, {"L", o.L},
                            {"n", o.n},   {"dt", o.dt},       {"t_end", o.t_end},
                            {"snap", o.snap}};

  spectral::Trajectory traj;
  std::string failure;
  try {
    traj = spectral::evolve(std::move(state), spec, o.t_end, o.dt, o.snap, observer);
  } catch (const spectral::blowup_error& e) {
    traj = e.partial;
    failure = e.what();
    w.diagnostics()["status"] = "blowup";
    w.diagnostics()["last_valid_time"] = e.last_valid_time;
  }
  if (failure.empty()) w.diagnostics()["status"] = "completed";

  ordered_json index = ordered_json::array();
  for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
    char name[32];
    std::snprintf(name, sizeof name, "snap_%04zu.csv", s);
    std::string csv = spec.complex_field ? "x,re,im\n" : "x,u\n";
    for (std::size_t j = 0; j < traj.grid.n; ++j) {
      const auto& v = traj.snapshots[s].samples[j];
      csv += format_double(traj.grid.node(j));
      if (spec.complex_field)
        csv += "," + format_double(v.real()) + "," + format_double(v.imag()) + "\n";
      else
        csv += "," + format_double(v.real()) + "\n";
    }
    w.stage(name, std::move(csv));
    index.push_back(ordered_json{{"file", name}, {"time", traj.snapshots[s].time}});
  }
  w.diagnostics()["snapshots"] = std::move(index);

  ordered_json conserved;
  conserved["time"] = times;
  auto drift = [](const std::vector<double>& s) {
    if (s.size() < 2) return 0.0;
    const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
    return (*hi - *lo) / std::max(1e-300, std::abs(s.front()));
  };
  if (spec.complex_field) {
    conserved["nls_mass"] = masses;
    w.diagnostics()["nls_mass_drift"] = drift(masses);
  } else {
    conserved["mass"] = masses;
    conserved["momentum"] = momenta;
    w.diagnostics()["mass_drift"] = drift(masses);
    w.diagnostics()["momentum_drift"] = drift(momenta);
    if (track_ham) {
      conserved["hamiltonian"] = hams;
      w.diagnostics()["hamiltonian_drift"] = drift(hams);
    }
  }
  w.diagnostics()["conserved"] = std::move(conserved);

  w.commit();
  if (!failure.empty()) {
    std::cerr << "error: " << failure << "\n";
    return 3;
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct PainleveUOptions {
  double T = 0.0;
  double xmax = 120.0;
  std::size_t n = 6001;
};

int run_painleve_u(const GlobalOptions& g, const PainleveUOptions& o) {
  painleve::P12Options opts;
  opts.x_max = o.xmax;
  opts.n = o.n;
  const auto sol = painleve::solve_p12(o.T, opts);

  RunWriter w("painleve-u", g.outdir, g.label);
  w.config() = ordered_json{{"T", o.T}, {"xmax", o.xmax}, {"n", o.n}};

  std::string csv = "X,U\n";
  for (std::size_t i = 0; i < sol.xs.size(); ++i)
    csv += format_double(sol.xs[i]) + "," + format_double(sol.comp[0][i]) + "\n";
  w.stage("solution.csv", std::move(csv));

  const double asym = std::cbrt(6.0 * o.xmax);
  const double edge_gap = std::max(std::abs(sol.comp[0].front() - asym),
                                   std::abs(sol.comp[0].back() + asym));
  const ordered_json diag{{"T", o.T},
                          {"x_max", o.xmax},
                          {"n", o.n},
                          {"max_defect", painleve::p12_residual(sol)},
                          {"edge_gap", edge_gap}};
  w.stage("diagnostics.json", diag.dump(2) + "\n");
  w.diagnostics() = diag;
  w.commit();
  std::cout << diag.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct PainleveQOptions {
  double angle = 0.0;
  double zfar = 100.0;
  double znear = 1.0;
  double record_step = 0.05;
  double tol = 1e-10;
};

int run_painleve_q(const GlobalOptions& g, const PainleveQOptions& o) {
  const auto traj =
      painleve::march_tritronquee_ray(o.angle, o.zfar, o.znear, o.record_step, o.tol);

  RunWriter w("painleve-q", g.outdir, g.label);
  w.config() = ordered_json{{"ray_angle", o.angle},
                            {"zfar", o.zfar},
                            {"znear", o.znear},
                            {"record_step", o.record_step},
                            {"tol", o.tol}};

  const double ca = std::cos(o.angle), sa = std::sin(o.angle);
  std::string csv = "re_z,im_z,re_q,im_q\n";
  for (std::size_t i = 0; i < traj.rs.size(); ++i)
    csv += format_double(traj.rs[i] * ca) + "," + format_double(traj.rs[i] * sa) + "," +
           format_double(traj.q[i].real()) + "," + format_double(traj.q[i].imag()) + "\n";
  w.stage("trajectory.csv", std::move(csv));

  ordered_json poles = ordered_json::array();
  if (traj.pole_found)
    poles.push_back(ordered_json{{"re", traj.pole_location.real()},
                                 {"im", traj.pole_location.imag()}});
  const ordered_json report{{"ray_angle", o.angle},
                            {"growth_exponent", traj.growth_exponent},
                            {"suspect_digits", traj.growth_exponent / std::log(10.0)},
                            {"pole_found", traj.pole_found},
                            {"poles", poles}};
  w.stage("poles.json", report.dump(2) + "\n");
  w.diagnostics() = report;

  if (traj.growth_exponent > 23.0)
    std::cerr << "warning: marched values on this ray amplify seed error by exp("
              << format_double(traj.growth_exponent)
              << "); treat them as qualitative\n";

  w.commit();
  std::cout << report.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct RhCheckOptions {
  std::string problem;
};

int run_rh_check(const GlobalOptions& g, const RhCheckOptions& o) {
  ordered_json report;
  report["problem"] = o.problem;
  if (o.problem == "psi_p12" || o.problem == "phi_p1") {
    const std::string fan_name = o.problem == "psi_p12" ? "p12" : "p1";
    const auto fan = rh::builtin_fan(fan_name);
    double det = 0.0;
    for (const auto& ray : fan.rays)
      det = std::max(det, std::abs(ray.matrix.determinant() - rh::Complex(1.0, 0.0)));
    report["kind"] = "ray_fan";
    report["fan"] = fan_name;
    report["rays"] = fan.rays.size();
    report["cyclic_defect"] = rh::cyclic_defect(fan);
    report["det_defect"] = det;
  } else {
    const auto family = rh::builtin_reflection(o.problem);
    report["kind"] = "reflection_family";
    report["spectral_band"] = ordered_json::array({family.spectral_min, family.spectral_max});
    report["det_defect"] = rh::det_defect(family);
  }

  RunWriter w("rh-check", g.outdir, g.label);
  w.config() = ordered_json{{"problem", o.problem}};
  w.stage("report.json", report.dump(2) + "\n");
  w.diagnostics() = report;
  w.commit();
  std::cout << report.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct PhiOptions {
  std::string datum;
  double x = 0.0;
  double t = 0.0;
  std::string lambda_grid;
};

int run_phi(const GlobalOptions& g, const PhiOptions& o) {
  std::array<std::string, 3> part;
  std::stringstream ss(o.lambda_grid);
  std::string item;
  std::size_t count = 0;
  while (std::getline(ss, item, ':')) {
    if (count == 3) throw validation_error("phi: --lambda-grid wants lo:hi:n");
    part[count++] = item;
  }
  if (count != 3) throw validation_error("phi: --lambda-grid wants lo:hi:n");
  const double lo = parse_number(part[0]);
  const double hi = parse_number(part[1]);
  const double n_raw = parse_number(part[2]);
  const auto n = static_cast<std::size_t>(n_raw);
  if (!(hi > lo) || n < 2 || static_cast<double>(n) != n_raw)
    throw validation_error("phi: --lambda-grid wants lo < hi and an integer n >= 2");

  const datum::BranchInverse fl(load_datum(o.datum));
  const auto cp = hopf::find_catastrophe(fl.datum());
  if (!(lo > fl.umin()) || !(hi <= cp.u_c))
    throw validation_error("phi: lambda grid must sit inside (" + format_double(fl.umin()) +
                           ", " + format_double(cp.u_c) + "]");

  RunWriter w("phi", g.outdir, g.label);
  w.config() = ordered_json{
      {"datum", o.datum}, {"x", o.x}, {"t", o.t}, {"lambda_grid", o.lambda_grid}};

  std::string csv = "lambda,phi\n";
  for (std::size_t i = 0; i < n; ++i) {
    const double lam =
        lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    csv += format_double(lam) + "," + format_double(rh::phi_eval(fl, cp, lam, o.x, o.t)) + "\n";
  }
  w.stage("phi.csv", std::move(csv));
  w.commit();
  return 0;
}

// ---------------------------------------------------------------------------

struct UniversalityOptions {
  std::string datum;
  std::string eps = "0.1,0.07,0.05";
  std::string window = "1,1";
  double L = 24.0;
  std::size_t n = 8192;
  double dt = 5e-6;
  double snap = 0.01;
  double family_span = 1.2;
  int family_nodes = 21;
};

int run_universality(const GlobalOptions& g, const UniversalityOptions& o) {
  universality::SweepOptions opts;
  opts.eps = parse_number_list(o.eps);
  const auto win = parse_number_list(o.window);
  if (win.size() != 2) throw validation_error("universality: --window wants X,T");
  opts.window_X = win[0];
  opts.window_T = win[1];
  opts.L = o.L;
  opts.n = o.n;
  opts.dt = o.dt;
  opts.snap_interval = o.snap;

  const auto d = load_datum(o.datum);
  const universality::UFamily fam(o.family_span, o.family_nodes);
  const auto sweep = universality::run_universality_sweep(d, fam, opts);

  RunWriter w("universality", g.outdir, g.label);
  w.config() = ordered_json{{"datum", o.datum},
                            {"eps", o.eps},
                            {"window", o.window},
                            {"L", o.L},
                            {"n", o.n},
                            {"dt", o.dt},
                            {"snap", o.snap},
                            {"family_span", o.family_span},
                            {"family_nodes", o.family_nodes}};

  ordered_json per_eps = ordered_json::array();
  for (const auto& run : sweep.runs) {
    per_eps.push_back(ordered_json{{"eps", run.eps},
                                   {"amplitude", run.amplitude},
                                   {"window_sup", run.window_error},
                                   {"window_rms", run.window_rms},
                                   {"control_sup", run.control_error},
                                   {"window_count", run.window_count}});
    std::string csv = "x,u_numeric,u_predicted\n";
    for (const auto& s : run.overlay)
      csv += format_double(s.x) + "," + format_double(s.numeric) + "," +
             format_double(s.predicted) + "\n";
    w.stage("overlay_" + format_double(run.eps) + ".csv", std::move(csv));
  }
  const ordered_json report{
      {"constants",
       {{"c1", sweep.constants.c1},
        {"c2", sweep.constants.c2},
        {"c3", sweep.constants.c3},
        {"c4", sweep.constants.c4}}},
      {"catastrophe",
       {{"x_c", sweep.cp.x_c},
        {"t_c", sweep.cp.t_c},
        {"u_c", sweep.cp.u_c},
        {"xi_c", sweep.cp.xi_c},
        {"k", sweep.cp.k}}},
      {"per_eps", per_eps},
      {"rates",
       {{"amplitude", sweep.amplitude_rate},
        {"correction", sweep.correction_rate},
        {"control", sweep.control_rate}}}};
  w.stage("report.json", report.dump(2) + "\n");
  w.diagnostics() = report;
  w.commit();
  std::cout << report.dump(2) << "\n";
  return 0;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"displab: small-dispersion evolution, gradient catastrophes, and the\n"
               "Painleve profiles and jump data that govern them near breaking"};
  app.require_subcommand(1);
  app.allow_config_extras(false);

  std::string default_cfg;
  if (const char* dir = std::getenv("DISPLAB_CONFIG_DIR")) {
    const fs::path candidate = fs::path(dir) / "displab.ini";
    if (fs::exists(candidate)) default_cfg = candidate.string();
  }
  app.set_config("--config", default_cfg,
                 "INI config file (sections per subcommand); flags override its values");

  GlobalOptions g;
  app.add_option("--outdir", g.outdir, "Root directory for run outputs")
      ->capture_default_str();
  app.add_option("--label", g.label, "Run directory name (default: UTC timestamp)");

  int code = 0;

  auto* hopf_cmd = app.add_subcommand("hopf", "Sample the characteristic solution before breaking");
  auto hopf_opts = std::make_shared<HopfOptions>();
  hopf_cmd->add_option("--datum", hopf_opts->datum, "Initial profile (sech2:A, tanh_poly:q0,q1,..., or JSON file)")->required();
  hopf_cmd->add_option("--t", hopf_opts->t, "Evaluation time")->capture_default_str();
  hopf_cmd->add_option("--xmin", hopf_opts->xmin, "Left edge")->capture_default_str();
  hopf_cmd->add_option("--xmax", hopf_opts->xmax, "Right edge")->capture_default_str();
  hopf_cmd->add_option("--n", hopf_opts->n, "Sample count")->capture_default_str();
  hopf_cmd->callback([&, hopf_opts] { code = run_hopf(g, *hopf_opts); });

  auto* cat_cmd = app.add_subcommand("catastrophe", "Locate the first breaking point of the characteristic flow");
  auto cat_opts = std::make_shared<CatastropheOptions>();
  cat_cmd->add_option("--datum", cat_opts->datum, "Initial profile")->required();
  cat_cmd->callback([&, cat_opts] { code = run_catastrophe(g, *cat_opts); });

  auto* hier_cmd = app.add_subcommand("hierarchy", "Print a commuting flow of the integrable hierarchy");
  auto hier_opts = std::make_shared<HierarchyOptions>();
  hier_cmd->add_option("--m", hier_opts->m, "Flow index (1..6)")->required();
  hier_cmd->callback([&, hier_opts] { code = run_hierarchy(g, *hier_opts); });

  auto* evolve_cmd = app.add_subcommand("evolve", "Integrate a dispersive equation from a sampled profile");
  auto evolve_opts = std::make_shared<EvolveOptions>();
  evolve_cmd->add_option("--eq", evolve_opts->eq, "Equation (kdv, kdv_hierarchy_<m>, kawahara, gkdv_<n>, nls_focusing, nls_defocusing)")->capture_default_str();
  evolve_cmd->add_option("--datum", evolve_opts->datum, "Initial profile")->required();
  evolve_cmd->add_option("--eps", evolve_opts->eps, "Dispersion parameter")->capture_default_str();
  evolve_cmd->add_option("--L", evolve_opts->L, "Half-width of the periodic box")->capture_default_str();
  evolve_cmd->add_option("--n", evolve_opts->n, "Grid points (power of two)")->capture_default_str();
  evolve_cmd->add_option("--dt", evolve_opts->dt, "Time step")->capture_default_str();
  evolve_cmd->add_option("--t-end", evolve_opts->t_end, "Final time")->capture_default_str();
  evolve_cmd->add_option("--snap", evolve_opts->snap, "Snapshot interval")->capture_default_str();
  evolve_cmd->callback([&, evolve_opts] { code = run_evolve(g, *evolve_opts); });

  auto* pu_cmd = app.add_subcommand("painleve-u", "Solve the pole-free two-parameter profile at fixed T");
  auto pu_opts = std::make_shared<PainleveUOptions>();
  pu_cmd->add_option("--T", pu_opts->T, "Slow-time parameter")->capture_default_str();
  pu_cmd->add_option("--xmax", pu_opts->xmax, "Half-width of the solve interval")->capture_default_str();
  pu_cmd->add_option("--n", pu_opts->n, "Mesh size")->capture_default_str();
  pu_cmd->callback([&, pu_opts] { code = run_painleve_u(g, *pu_opts); });

  auto* pq_cmd = app.add_subcommand("painleve-q", "March the tritronquee branch along a ray");
  auto pq_opts = std::make_shared<PainleveQOptions>();
  pq_cmd->add_option("--ray-angle", pq_opts->angle, "Ray angle in radians, |angle| < 4*pi/5")->capture_default_str();
  pq_cmd->add_option("--zfar", pq_opts->zfar, "Seed radius (>= 50)")->capture_default_str();
  pq_cmd->add_option("--znear", pq_opts->znear, "Final radius; negative continues through the origin")->capture_default_str();
  pq_cmd->add_option("--record-step", pq_opts->record_step, "Radius spacing of recorded samples")->capture_default_str();
  pq_cmd->add_option("--tol", pq_opts->tol, "Integration tolerance per unit length")->capture_default_str();
  pq_cmd->callback([&, pq_opts] { code = run_painleve_q(g, *pq_opts); });

  auto* rh_cmd = app.add_subcommand("rh-check", "Report consistency defects of built-in jump data");
  auto rh_opts = std::make_shared<RhCheckOptions>();
  rh_cmd->add_option("--problem", rh_opts->problem, "psi_p12, phi_p1, kdv, kdv_hierarchy_<m>, ch, nls_defocusing, nls_focusing")->required();
  rh_cmd->callback([&, rh_opts] { code = run_rh_check(g, *rh_opts); });

  auto* phi_cmd = app.add_subcommand("phi", "Tabulate the edge-decay exponent function");
  auto phi_opts = std::make_shared<PhiOptions>();
  phi_cmd->add_option("--datum", phi_opts->datum, "Initial profile")->required();
  phi_cmd->add_option("--x", phi_opts->x, "Position")->required();
  phi_cmd->add_option("--t", phi_opts->t, "Time")->required();
  phi_cmd->add_option("--lambda-grid", phi_opts->lambda_grid, "lo:hi:n inside (umin, u_c]")->required();
  phi_cmd->callback([&, phi_opts] { code = run_phi(g, *phi_opts); });

  auto* uni_cmd = app.add_subcommand("universality", "Measure the double-scaling expansion against evolution runs");
  auto uni_opts = std::make_shared<UniversalityOptions>();
  uni_cmd->add_option("--datum", uni_opts->datum, "Initial profile")->required();
  uni_cmd->add_option("--eps", uni_opts->eps, "Comma list of dispersion parameters")->capture_default_str();
  uni_cmd->add_option("--window", uni_opts->window, "Half-widths X,T of the comparison window")->capture_default_str();
  uni_cmd->add_option("--L", uni_opts->L, "Half-width of the periodic box")->capture_default_str();
  uni_cmd->add_option("--n", uni_opts->n, "Grid points (power of two)")->capture_default_str();
  uni_cmd->add_option("--dt", uni_opts->dt, "Time step")->capture_default_str();
  uni_cmd->add_option("--snap", uni_opts->snap, "Snapshot interval")->capture_default_str();
  uni_cmd->add_option("--family-span", uni_opts->family_span, "Half-span of the T family")->capture_default_str();
  uni_cmd->add_option("--family-nodes", uni_opts->family_nodes, "Nodes in the T family")->capture_default_str();
  uni_cmd->callback([&, uni_opts] { code = run_universality(g, *uni_opts); });

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const numerical_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return code;
}

}  // namespace displab::cli
