#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
};

std::string cli_binary() {
  if (const char* env = std::getenv("DISPLAB_BIN")) return env;
  return "tools/displab";
}

CliResult run_cli_raw(const std::string& cmd) {
  FILE* pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult res;
  char buf[4096];
  while (std::size_t got = std::fread(buf, 1, sizeof buf, pipe)) res.out.append(buf, got);
  const int status = pclose(pipe);
  res.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

CliResult run_cli(const std::string& args) { return run_cli_raw(cli_binary() + " " + args); }

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("displab_cli_" + tag);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("catastrophe reports the breaking point of the unit sech2 profile") {
  const fs::path dir = fresh_dir("cat");
  const auto res = run_cli("catastrophe --datum sech2:1 --outdir " + dir.string() + " --label r");
  REQUIRE(res.code == 0);
  const json report = json::parse(res.out);
  CHECK(report["t_c"].get<double>() == doctest::Approx(0.216506).epsilon(1e-5));
  CHECK(report["u_c"].get<double>() == doctest::Approx(-2.0 / 3.0));
  CHECK(report["x_c"].get<double>() == doctest::Approx(-1.52450).epsilon(1e-5));

  const json on_disk = json::parse(slurp(dir / "catastrophe/r/catastrophe.json"));
  CHECK(on_disk == report);
  const json manifest = json::parse(slurp(dir / "catastrophe/r/manifest.json"));
  CHECK(manifest["command"] == "catastrophe");
  CHECK(manifest["config"]["datum"] == "sech2:1");
}

TEST_CASE("hierarchy prints the second flow with the right coefficients") {
  const fs::path dir = fresh_dir("hier");
  const auto res = run_cli("hierarchy --m 2 --outdir " + dir.string() + " --label r");
  REQUIRE(res.code == 0);
  CHECK(res.out.find("30 * u * u * u_x") != std::string::npos);
  CHECK(res.out.find("eps^4 * u_{5x}") != std::string::npos);

  const json terms = json::parse(slurp(dir / "hierarchy/r/terms.json"));
  std::multiset<std::string> flow_coeffs;
  for (const auto& t : terms["flow"]) flow_coeffs.insert(t["coeff"].get<std::string>());
  CHECK(flow_coeffs == std::multiset<std::string>{"1", "10", "20", "30"});
  std::multiset<std::string> lenard_coeffs;
  for (const auto& t : terms["lenard"]) lenard_coeffs.insert(t["coeff"].get<std::string>());
  CHECK(lenard_coeffs == std::multiset<std::string>{"1", "5", "10", "10"});
}

TEST_CASE("bad invocations exit with 2 and leave no output directory") {
  const fs::path dir = fresh_dir("bad");

  SUBCASE("unknown flag") {
    const auto res =
        run_cli("catastrophe --datum sech2:1 --bogus 3 --outdir " + dir.string() + " --label r");
    CHECK(res.code == 2);
  }
  SUBCASE("missing required flag") {
    const auto res = run_cli("catastrophe --outdir " + dir.string() + " --label r");
    CHECK(res.code == 2);
  }
  SUBCASE("out-of-range argument") {
    const auto res = run_cli("hierarchy --m 9 --outdir " + dir.string() + " --label r");
    CHECK(res.code == 2);
  }
  SUBCASE("malformed datum") {
    const auto res = run_cli("catastrophe --datum sech2:zz --outdir " + dir.string() + " --label r");
    CHECK(res.code == 2);
  }
  SUBCASE("datum file that does not exist") {
    const auto res =
        run_cli("catastrophe --datum /nope/missing.json --outdir " + dir.string() + " --label r");
    CHECK(res.code == 2);
  }
  CHECK(!fs::exists(dir));
}

TEST_CASE("numerical failure past the breaking time exits with 3") {
  const fs::path dir = fresh_dir("mv");
  const auto res =
      run_cli("hopf --datum sech2:1 --t 0.3 --outdir " + dir.string() + " --label r");
  CHECK(res.code == 3);
  CHECK(!fs::exists(dir));
}

TEST_CASE("identical configurations produce identical data bytes") {
  const fs::path dir = fresh_dir("det");
  REQUIRE(run_cli("hopf --datum sech2:1 --t 0.1 --outdir " + dir.string() + " --label a").code == 0);
  REQUIRE(run_cli("hopf --datum sech2:1 --t 0.1 --outdir " + dir.string() + " --label b").code == 0);
  CHECK(slurp(dir / "hopf/a/profile.csv") == slurp(dir / "hopf/b/profile.csv"));

  const std::string header = slurp(dir / "hopf/a/profile.csv").substr(0, 4);
  CHECK(header == "x,u\n");
}

TEST_CASE("evolve writes snapshots and conserves the invariants it reports") {
  const fs::path dir = fresh_dir("ev");
  const auto res = run_cli("evolve --eq kdv --datum sech2:1 --eps 0.1 --L 20 --n 512 "
                           "--dt 1e-4 --t-end 0.01 --snap 0.005 --outdir " +
                           dir.string() + " --label r");
  REQUIRE(res.code == 0);
  CHECK(fs::exists(dir / "evolve/r/snap_0000.csv"));
  CHECK(fs::exists(dir / "evolve/r/snap_0002.csv"));

  const json manifest = json::parse(slurp(dir / "evolve/r/manifest.json"));
  const auto& diag = manifest["diagnostics"];
  CHECK(diag["status"] == "completed");
  CHECK(diag["mass_drift"].get<double>() < 1e-10);
  CHECK(diag["momentum_drift"].get<double>() < 1e-9);
  CHECK(diag["hamiltonian_drift"].get<double>() < 1e-8);
  CHECK(diag["snapshots"].size() == 3);

  const std::string csv = slurp(dir / "evolve/r/snap_0000.csv");
  CHECK(csv.substr(0, 4) == "x,u\n");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 513);
}

TEST_CASE("config files fill in defaults and flags override them") {
  const fs::path dir = fresh_dir("cfg");
  fs::create_directories(dir);
  {
    std::ofstream ini(dir / "displab.ini");
    ini << "[hopf]\nt=0.05\nn=101\n";
  }

  const std::string common = " --datum sech2:1 --outdir " + dir.string();
  REQUIRE(run_cli("--config " + (dir / "displab.ini").string() + " hopf" + common +
                  " --label a").code == 0);
  const json ma = json::parse(slurp(dir / "hopf/a/manifest.json"));
  CHECK(ma["config"]["t"].get<double>() == 0.05);
  CHECK(ma["config"]["n"].get<int>() == 101);

  REQUIRE(run_cli("--config " + (dir / "displab.ini").string() + " hopf" + common +
                  " --t 0.1 --label b").code == 0);
  const json mb = json::parse(slurp(dir / "hopf/b/manifest.json"));
  CHECK(mb["config"]["t"].get<double>() == 0.1);

  SUBCASE("unknown config keys are rejected") {
    std::ofstream(dir / "bad.ini") << "[hopf]\nwhatever=1\n";
    const auto res = run_cli("--config " + (dir / "bad.ini").string() + " hopf" + common +
                             " --label c");
    CHECK(res.code == 2);
    CHECK(!fs::exists(dir / "hopf/c"));
  }

  SUBCASE("the config directory variable supplies the default config and datum files") {
    std::ofstream(dir / "wide.json") << R"({"kind": "sech2", "amplitude": 2.0})";
    const std::string cmd = "catastrophe --datum wide.json --outdir " + dir.string() + " --label d";
    CHECK(run_cli(cmd).code == 2);

    const auto res =
        run_cli_raw("env DISPLAB_CONFIG_DIR=" + dir.string() + " " + cli_binary() + " " + cmd);
    REQUIRE(res.code == 0);
    const json report = json::parse(res.out);
    CHECK(report["t_c"].get<double>() == doctest::Approx(0.216506 / 2.0).epsilon(1e-4));
  }
}

TEST_CASE("painleve-q records the tail march and stays real on the axis") {
  const fs::path dir = fresh_dir("pq");
  const auto res = run_cli("painleve-q --ray-angle 0 --zfar 60 --znear 40 --record-step 1 "
                           "--outdir " + dir.string() + " --label r");
  REQUIRE(res.code == 0);
  const json report = json::parse(res.out);
  CHECK(!report["pole_found"].get<bool>());
  CHECK(report["growth_exponent"].get<double>() < 1e-12);

  const std::string csv = slurp(dir / "painleve-q/r/trajectory.csv");
  CHECK(csv.substr(0, 20) == "re_z,im_z,re_q,im_q\n");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 22);
  std::istringstream rows(csv);
  std::string line;
  std::getline(rows, line);
  std::getline(rows, line);
  CHECK(line.rfind("60,0,", 0) == 0);
}

TEST_CASE("rh-check reports exact defects for the built-in fans") {
  const fs::path dir = fresh_dir("rh");
  const auto res = run_cli("rh-check --problem psi_p12 --outdir " + dir.string() + " --label r");
  REQUIRE(res.code == 0);
  const json report = json::parse(res.out);
  CHECK(report["kind"] == "ray_fan");
  CHECK(report["cyclic_defect"].get<double>() == 0.0);
  CHECK(report["det_defect"].get<double>() == 0.0);

  const auto refl = run_cli("rh-check --problem kdv --outdir " + dir.string() + " --label s");
  REQUIRE(refl.code == 0);
  const json rep2 = json::parse(refl.out);
  CHECK(rep2["kind"] == "reflection_family");
  CHECK(rep2["det_defect"].get<double>() < 1e-14);
}

TEST_CASE("phi validates its grid specification") {
  const fs::path dir = fresh_dir("phi");
  CHECK(run_cli("phi --datum sech2:1 --x -1.6 --t 0.2 --lambda-grid oops --outdir " +
                dir.string() + " --label r").code == 2);
  CHECK(run_cli("phi --datum sech2:1 --x -1.6 --t 0.2 --lambda-grid -2:-0.7:5 --outdir " +
                dir.string() + " --label r").code == 2);
  CHECK(!fs::exists(dir));

  const auto res = run_cli("phi --datum sech2:1 --x -1.6 --t 0.2 --lambda-grid -0.9:-0.7:3 "
                           "--outdir " + dir.string() + " --label r");
  REQUIRE(res.code == 0);
  const std::string csv = slurp(dir / "phi/r/phi.csv");
  CHECK(csv.substr(0, 11) == "lambda,phi\n");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}
