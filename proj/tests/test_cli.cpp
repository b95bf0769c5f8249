#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "evadesos/cli.hpp"
#include "oracles.hpp"

using namespace evadesos;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = EVADESOS_SOURCE_DIR;

fs::path workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("evadesos_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string path(const std::string& name) { return (workdir() / name).string(); }

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "evadesos");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void put(const std::string& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

std::string drop_first_line(const std::string& s) { return s.substr(s.find('\n') + 1); }

int expected_exit(const std::string& csv) {
  switch (Trace::from_csv(csv).outcome) {
    case Outcome::ReachedTarget: return exit_code::kOk;
    case Outcome::Captured: return exit_code::kCaptured;
    default: return exit_code::kTimeout;
  }
}

}  // namespace

TEST_CASE("usage and input errors exit 1") {
  CHECK(cli({}) == exit_code::kError);
  CHECK(cli({"frobnicate"}) == exit_code::kError);
  CHECK(cli({"synthesize", path("missing.cfg"), "--quiet"}) == exit_code::kError);
  put(path("bad.cfg"), "R = 4\nR_a = 5\n");
  CHECK(cli({"synthesize", path("bad.cfg"), "--quiet"}) == exit_code::kError);
  CHECK(cli({"export", path("bad.cfg"), "--quiet", "--out", path("bad.dat-s")}) == exit_code::kError);
  CHECK(cli({"verify", path("missing.cert"), "--quiet"}) == exit_code::kError);
  CHECK(cli({"simulate", path("missing.cert"), "--quiet"}) == exit_code::kError);
  CHECK(cli({"plot", path("missing.csv"), "--quiet"}) == exit_code::kError);
  put(path("empty.csv"), "");
  CHECK(cli({"plot", path("empty.csv"), "--quiet", "--out", path("empty.svg")}) == exit_code::kError);
}

TEST_CASE("synthesize: infeasible and too-large configs") {
  std::string desk = slurp((kSource / "configs/desk.cfg").string());
  put(path("umax0.cfg"), desk + "u_max = 0\n");
  // Later keys override earlier ones.
  CHECK(cli({"synthesize", path("umax0.cfg"), "--quiet", "--out", path("umax0.cert")}) == exit_code::kInfeasible);
  CHECK_FALSE(fs::exists(path("umax0.cert")));
  CHECK(cli({"synthesize", (kSource / "configs/full.cfg").string(), "--quiet"}) == exit_code::kTooLarge);
}

TEST_CASE("export: toy config matches the golden file") {
  const std::string cfg = (kSource / "tests/golden/toy.cfg").string();
  REQUIRE(cli({"export", cfg, "--quiet", "--out", path("toy.dat-s")}) == exit_code::kOk);
  const std::string text = slurp(path("toy.dat-s"));
  CHECK(text.rfind("\"evadesos program manifest=", 0) == 0);
  CHECK(drop_first_line(text) == slurp((kSource / "tests/golden/toy.dat-s").string()));
  const ConicProgram cp = import_sdpa(text);
  const auto e = oracle::expected_program_size(load_config(cfg));
  CHECK(cp.rows.size() == e.rows);
  CHECK(cp.psd_blocks.size() == e.psd_blocks);
  CHECK(static_cast<std::size_t>(cp.free_var_count) == e.free_vars);
}

TEST_CASE("verify: a failing certificate exits 4") {
  Certificate c;
  c.cfg.x_ie = {0.5, -1.8};
  c.cfg.x_ip = {0.5, 1.0};
  c.V = build_V(c.cfg);
  c.rho_hat = Polynomial::constant(4, 1.0);
  c.psi_hat = PolyVec(2, 4);
  c.y = PolyVec(4, 4);
  save_certificate(c, path("flat.cert"));
  CHECK(cli({"verify", path("flat.cert"), "--quiet", "--samples", "500"}) == exit_code::kVerificationFailed);
}

const std::string kFallback = (kSource / "configs/fallback.cfg").string();

// synthesize + simulate; returns the simulate exit code.
int pipeline(const std::string& tag) {
  const std::string cert = path(tag + ".cert");
  REQUIRE(cli({"synthesize", kFallback, "--quiet", "--seed", "3", "--out", cert}) == exit_code::kOk);
  const int code = cli({"simulate", cert, "--quiet", "--strategy", "tail-chasing", "--out", path(tag + ".csv")});
  CHECK(code == expected_exit(slurp(path(tag + ".csv"))));
  return code;
}

// The first pipeline run is shared by the test cases below.
const std::string& fallback_cert() {
  static const std::string cert = [] {
    pipeline("a");
    return path("a.cert");
  }();
  return cert;
}

TEST_CASE("synthesize writes a passing certificate and report") {
  const std::string cert = fallback_cert();
  const std::string report = slurp(cert + ".report");
  CHECK(report.find("overall = pass") != std::string::npos);
  CHECK(report.rfind("manifest = ", 0) == 0);
  CHECK(cli({"verify", cert, "--quiet"}) == exit_code::kOk);
  CHECK(Certificate::from_text(slurp(cert)).manifest == report.substr(11, 16));
}

TEST_CASE("synthesize -> simulate is byte-identical on rerun") {
  const std::string cert = slurp(fallback_cert()), csv = slurp(path("a.csv"));
  // Same command line, same output paths.
  pipeline("a");
  CHECK(slurp(path("a.cert")) == cert);
  CHECK(slurp(path("a.csv")) == csv);
}

TEST_CASE("tampered coefficient fails verification") {
  std::string text = slurp(fallback_cert());
  const auto rho = text.find("[poly rho]\n");
  REQUIRE(rho != std::string::npos);
  // First rho row is the constant term "0 0 0 0 c"; replace c.
  const auto row = rho + 11;
  const auto end = text.find('\n', row);
  text.replace(row, end - row, "0 0 0 0 -5");
  put(path("tampered.cert"), text);
  CHECK(cli({"verify", path("tampered.cert"), "--quiet"}) == exit_code::kVerificationFailed);
}

TEST_CASE("simulate options") {
  const std::string cert = fallback_cert();
  CHECK(cli({"simulate", cert, "--quiet", "--x0", "1,1,1,1", "--out", path("xa.csv")}) == exit_code::kError);
  CHECK(cli({"simulate", cert, "--quiet", "--dt", "100", "--out", path("dt.csv")}) == exit_code::kError);
  CHECK(cli({"simulate", cert, "--quiet", "--strategy", "zigzag"}) == exit_code::kError);
  const int code = cli({"simulate", cert, "--quiet", "--x0", "random", "--seed", "5", "--strategy", "box", "--tmax",
                        "100", "--out", path("box.csv")});
  CHECK(code == expected_exit(slurp(path("box.csv"))));
}

TEST_CASE("plot structure") {
  const std::string cert = fallback_cert();
  REQUIRE(cli({"plot", path("a.csv"), "--quiet", "--config", kFallback, "--out", path("one.svg")}) == exit_code::kOk);
  const std::string one = slurp(path("one.svg"));
  CHECK(count(one, "class=\"arena-panel\"") == 1);
  CHECK(count(one, "class=\"distance-panel\"") == 1);
  CHECK(count(one, "class=\"arena\"") == 1);
  CHECK(count(one, "class=\"target\"") == 1);
  CHECK(count(one, "class=\"evader\"") == 1);
  CHECK(count(one, "class=\"pursuer\"") == 1);
  CHECK(count(one, "class=\"catch\"") == 1);
  CHECK(count(one, "class=\"catch-radius\"") == 1);
  CHECK(count(one, "stroke-dasharray") == 2);
  CHECK(count(one, "<polyline") == 3);
  CHECK(one.find("<!-- manifest=") != std::string::npos);

  cli({"simulate", cert, "--quiet", "--x0", "random", "--seed", "9", "--tmax", "50", "--out", path("c.csv")});
  REQUIRE(cli({"plot", path("a.csv"), path("c.csv"), "--quiet", "--config", kFallback, "--out", path("two.svg")}) ==
          exit_code::kOk);
  const std::string two = slurp(path("two.svg"));
  CHECK(count(two, "class=\"arena-panel\"") == 2);
  CHECK(count(two, "class=\"distance-panel\"") == 2);
  CHECK(count(two, "<polyline") == 6);
  CHECK(two.find("width=\"840.00\"") != std::string::npos);
}
