#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "evadesos/synth.hpp"
#include "oracles.hpp"

using namespace evadesos;

namespace {

EnvironmentConfig desk() {
  EnvironmentConfig c;
  c.x_ie = {0.5, -1.8};
  c.x_ip = {0.5, 1.0};
  return c;
}

EnvironmentConfig full_scale() {
  EnvironmentConfig c = desk();
  c.d_rho = c.d_psi = 10;
  c.alpha = 18;
  c.d_sigma = c.d_lambda = 6;
  c.d_y = 10;
  return c;
}

Certificate toy_certificate() {
  Certificate c;
  c.cfg = desk();
  c.V = build_V(c.cfg);
  c.alpha = 2;
  const Polynomial x1 = Polynomial::variable(4, 0);
  c.rho_hat = Polynomial::constant(4, 1.0) - 0.25 * x1 * x1;
  c.psi_hat = PolyVec({0.01 * x1, Polynomial(4)});
  c.y = PolyVec(4, 4);
  c.y[2] = Polynomial::constant(4, 1.0 / 3.0);
  c.multipliers["sigma_ie"] = Polynomial::constant(4, 0.5);
  c.solver_report = "status = Optimal\nmin_eigenvalue = 1.000000e-09\n";
  c.manifest = "0123456789abcdef";
  return c;
}

}  // namespace

TEST_CASE("Farkas data") {
  const FarkasData f = farkas_data(desk());
  for (double e : f.e) CHECK(e == 0.01);
  CHECK(f.N[0][0] == 1.0);
  CHECK(f.N[3][1] == -1.0);
  CHECK(f.N[1][0] == 0.0);
}

TEST_CASE("build_V examples") {
  EnvironmentConfig c = desk();
  c.x_r = {0.0, 0.0};
  CHECK(build_V(c).evaluate(State{1, 0, 3, 3}) == doctest::Approx(1.0));
  const EnvironmentConfig d = desk();
  CHECK(build_V(d).evaluate(State{d.x_r[0], d.x_r[1], 0, 0}) == doctest::Approx(0.0));
  CHECK(build_V(d).evaluate(State{0, 0, 1, 2}) == doctest::Approx(16.0));
  CHECK(build_V(d).degree() == 2);
}

TEST_CASE("program structure at desk scale") {
  const SynthProgram sp = build_program(desk());
  CHECK(sp.families.size() == 15);
  CHECK(sp.scale == 4.0);
  const ProgramSize s = program_size(sp);
  CHECK(s.max_side <= 126);
  CHECK(s.fits_internal());
  const oracle::ExpectedSize e = oracle::expected_program_size(desk());
  CHECK(s.rows == e.rows);
  CHECK(s.blocks == e.psd_blocks);
  CHECK(s.free_vars == e.free_vars);
  CHECK(s.max_side == e.max_side);
  const ConicProgram cp = compile(sp.prog);
  CHECK(cp.rows.size() == e.rows);
}

TEST_CASE("program sizes match closed-form counts") {
  for (int d : {4, 6, 8}) {
    EnvironmentConfig c = desk();
    c.d_rho = c.d_psi = d;
    c.d_sigma = c.d_lambda = d - 2;
    c.d_y = d;
    const ProgramSize s = program_size(build_program(c));
    const oracle::ExpectedSize e = oracle::expected_program_size(c);
    CHECK(s.rows == e.rows);
    CHECK(s.blocks == e.psd_blocks);
    CHECK(s.free_vars == e.free_vars);
    CHECK(s.max_side == e.max_side);
  }
}

TEST_CASE("full scale is flagged as too large") {
  const ProgramSize s = program_size(build_program(full_scale()));
  CHECK(s.rows == 11830);
  CHECK(s.blocks == 33);
  CHECK(s.max_side == 210);
  CHECK_FALSE(s.fits_internal());
  CHECK_THROWS_AS(synthesize(full_scale()), TooLargeError);
}

TEST_CASE("u_max = 0 is infeasible") {
  EnvironmentConfig c = desk();
  c.u_max = 0.0;
  CHECK_THROWS_AS(synthesize(c), InfeasibleError);
}

TEST_CASE("reference geometry at degree 4 is infeasible") { CHECK_THROWS_AS(synthesize(desk()), InfeasibleError); }

TEST_CASE("certificate text round trip") {
  const Certificate c = toy_certificate();
  const std::string text = c.to_text();
  const Certificate back = Certificate::from_text(text);
  CHECK(back.to_text() == text);
  CHECK(back.rho_hat == c.rho_hat);
  CHECK(back.psi_hat[0] == c.psi_hat[0]);
  CHECK(back.y[2] == c.y[2]);
  CHECK(back.alpha == 2);
  CHECK(back.manifest == c.manifest);
  CHECK(back.cfg.x_ie == c.cfg.x_ie);
  CHECK(back.multipliers.at("sigma_ie") == c.multipliers.at("sigma_ie"));

  CHECK_THROWS(Certificate::from_text("not a certificate\n"));
  std::string truncated = text.substr(0, text.find("[end]"));
  CHECK_THROWS(Certificate::from_text(truncated));
  std::string bad = text;
  bad.replace(bad.find("[poly rho]\n") + 11, 1, "x");
  CHECK_THROWS(Certificate::from_text(bad));
}
