#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "evadesos/verify.hpp"
#include "oracles.hpp"

using namespace evadesos;

namespace {

Certificate constant_cert(double rho, double w_max) {
  Certificate c;
  c.cfg.x_ie = {0.5, -1.8};
  c.cfg.x_ip = {0.5, 1.0};
  c.cfg.w_max = w_max;
  c.V = build_V(c.cfg);
  c.alpha = 2;
  c.rho_hat = Polynomial::constant(4, rho);
  c.psi_hat = PolyVec(2, 4);
  c.y = PolyVec(4, 4);
  return c;
}

// V = 1: drift div psi = 1, couplings d rho / d x_p = (x3, 0).
Certificate affine_cert() {
  Certificate c = constant_cert(1.0, 0.01);
  c.V = Polynomial::constant(4, 1.0);
  c.alpha = 1;
  c.psi_hat = PolyVec({Polynomial::variable(4, 0), Polynomial(4)});
  c.rho_hat = 0.5 * Polynomial::variable(4, 2) * Polynomial::variable(4, 2);
  return c;
}

TraceRow row(double t, State x, Input u = {0, 0}) {
  TraceRow r;
  r.t = t;
  r.x = x;
  r.u = u;
  r.dist = std::hypot(x[0] - x[2], x[1] - x[3]);
  return r;
}

}  // namespace

TEST_CASE("constant certificate rho = 1, psi = 0") {
  const Certificate c = constant_cert(1.0, 0.0);
  const auto rep = check_certificate(c, 2000, 1, {Condition::Initial, Condition::YNonneg, Condition::InputBound});
  CHECK(rep.overall);
  CHECK(rep.conditions.size() == 3);
  const auto div = check_certificate(c, 2000, 1, {Condition::Divergence});
  CHECK_FALSE(div.overall);
  CHECK(div.find(Condition::Divergence)->worst == 0.0);
  // w_max = 0 checks the single point w = 0.
  CHECK(div.find(Condition::Divergence)->samples == 2000);
}

TEST_CASE("rho = -1 fails the initial condition by exactly 1") {
  const auto rep = check_certificate(constant_cert(-1.0, 0.01), 500, 3);
  const ConditionResult* r = rep.find(Condition::Initial);
  REQUIRE(r != nullptr);
  CHECK_FALSE(r->pass);
  CHECK(r->worst == -1.0);
  CHECK(rep.find(Condition::Unsafe)->pass);
  CHECK_FALSE(rep.overall);
}

TEST_CASE("equality residual and report text") {
  Certificate c = constant_cert(1.0, 0.01);
  c.y[0] = Polynomial::constant(4, 2e-7);
  c.solver_report = "min_eigenvalue = 3.5e-10\n";
  const auto rep = check_certificate(c, 100, 1);
  REQUIRE(rep.equality_residuals.size() == 2);
  CHECK(rep.find(Condition::Equality)->worst > 1e-7);
  CHECK_FALSE(rep.find(Condition::Equality)->pass);
  REQUIRE(rep.gram_min_eig.has_value());
  CHECK(*rep.gram_min_eig == 3.5e-10);
  const std::string text = rep.to_text();
  CHECK(text.rfind("overall = fail\n", 0) == 0);
  CHECK(text.find("condition.equality.pass = false") != std::string::npos);
  CHECK(text.find("condition.initial.seed = 1") != std::string::npos);
  CHECK(check_certificate(c, 100, 1).to_text() == text);
}

TEST_CASE("Farkas pointwise check") {
  const Certificate c = affine_cert();
  // Drift 1, couplings (x3, 0): all vertices positive when |x3| < 100.
  CHECK(check_farkas_pointwise(c, {0, 0, 1, 0}, 1000));
  const DivergenceField d(c);
  CHECK(d({0, 0, 1, 0}, {0.01, 0}) == doctest::Approx(1.01));
  CHECK(d({0, 0, 1, 0}, {-0.01, 0.01}) == doctest::Approx(0.99));
  // Negative drift fails at a vertex.
  Certificate bad = c;
  bad.psi_hat[0] = -1.0 * Polynomial::variable(4, 0);
  CHECK_FALSE(check_farkas_pointwise(bad, {0, 0, 1, 0}, 10));
  const Certificate zero_w = constant_cert(1.0, 0.0);
  CHECK_FALSE(check_farkas_pointwise(zero_w, {0, 0, 1, 0}, 10));
}

TEST_CASE("vertex positivity implies interior positivity") {
  const oracle::FarkasTally f = oracle::farkas_interior(affine_cert(), 1000, 1000, 5);
  CHECK(f.states == 1000);
  CHECK(f.vertex_positive > 0);
  CHECK(f.violations == 0);
}

TEST_CASE("trace audit") {
  EnvironmentConfig cfg;
  cfg.x_ie = {0.5, -1.8};
  cfg.x_ip = {0.5, 1.0};
  const double r = std::hypot(cfg.x_r[0], cfg.x_r[1]);
  const double s = (r + 0.2) / r;
  {
    Trace tr;
    tr.rows = {row(0, {0.5, -1.8, 0.5, 1.0}), row(0.1, {cfg.x_r[0] * s, cfg.x_r[1] * s, 1.2, 1.5})};
    tr.outcome = Outcome::ReachedTarget;
    const TraceReport rep = check_trace(tr, cfg);
    CHECK(rep.pass);
    CHECK(rep.min_dist > 0.5);
  }
  {
    Trace tr;
    tr.rows = {row(0, {0.5, -1.8, 0.5, 1.0}), row(0.1, {0, 0, 0.5, 0})};
    tr.outcome = Outcome::Captured;
    const TraceReport rep = check_trace(tr, cfg);
    CHECK_FALSE(rep.safe);
    REQUIRE(rep.capture_row.has_value());
    CHECK(*rep.capture_row == 1);
    CHECK(rep.outcome_consistent);
  }
  {
    Trace tr;
    tr.rows = {row(0, {0.5, -1.8, 0.5, 1.0}, {1.1 * cfg.u_max, 0})};
    tr.outcome = Outcome::Timeout;
    const TraceReport rep = check_trace(tr, cfg);
    CHECK_FALSE(rep.input_bounded);
    CHECK(*rep.bound_row == 0);
    CHECK_FALSE(rep.pass);
  }
  {
    Trace tr;
    tr.rows = {row(0, {0.5, -1.8, 0.5, 1.0})};
    tr.rows[0].dist = 1.0;
    tr.outcome = Outcome::ReachedTarget;
    const TraceReport rep = check_trace(tr, cfg);
    CHECK_FALSE(rep.dist_consistent);
    CHECK_FALSE(rep.outcome_consistent);
  }
}
