#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "evadesos/conic.hpp"
#include "oracles.hpp"

using namespace evadesos;

namespace {

// One 1x1 block q with the single equality q = rhs.
ConicProgram scalar_program(double rhs) {
  ConicProgram cp;
  cp.psd_blocks = {1};
  ConicRow row;
  row.psd.push_back({0, 0, 0, 1.0});
  row.rhs = rhs;
  cp.rows.push_back(row);
  return cp;
}

const char* kGolden = "1\n1\n1\n4\n1 1 1 1 1\n";

const char* kGoldenSolution =
    "SDPA output\n"
    "phase.value = pdOPT\n"
    "objValPrimal = 0.0\n"
    "xVec = \n"
    "{0.0}\n"
    "xMat = \n"
    "{\n"
    "{0.0}\n"
    "}\n"
    "yMat = \n"
    "{\n"
    "{4.0}\n"
    "}\n";

}  // namespace

TEST_CASE("compile: (x + 1)^2 gives three rows and one 2x2 block") {
  SosProgram p;
  const Polynomial x = Polynomial::variable(1, 0), one = Polynomial::constant(1, 1.0);
  p.assert_sos(AffinePolyExpr(x * x + 2.0 * x + one), "sq");
  const ConicProgram cp = compile(p);
  CHECK(cp.rows.size() == 3);
  REQUIRE(cp.psd_blocks.size() == 1);
  CHECK(cp.psd_blocks[0] == 2);
  CHECK(cp.origins.size() == 3);
  CHECK(cp.free_var_count == 0);
  CHECK(cp.psd_cost.size() == 2);
  CHECK(cp.psd_cost[0].value == kTracePenalty);
}

TEST_CASE("compile: empty program") {
  const ConicProgram cp = compile(SosProgram{});
  CHECK(cp.rows.empty());
  CHECK(cp.psd_blocks.empty());
}

TEST_CASE("solve scalar examples") {
  const Solution ok = solve(scalar_program(4.0));
  REQUIRE(ok.status == SolveStatus::Optimal);
  CHECK(ok.psd_matrices[0](0, 0) == doctest::Approx(4.0).epsilon(1e-8));
  CHECK(ok.primal_residual < 1e-8);
  CHECK(solve(scalar_program(-1.0)).status == SolveStatus::Infeasible);
}

TEST_CASE("solve with free variables") {
  // min x_f subject to x_f - q = 2, q >= 0: optimum x_f = 2.
  ConicProgram cp;
  cp.free_var_count = 1;
  cp.free_cost = {1.0};
  cp.psd_blocks = {1};
  ConicRow row;
  row.free.push_back({0, 1.0});
  row.psd.push_back({0, 0, 0, -1.0});
  row.rhs = 2.0;
  cp.rows.push_back(row);
  const Solution s = solve(cp);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.free_values[0] == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(s.objective == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("validate rejects bad indices") {
  ConicProgram cp = scalar_program(1.0);
  cp.rows[0].psd[0].block = 3;
  CHECK_THROWS_AS(cp.validate(), std::invalid_argument);
  ConicProgram empty_row = scalar_program(1.0);
  empty_row.rows[0].psd.clear();
  CHECK_THROWS_AS(empty_row.validate(), std::invalid_argument);
}

TEST_CASE("SDPA export golden file") {
  CHECK(export_sdpa(scalar_program(4.0)) == kGolden);
  const std::string empty = export_sdpa(ConicProgram{});
  CHECK(empty.rfind("0\n0\n", 0) == 0);
  const ConicProgram back = import_sdpa(empty);
  CHECK(back.rows.empty());
}

TEST_CASE("SDPA round trip on a compiled program") {
  SosProgram p;
  const DecisionPoly a = p.declare_poly("a", 2, 2);
  const Polynomial x = Polynomial::variable(2, 0);
  p.assert_sos(a.expr * x * x + AffinePolyExpr(Polynomial::constant(2, 1.0)), "s");
  const ConicProgram cp = compile(p);
  const std::string text = export_sdpa(cp);
  const ConicProgram back = import_sdpa(text);
  CHECK(back.rows.size() == cp.rows.size());
  CHECK(back.free_var_count == cp.free_var_count);
  CHECK(back.psd_blocks == cp.psd_blocks);
  CHECK(export_sdpa(back) == text);
  // Comment lines are skipped.
  CHECK(export_sdpa(import_sdpa("\"a comment\n* another\n" + text)) == text);
}

TEST_CASE("SDPA parse errors name the line") {
  try {
    import_sdpa("1\n1\n1\n4\n1 1 1 x 1\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 5);
  }
  CHECK_THROWS_AS(import_sdpa("1\n"), ParseError);
  CHECK_THROWS_AS(import_sdpa("1\n2\n1\n4\n"), ParseError);
}

TEST_CASE("import_solution") {
  const ConicProgram cp = scalar_program(4.0);
  const Solution s = import_solution(kGoldenSolution, cp);
  CHECK(s.status == SolveStatus::Optimal);
  REQUIRE(s.psd_matrices.size() == 1);
  CHECK(s.psd_matrices[0](0, 0) == 4.0);
  CHECK(s.primal_residual == 0.0);

  std::string bad = kGoldenSolution;
  bad.replace(bad.find("{4.0}"), 5, "{4.0q}");
  try {
    import_solution(bad, cp);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 12);
  }
  ConicProgram two = cp;
  two.psd_blocks = {2};
  CHECK_THROWS_AS(import_solution(kGoldenSolution, two), DimensionError);
  CHECK_THROWS_AS(import_solution("phase.value = pdOPT\n", cp), ParseError);
}

TEST_CASE("20 small SDPs against brute force") {
  const oracle::Tally t = oracle::small_sdps(20, 77);
  for (const auto& n : t.notes) MESSAGE(n);
  CHECK(t.checks == 20);
  CHECK(t.failures == 0);
}

TEST_CASE("SOS oracle: random Gram constructions") {
  const oracle::Tally t = oracle::sos_classification(50, 50, 99);
  for (const auto& n : t.notes) MESSAGE(n);
  CHECK(t.checks == 100);
  CHECK(t.failures == 0);
  CHECK(t.seconds < 60.0);
}
