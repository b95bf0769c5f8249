#pragma once

// Independent oracles shared by the unit suites and the acceptance runner.
// Each check compares toolkit output against a quantity computed another
// way: pointwise evaluation, finite differences, eigenvalues, brute force.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "evadesos/cli.hpp"
#include "evadesos/verify.hpp"

namespace evadesos::oracle {

struct Tally {
  int checks = 0;
  int failures = 0;
  double seconds = 0.0;
  std::vector<std::string> notes;  // first few failure descriptions

  void record(bool ok, const std::string& what);
  bool ok() const { return checks > 0 && failures == 0; }
};

/// Random polynomial in nvars variables with `terms` terms up to degree maxdeg.
Polynomial random_poly(std::uint64_t seed, int nvars, int maxdeg, int terms);

/// Ring identities, Leibniz rule, gradient/divergence vs central differences.
Tally poly_calculus(int n_checks, std::uint64_t seed);

/// n_feasible random PSD Gram constructions, n_infeasible tight SOS polynomials
/// with 1 subtracted from the constant coefficient.
Tally sos_classification(int n_feasible, int n_infeasible, std::uint64_t seed);

/// Diagonal and low-dimensional SDPs with brute-force optima.
Tally small_sdps(int count, std::uint64_t seed);

/// Closed-form size of the synthesis program, from binomial counts only.
struct ExpectedSize {
  std::size_t rows = 0;
  std::size_t psd_blocks = 0;
  std::size_t free_vars = 0;
  int max_side = 0;
};
ExpectedSize expected_program_size(const EnvironmentConfig& cfg);

/// Divergence at the four W vertices positive implies positive at n_w
/// random interior w, for n_x sampled states in cl(X \ Xr).
struct FarkasTally {
  std::size_t states = 0;
  std::size_t vertex_positive = 0;
  std::size_t violations = 0;
};
FarkasTally farkas_interior(const Certificate& cert, std::size_t n_x, std::size_t n_w, std::uint64_t seed);

/// Largest |u_i| - u_max and ||w||_2 - w_max over the rows.
struct BoundExcess {
  double u = -INFINITY;
  double w = -INFINITY;
};
BoundExcess control_bound_excess(const Trace& trace, const EnvironmentConfig& cfg);

}  // namespace evadesos::oracle
