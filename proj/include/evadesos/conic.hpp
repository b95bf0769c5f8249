#pragma once

// Standard-form conic programs over R^nf x S^n1_+ x ... x S^nk_+:
//
//   minimize    c_f' x_f + sum_j <C_j, X_j>
//   subject to  a_i,f' x_f + sum_j <A_ij, X_j> = b_i
//
// Row coefficients on PSD blocks are stored on upper-triangular entries
// (i <= j); an off-diagonal coefficient a means a * X_ij with X_ij = X_ji,
// so the matching symmetric matrix holds a/2 in both positions.

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "evadesos/soscomp.hpp"

namespace evadesos {

struct PsdEntry {
  int block = 0;
  int i = 0;
  int j = 0;  // i <= j
  double value = 0.0;
};

struct ConicRow {
  std::vector<std::pair<int, double>> free;
  std::vector<PsdEntry> psd;
  double rhs = 0.0;
};

/// Which constraint and monomial an equality row came from.
struct RowOrigin {
  int constraint = -1;
  Monomial monomial;
};

struct ConicProgram {
  int free_var_count = 0;
  std::vector<int> psd_blocks;
  std::vector<ConicRow> rows;
  std::vector<double> free_cost;     // size free_var_count
  std::vector<PsdEntry> psd_cost;    // upper-triangular convention
  // Bookkeeping back to the SOS program; empty for hand-built programs.
  std::vector<RowOrigin> origins;
  std::vector<VarId> free_to_var;    // free index -> program VarId

  /// Throws std::invalid_argument if an index is out of range or a row is empty.
  void validate() const;
};

/// Trace weight used for feasibility programs.
inline constexpr double kTracePenalty = 1e-6;

/// One row per (zero constraint, monomial); objective kTracePenalty * sum tr(Q).
ConicProgram compile(const SosProgram& prog);

enum class SolveStatus { Optimal, Infeasible, MaxIter, NumericalFailure };
std::string to_string(SolveStatus s);

struct Solution {
  SolveStatus status = SolveStatus::NumericalFailure;
  std::vector<double> free_values;
  std::vector<Eigen::MatrixXd> psd_matrices;
  std::vector<double> dual;          // equality multipliers y
  double primal_residual = 0.0;      // ||A x - b||_inf on the unscaled program
  double dual_residual = 0.0;
  double objective = 0.0;
  std::vector<double> min_eigenvalues;
  int iterations = 0;

  /// Stable key = value summary.
  std::string summary() const;
};

struct SolveOptions {
  double tol = 1e-8;
  int max_iter = 120;
  bool verbose = false;
};

/// Homogeneous self-dual primal-dual interior point method (HKM direction,
/// Mehrotra predictor-corrector). Deterministic for identical inputs.
Solution solve(const ConicProgram& cp, const SolveOptions& opts = {});
inline Solution solve(const ConicProgram& cp, double tol, int max_iter) {
  return solve(cp, SolveOptions{tol, max_iter, false});
}

/// ||A x - b||_inf for the given point.
double primal_residual(const ConicProgram& cp, const std::vector<double>& free_values,
                       const std::vector<Eigen::MatrixXd>& psd);

/// Values of all SOS-program variables from a solution.
std::vector<double> variable_values(const SosProgram& prog, const ConicProgram& cp, const Solution& sol);

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// SDPA sparse format. Equality rows become the m constraint matrices,
/// free variables are split x = x+ - x- into a diagonal block of size 2 nf
/// written as -2 nf, and the objective is negated into F0 because SDPA
/// maximizes <F0, Y>.
std::string export_sdpa(const ConicProgram& cp);
ConicProgram import_sdpa(const std::string& text);

/// Parses SDPA solver output (xVec, xMat, yMat sections) and maps yMat back
/// onto the program's free variables and PSD blocks.
Solution import_solution(const std::string& text, const ConicProgram& cp);

}  // namespace evadesos
