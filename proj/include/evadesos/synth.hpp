#pragma once

// Robust reach-avoid certificate synthesis: builds the density-function SOS
// program for one game instance, solves it, and packages the result.

#include <map>
#include <string>

#include "evadesos/conic.hpp"
#include "evadesos/semialg.hpp"

namespace evadesos {

/// N = [I; -I] (4 x 2) and e = w_max * 1.
struct FarkasData {
  std::array<std::array<double, 2>, 4> N{{{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}}};
  std::array<double, 4> e{};
};

FarkasData farkas_data(const EnvironmentConfig& cfg);

/// Polynomials in the original coordinates.
struct Certificate {
  EnvironmentConfig cfg;
  Polynomial V;
  int alpha = 1;
  Polynomial rho_hat;
  PolyVec psi_hat;  // 2 entries
  PolyVec y;        // 4 entries
  std::map<std::string, Polynomial> multipliers;
  std::string solver_report;  // Solution::summary() text
  std::string manifest;       // provenance hash, empty if unset

  std::string to_text() const;
  static Certificate from_text(const std::string& text);
};

void save_certificate(const Certificate& c, const std::string& path);
Certificate load_certificate(const std::string& path);

/// V = (x1 - x_r1)^2 + (x2 - x_r2)^2.
Polynomial build_V(const EnvironmentConfig& cfg);

/// Handles into a built program. The program is posed in z = x / scale so
/// that the arena is the unit disc; `scale` equals cfg.R.
struct SynthProgram {
  SosProgram prog;
  double scale = 1.0;
  std::vector<std::string> families;  // one entry per polynomial constraint family
  AffinePolyExpr rho;
  std::array<AffinePolyExpr, 2> psi;
  std::array<AffinePolyExpr, 4> y;
  // Multiplier name -> coordinate factor mapping z-program multipliers back.
  std::map<std::string, double> multiplier_factor;
};

SynthProgram build_program(const EnvironmentConfig& cfg);

/// Internal-solver limits; larger programs must go through export.
inline constexpr int kMaxGramSide = 150;
inline constexpr std::size_t kMaxEqualities = 20000;

struct ProgramSize {
  std::size_t rows = 0;
  std::size_t free_vars = 0;
  std::size_t blocks = 0;
  int max_side = 0;
  bool fits_internal() const { return max_side <= kMaxGramSide && rows <= kMaxEqualities; }
};
ProgramSize program_size(const SynthProgram& sp);

class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class TooLargeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class SolverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Maps a solved program back to original coordinates.
Certificate extract_certificate(const EnvironmentConfig& cfg, const SynthProgram& sp, const ConicProgram& cp,
                                const Solution& sol);

struct SynthesisResult {
  Certificate cert;
  Solution solution;
  ProgramSize size;
};

/// Build, size-check, compile and solve. Throws TooLargeError,
/// InfeasibleError or SolverFailure.
SynthesisResult synthesize(const EnvironmentConfig& cfg, bool verbose = false);

}  // namespace evadesos
