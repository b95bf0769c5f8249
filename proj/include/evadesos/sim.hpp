#pragma once

// Closed-loop simulation of the joint integrator game under the rational
// evader controller u = psi/rho and a scripted pursuer.

#include <array>
#include <string>
#include <vector>

#include "evadesos/semialg.hpp"
#include "evadesos/synth.hpp"

namespace evadesos {

using Input = std::array<double, 2>;

enum class Strategy { TailChasing, GoToMiddle, BoxSaturating };
enum class Outcome { ReachedTarget, Captured, LeftArena, Timeout };

std::string to_string(Strategy s);
std::string to_string(Outcome o);
Strategy parse_strategy(const std::string& s);
Outcome parse_outcome(const std::string& s);

struct SimConfig {
  double dt = 0.1;
  double t_max = 2000.0;
  Strategy strategy = Strategy::TailChasing;
  State x0{};
  // Negative means 1e-9 * max |rho coefficient|.
  double singularity_floor = -1.0;

  /// Throws ConfigError on dt <= 0, dt * u_max > R_a / 10, t_max <= 0 or x0 outside Xi.
  void validate(const EnvironmentConfig& env) const;
};

struct TraceRow {
  double t = 0.0;
  State x{};
  Input u{};
  Input w{};
  double rho = 0.0;
  double dist = 0.0;
};

struct Trace {
  std::vector<TraceRow> rows;
  Outcome outcome = Outcome::Timeout;
  std::size_t singular_steps = 0;
  std::string manifest;  // provenance hash echoed in the footer, may be empty

  double min_dist() const;
  std::string to_csv() const;
  static Trace from_csv(const std::string& text);
};

struct EvaderControl {
  Input u{};
  bool singular = false;
};

double default_singularity_floor(const Certificate& cert);

EvaderControl evader_control(const Certificate& cert, const State& x, double singularity_floor);
Input pursuer_control(Strategy strategy, const State& x, double w_max, const Vec2& x_r);
State step(const State& x, const Input& u, const Input& w, double dt);

/// Runs until capture, target, exit or horizon. The last row is the
/// terminating state.
Trace run(const Certificate& cert, const SimConfig& sc);

}  // namespace evadesos
