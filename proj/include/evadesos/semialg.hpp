#pragma once

// Game geometry: the six circle functions over the joint state
// x = (x1, x2, x3, x4) = (evader xy, pursuer xy) and the regions built from
// them.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "evadesos/poly.hpp"

namespace evadesos {

using Vec2 = std::array<double, 2>;
using State = std::array<double, 4>;

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct EnvironmentConfig {
  double R = 4.0;       // arena radius
  double R_ie = 0.3;    // evader initial ball
  double R_ip = 0.3;    // pursuer initial ball
  double R_a = 0.5;     // catch radius
  double R_r = 0.5;     // target radius
  Vec2 x_r{2.8284271247461903, 2.8284271247461903};
  Vec2 x_ie{-2.0, 0.0};
  Vec2 x_ip{-2.0, 2.0};
  double u_max = 0.015;
  double w_max = 0.01;
  int alpha = 2;
  int d_rho = 4;
  int d_psi = 4;
  int d_sigma = 2;
  int d_lambda = 2;
  double epsilon_strict = 1e-4;
  // Width (length units) of the band next to the unsafe boundaries where the
  // input bound is not imposed: the bound holds for |x_e|, |x_p| <= R - band
  // and |x_e - x_p| >= R_a + band.
  double bound_band = 0.5;
  // Degree of the Farkas multipliers y; 0 picks d_rho.
  int d_y = 0;
  // Interior-point settings for synthesis.
  double solver_tol = 1e-8;
  int solver_max_iter = 120;

  /// Throws ConfigError on any structural violation.
  void validate() const;
  /// u_max > w_max > 0.
  bool evader_faster() const { return u_max > w_max && w_max > 0.0; }
  int y_degree() const { return d_y > 0 ? d_y : d_rho; }
};

/// Parses the flat `key = value` configuration format. Vectors are written
/// as two comma- or space-separated numbers. `#` starts a comment.
EnvironmentConfig parse_config(const std::string& text);
EnvironmentConfig load_config(const std::string& path);
std::string format_config(const EnvironmentConfig& cfg);

struct GameSets {
  Polynomial h_Xe, h_Xp, h_ie, h_ip, h_a, h_re;
};

GameSets build_sets(const EnvironmentConfig& cfg);

enum class Region {
  X,
  Xi,
  Xa,
  Xr,
  Xc,
  ClXMinusXr,
  UnsafeBoundaryUnion,
  // The two measure-zero pieces of the unsafe union.
  EvaderArenaBoundary,   // h_Xe = 0, h_re > 0, pursuer in arena
  PursuerArenaBoundary,  // h_Xp = 0, evader in X
  // Xc shrunk by the input-bound band.
  XcBound,
};

std::string to_string(Region r);

/// Tolerance for the equality tests on h_Xe = 0 and h_Xp = 0.
inline constexpr double kBoundaryTolerance = 1e-9;

class GameGeometry {
 public:
  explicit GameGeometry(EnvironmentConfig cfg);

  const EnvironmentConfig& config() const { return cfg_; }
  const GameSets& sets() const { return sets_; }

  bool contains(Region region, const State& x) const;

  /// `count` points of `region`, deterministic in `seed`. Positive-measure
  /// regions use rejection sampling from a region-specific bounding box;
  /// boundary pieces project random directions onto the arena circle.
  std::vector<State> sample(Region region, std::size_t count, std::uint64_t seed) const;

 private:
  struct Values {
    double Xe, Xp, ie, ip, a, re;
  };
  Values values(const State& x) const;

  EnvironmentConfig cfg_;
  GameSets sets_;
};

bool membership(const GameGeometry& geometry, Region region, const State& x);

class SamplingExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace evadesos
