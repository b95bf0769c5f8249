#pragma once

// Sample-based audit of a certificate and of simulation traces.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "evadesos/sim.hpp"
#include "evadesos/synth.hpp"

namespace evadesos {

enum class Condition { Initial, Unsafe, YNonneg, Equality, Divergence, InputBound };

inline constexpr std::array<Condition, 6> kAllConditions{Condition::Initial,  Condition::Unsafe,     Condition::YNonneg,
                                                         Condition::Equality, Condition::Divergence, Condition::InputBound};

std::string to_string(Condition c);

struct ConditionResult {
  Condition condition{};
  bool pass = false;
  // Worst sampled value of the checked quantity and the bound it is held to.
  double worst = 0.0;
  double threshold = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};

struct VerificationReport {
  std::vector<ConditionResult> conditions;
  std::optional<double> gram_min_eig;  // from the solver report, when present
  std::vector<double> equality_residuals;
  bool overall = false;

  const ConditionResult* find(Condition c) const;
  std::string to_text() const;
};

/// Checks the selected conditions on `n_samples` points each.
VerificationReport check_certificate(const Certificate& cert, std::size_t n_samples = 10000, std::uint64_t seed = 1,
                                     const std::vector<Condition>& which = {kAllConditions.begin(), kAllConditions.end()});

/// V div_e psi - alpha grad_e V . psi + w . (V grad_p rho - alpha rho grad_p V).
class DivergenceField {
 public:
  explicit DivergenceField(const Certificate& cert);
  double operator()(const State& x, const Input& w) const;

 private:
  Polynomial drift_;
  std::array<Polynomial, 2> coupling_;
};

/// True when the divergence inequality holds at x for the four W vertices
/// and `n_w_samples` random w in W.
bool check_farkas_pointwise(const Certificate& cert, const State& x, std::size_t n_w_samples, std::uint64_t seed = 7);

struct TraceReport {
  bool pass = false;
  bool safe = false;                // min dist > R_a
  bool outcome_consistent = false;  // final row in Xr iff ReachedTarget
  bool in_arena = false;            // every row in X
  bool input_bounded = false;       // |u_i| <= u_max
  bool dist_consistent = false;     // dist column matches the state
  std::optional<std::size_t> capture_row;
  std::optional<std::size_t> bound_row;
  std::optional<std::size_t> exit_row;
  double min_dist = 0.0;

  std::string to_text() const;
};

TraceReport check_trace(const Trace& trace, const EnvironmentConfig& cfg);

}  // namespace evadesos
