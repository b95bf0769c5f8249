#pragma once

// Command-line surface: synthesize | verify | simulate | export | plot.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "evadesos/sim.hpp"

namespace evadesos {

inline constexpr const char* kToolkitVersion = "0.3.0";

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kError = 1;  // bad config, unreadable input, usage
inline constexpr int kInfeasible = 2;
inline constexpr int kTooLarge = 3;
inline constexpr int kVerificationFailed = 4;
inline constexpr int kCaptured = 5;
inline constexpr int kTimeout = 6;  // also LeftArena
inline constexpr int kSolverFailure = 7;
}  // namespace exit_code

struct RunManifest {
  std::string command;
  std::string config_path;
  std::string input_digest;  // FNV-1a of the input file bytes
  std::vector<std::string> outputs;
  std::uint64_t seed = 0;
  std::string version = kToolkitVersion;
  std::vector<std::pair<std::string, double>> timings;  // seconds, not hashed

  /// 16 hex digits over everything except timings.
  std::string hash() const;
  std::string to_text() const;
};

std::string fnv1a_hex(const std::string& bytes);

/// One SVG: per trace an arena panel above a distance-vs-time panel, traces
/// side by side.
std::string render_svg(const std::vector<Trace>& traces, const EnvironmentConfig& cfg,
                       const std::string& manifest_hash = "");

int run_cli(int argc, const char* const* argv);

}  // namespace evadesos
