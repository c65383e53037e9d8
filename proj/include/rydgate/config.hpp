#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rydgate/gate.hpp"
#include "rydgate/optimizer.hpp"
#include "rydgate/scans.hpp"
#include "rydgate/waveform.hpp"

namespace rydgate {

inline constexpr const char* kToolName = "rydgate";
inline constexpr const char* kToolVersion = "0.1.0";

/// Configuration problems (unknown keys, missing fields, bad values).
/// The CLI maps these to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One JSON document drives every subcommand. Parsing is strict: unknown
/// keys are rejected with a listing of the accepted ones, units are
/// converted to SI (rad/s, s, K, m/s) exactly once here.
struct RunConfig {
  PhysicsParams physics;
  std::optional<WaveformSpec> waveform;

  double v_control = 0.0;
  double v_target = 0.0;
  Propagation propagation = Propagation::CounterPropagating;
  double gap_time = 0.0;

  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step_fraction = 0.01;

  int pulse_samples = 2000;

  std::vector<double> velocities;  // m/s
  VelocityScanMode velocity_mode = VelocityScanMode::BothAtoms;
  std::vector<double> temperatures;  // K
  int n_samples = 1000;
  std::vector<double> gammas;       // 1/s
  double decay_temperature = 2e-6;  // K
  std::vector<double> blockade_values;  // rad/s

  std::optional<OptimizerConfig> optimizer;

  std::uint64_t seed = 0;
  std::string output_dir = ".";

  /// Scenario built from the parsed waveform; throws ConfigError if the
  /// document had no waveform section.
  GateScenario scenario() const;
  Tolerances tolerances(double duration) const;
};

/// Parses and validates a config document. `base_dir` resolves relative
/// waveform file references.
RunConfig parse_config(const nlohmann::json& doc, const std::string& base_dir);

/// Reads, parses, and validates a config file.
RunConfig load_config_file(const std::string& path);

/// FNV-1a 64-bit, used for deterministic output names and manifest
/// checksums.
std::uint64_t fnv1a64(const std::string& bytes);
std::string fnv1a64_hex(const std::string& bytes);

}  // namespace rydgate
