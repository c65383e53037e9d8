#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rydgate/gate.hpp"

namespace rydgate {

/// Identifies a reproducible random stream. Identical (seed, stream_id)
/// produce the identical draw sequence regardless of platform, run, or
/// evaluation order; substream() derives child streams so that sample j of
/// scan point i owns its own independent stream.
struct RngSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  RngSpec substream(std::uint64_t index) const;
};

/// Counter-based generator: a SplitMix64 walk keyed by hashing
/// (seed, stream_id). Gaussian draws use Box-Muller on the uniform output.
class CounterRng {
 public:
  explicit CounterRng(const RngSpec& spec);

  std::uint64_t next_u64();
  double uniform01();  // [0, 1)
  double gaussian();   // standard normal

 private:
  std::uint64_t state_;
};

/// One draw from the 1-D Maxwell-Boltzmann marginal: Gaussian with mean 0
/// and sigma = sqrt(k_B T / m). T = 0 returns exactly 0.
double sample_axial_velocity(double temperature, double mass,
                             const RngSpec& rng);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares. Throws std::invalid_argument when all xs are
/// identical; R^2 = 1 by convention when the data are exactly constant
/// (SS_tot = SS_res = 0).
LinearFit linear_fit(const std::vector<double>& xs,
                     const std::vector<double>& ys);

struct ScanRow {
  double x = 0.0;
  double mean_error = 0.0;
  double std_error = 0.0;  // standard error of the mean
  int n_samples = 0;
};

struct ScanTable {
  std::vector<ScanRow> rows;  // sorted by x
  std::optional<LinearFit> fit;

  /// `x, mean_error, stderr, n` rows plus a trailing
  /// `# fit: slope=..., intercept=..., r2=...` comment when fitted.
  std::string to_csv() const;
  nlohmann::json to_json() const;
};

enum class VelocityScanMode { BothAtoms, ControlOnly };

std::string to_string(VelocityScanMode m);
VelocityScanMode velocity_scan_mode_from_string(const std::string& s);

/// Deterministic gate error per velocity (n=1, stderr=0); the propagation
/// configuration comes from the base scenario.
ScanTable scan_velocity(const GateScenario& base,
                        const std::vector<double>& velocities,
                        VelocityScanMode mode);

/// Monte-Carlo over thermal (v_c, v_t) pairs at each temperature; both
/// atoms are drawn independently. Includes a linear fit of mean error vs T.
ScanTable scan_temperature(const GateScenario& base,
                           const std::vector<double>& temperatures,
                           int n_samples, const RngSpec& rng);

/// Monte-Carlo at fixed temperature over a decay-rate grid; linear fit of
/// mean error vs gamma.
ScanTable scan_decay(const GateScenario& base,
                     const std::vector<double>& gammas, double temperature,
                     int n_samples, const RngSpec& rng);

/// Deterministic error per Forster coupling B at v = 0, gamma = 0.
ScanTable scan_blockade(const GateScenario& base,
                        const std::vector<double>& b_values);

}  // namespace rydgate
