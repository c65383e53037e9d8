#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rydgate/gate.hpp"
#include "rydgate/physics.hpp"
#include "rydgate/waveform.hpp"

namespace rydgate {

enum class InitialGuess { PaperSeed, AdiabaticSketch, Random };

std::string to_string(InitialGuess g);
InitialGuess initial_guess_from_string(const std::string& s);

/// Waveform search configuration. The parameter vector is
/// (beta_1..beta_u, Delta_0) where u = n-1, halved by the symmetric tie
/// beta_nu = beta_{n-nu}. All frequencies rad/s, duration seconds.
struct OptimizerConfig {
  int degree = 8;
  bool symmetric = true;
  double duration = 1e-6;

  double coefficient_bound = constants::kTwoPi * 50e6;    // |beta| cap
  double detuning_min = -constants::kTwoPi * 20e6;
  double detuning_max = constants::kTwoPi * 20e6;

  InitialGuess initial = InitialGuess::PaperSeed;
  std::uint64_t random_seed = 0;

  double w_pop = 1.0;    // population-return penalty
  double w_phase = 1.0;  // controlled-PHASE condition penalty
  double w_err = 1.0;    // direct dual-pulse 1-F term

  long max_evals = 5000;
  double target_objective = 0.0;
  double simplex_f_tol = 1e-14;
  double simplex_x_tol = 1e-9;  // relative to the initial step sizes

  // integration control for objective evaluations; max_step 0 means
  // duration/100
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = 0.0;

  int dimension() const;
  void validate() const;

  /// Expands a parameter vector into the waveform it describes.
  PulseWaveform build_waveform(const std::vector<double>& params) const;
};

enum class Termination { TargetReached, MaxEvals, Converged };

std::string to_string(Termination t);

struct OptimizationReport {
  std::vector<double> best_params;
  double best_objective = 0.0;
  long evaluations = 0;
  std::vector<std::pair<long, double>> trace;  // (eval index, best so far)
  Termination termination = Termination::Converged;

  PulseWaveform best_waveform(const OptimizerConfig& cfg) const {
    return cfg.build_waveform(best_params);
  }
  nlohmann::json to_json(const OptimizerConfig& cfg) const;
};

/// Search objective at v = 0, gamma = 0:
///   w_pop  * sum over channels of (1 - P_return)        [one pulse]
///   w_phase * d(2(phi_01 + phi_10 - phi_00), +-pi)^2    [one pulse]
///   w_err  * (1 - F)                                    [dual pulse]
/// with d the circular distance. Integration failures return the 1e6
/// penalty sentinel instead of throwing so searches can continue.
double objective(const std::vector<double>& params, const OptimizerConfig& cfg,
                 const PhysicsParams& physics);

/// Nelder-Mead direct search with oriented restarts; deterministic for
/// identical configuration. Stops on target_objective, max_evals, or
/// simplex collapse after the final restart.
OptimizationReport optimize_waveform(const OptimizerConfig& cfg,
                                     const PhysicsParams& physics);

/// Bell-shaped starting coefficients beta_nu ~ sin^2(pi nu / n), scaled to
/// a peak Rabi frequency of 2pi x 10 MHz. A heuristic starting point in the
/// adiabatic-return regime; returns the full list beta_1..beta_{n-1}.
std::vector<double> adiabatic_sketch(const OptimizerConfig& cfg,
                                     const PhysicsParams& physics);

/// Detuning paired with the sketch when used as an initial guess.
inline constexpr double kSketchDetuning = -constants::kTwoPi * 2e6;

}  // namespace rydgate
