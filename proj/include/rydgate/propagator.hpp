#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rydgate/physics.hpp"
#include "rydgate/waveform.hpp"

namespace rydgate {

using State = Eigen::VectorXcd;

/// Local error control for the adaptive integrator. max_step is absolute
/// (seconds); defaults() ties it to the pulse duration (T_g / 100).
struct Tolerances {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = 1e-8;

  static Tolerances defaults(double duration) {
    return Tolerances{1e-10, 1e-12, duration / 100.0};
  }
  void validate() const;
};

/// Thrown when the step size underflows (stiff failure); carries the time
/// at which integration stalled.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

using Envelope = std::function<double(double)>;

/// psi(T_g) from i dpsi/dt = H(t) psi via embedded Dormand-Prince 5(4)
/// with local error control at (rel_tol, abs_tol). Deterministic for
/// identical inputs. Throws IntegrationError on step underflow and
/// std::invalid_argument on dimension mismatch.
State evolve(const ChannelSystem& system, const PulseWaveform& waveform,
             const State& psi0, const Tolerances& tol);

/// Same integrator with an arbitrary envelope over [0, duration]; used for
/// analytic test envelopes, sub-interval composition, and drive-free gaps.
State evolve_envelope(const ChannelSystem& system, const Envelope& envelope,
                      double duration, const State& psi0,
                      const Tolerances& tol);

struct TrajectoryPoint {
  double t;
  State psi;
};

/// Dense output at num_samples uniformly spaced times including both
/// endpoints; the final sample is the same state evolve() returns.
std::vector<TrajectoryPoint> evolve_trajectory(const ChannelSystem& system,
                                               const PulseWaveform& waveform,
                                               const State& psi0,
                                               const Tolerances& tol,
                                               int num_samples);

/// (|a0|^2, arg a0) of the ground-state amplitude; phase in (-pi, pi].
/// Throws std::domain_error when the population is below 1e-12.
std::pair<double, double> ground_phase(const State& psi);

/// Fixed-step classical RK4 with `steps` uniform steps (steps >= 10^4).
/// Brute-force cross-check for evolve(); builds the dense Hamiltonian from
/// the ChannelSystem directly and shares no stepping code with it.
State oracle_evolve(const ChannelSystem& system, const PulseWaveform& waveform,
                    const State& psi0, long steps);

/// CSV export: header `t_us, pop_<label>..., phase_ground_rad, norm`, one
/// row per sample. The ground phase is unwrapped by nearest-branch
/// continuation between consecutive samples.
std::string trajectory_csv(const ChannelSystem& system,
                           const std::vector<TrajectoryPoint>& trajectory);

}  // namespace rydgate
