#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rydgate {

namespace constants {
inline constexpr double kBoltzmann = 1.380649e-23;       // J/K (exact SI)
inline constexpr double kAtomicMassUnit = 1.66053906660e-27;  // kg
inline constexpr double kTwoPi = 6.283185307179586476925286766559;
}  // namespace constants

enum class Species { Rb87, Cs133 };

/// Static parameters of the two-atom Rydberg system: the Forster coupling
/// |rr'> <-> |pp'> (strength B, penalty delta_p), the per-atom Rydberg decay
/// rate, and the driving-light wave number / atom mass that set the velocity
/// sensitivity. Frequencies are angular (rad/s).
struct PhysicsParams {
  double forster_coupling = 0.0;  // B, rad/s, >= 0
  double forster_penalty = 0.0;   // delta_p, rad/s, may be negative
  double decay_rate = 0.0;        // gamma, 1/s, per Rydberg-excited atom
  double wavelength = 297e-9;     // m, of the ground-Rydberg driving light
  double atom_mass = 86.909 * constants::kAtomicMassUnit;  // kg

  double wave_number() const { return constants::kTwoPi / wavelength; }

  void validate() const;

  /// Reference Forster parameters (B = 2pi x 500 MHz, delta_p = 2pi x -3 MHz)
  /// with the standard single-photon uv transition for the given species.
  static PhysicsParams defaults(Species species);
};

/// Doppler detuning k*v seen by an atom moving with axial velocity v.
double doppler_shift(const PhysicsParams& params, double v);

/// One computational-basis channel as a small time-dependent Hamiltonian
///   H(t) = diag + static couplings + Omega_s(t) * drive pattern,
/// where each drive entry (r, c) contributes scale * Omega_s(t) to H(r,c)
/// and its conjugate to H(c,r). Hermitian whenever decay_rate = 0.
/// Index 0 is always the computational ground state of the channel.
struct ChannelSystem {
  struct DriveCoupling {
    int row, col;
    double scale;  // element = scale * Omega_s(t)
  };
  struct StaticCoupling {
    int row, col;
    double value;  // rad/s
  };

  int dimension = 0;
  Eigen::VectorXcd diagonal;  // rad/s; -i*gamma terms live here
  std::vector<DriveCoupling> drive;
  std::vector<StaticCoupling> static_couplings;
  std::vector<std::string> basis_labels;

  /// Dense H(t) for a given envelope value (rad/s). Mostly for tests and
  /// the fixed-step oracle; the propagator applies the pattern directly.
  Eigen::MatrixXcd hamiltonian(double omega) const;
};

/// 2-state channel (|01> or |10>): ground state plus the driven Rydberg
/// state at detuning delta0 + k_sign * k * v, with drive element
/// Omega_s(t)/2 (stated Rabi frequency Omega enters as Omega/2).
ChannelSystem build_single_channel(const PhysicsParams& params, double delta0,
                                   double v, int k_sign);

/// 5-state channel for |00> on basis (|00>, |r0>, |0r'>, |rr'>, |pp'>):
/// drive elements Omega_s(t)/2 on (0,1), (0,2), (1,3), (2,3), static
/// coupling B on (3,4), Doppler shifts per excited atom, decay -i*gamma/2
/// per Rydberg-excited atom.
ChannelSystem build_double_channel(const PhysicsParams& params, double delta0,
                                   double v_control, double v_target,
                                   int k_sign);

/// |11> does not participate: a 1-state system with zero Hamiltonian.
ChannelSystem build_channel_11();

}  // namespace rydgate
