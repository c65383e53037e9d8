#include "rydgate/physics.hpp"

#include <cmath>
#include <stdexcept>

namespace rydgate {

using std::complex;

void PhysicsParams::validate() const {
  if (!(forster_coupling >= 0.0) || !std::isfinite(forster_coupling))
    throw std::invalid_argument("PhysicsParams: B must be >= 0 and finite");
  if (!std::isfinite(forster_penalty))
    throw std::invalid_argument("PhysicsParams: delta_p must be finite");
  if (!(decay_rate >= 0.0) || !std::isfinite(decay_rate))
    throw std::invalid_argument("PhysicsParams: gamma must be >= 0 and finite");
  if (!(wavelength > 0.0) || !std::isfinite(wavelength))
    throw std::invalid_argument("PhysicsParams: wavelength must be positive");
  if (!(atom_mass > 0.0) || !std::isfinite(atom_mass))
    throw std::invalid_argument("PhysicsParams: atom mass must be positive");
}

PhysicsParams PhysicsParams::defaults(Species species) {
  PhysicsParams p;
  p.forster_coupling = constants::kTwoPi * 500e6;
  p.forster_penalty = constants::kTwoPi * -3e6;
  p.decay_rate = 0.0;
  switch (species) {
    case Species::Rb87:
      p.wavelength = 297e-9;
      p.atom_mass = 86.909 * constants::kAtomicMassUnit;
      break;
    case Species::Cs133:
      p.wavelength = 319e-9;
      p.atom_mass = 132.905 * constants::kAtomicMassUnit;
      break;
  }
  return p;
}

double doppler_shift(const PhysicsParams& params, double v) {
  return params.wave_number() * v;
}

Eigen::MatrixXcd ChannelSystem::hamiltonian(double omega) const {
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dimension, dimension);
  h.diagonal() = diagonal;
  for (const auto& sc : static_couplings) {
    h(sc.row, sc.col) += sc.value;
    h(sc.col, sc.row) += sc.value;
  }
  for (const auto& dc : drive) {
    h(dc.row, dc.col) += dc.scale * omega;
    h(dc.col, dc.row) += dc.scale * omega;
  }
  return h;
}

ChannelSystem build_single_channel(const PhysicsParams& params, double delta0,
                                   double v, int k_sign) {
  if (k_sign != 1 && k_sign != -1)
    throw std::invalid_argument("build_single_channel: k_sign must be +1 or -1");
  params.validate();
  ChannelSystem sys;
  sys.dimension = 2;
  sys.diagonal = Eigen::VectorXcd::Zero(2);
  sys.diagonal(1) = complex<double>(delta0 + k_sign * doppler_shift(params, v),
                                    -0.5 * params.decay_rate);
  sys.drive = {{0, 1, 0.5}};
  sys.basis_labels = {"g", "r"};
  return sys;
}

ChannelSystem build_double_channel(const PhysicsParams& params, double delta0,
                                   double v_control, double v_target,
                                   int k_sign) {
  if (k_sign != 1 && k_sign != -1)
    throw std::invalid_argument("build_double_channel: k_sign must be +1 or -1");
  params.validate();
  const double dc = k_sign * doppler_shift(params, v_control);
  const double dt = k_sign * doppler_shift(params, v_target);
  const double g = params.decay_rate;

  ChannelSystem sys;
  sys.dimension = 5;
  sys.diagonal = Eigen::VectorXcd::Zero(5);
  sys.diagonal(1) = complex<double>(delta0 + dc, -0.5 * g);
  sys.diagonal(2) = complex<double>(delta0 + dt, -0.5 * g);
  sys.diagonal(3) = complex<double>(2.0 * delta0 + dc + dt, -g);
  sys.diagonal(4) =
      complex<double>(2.0 * delta0 + dc + dt + params.forster_penalty, -g);
  sys.drive = {{0, 1, 0.5}, {0, 2, 0.5}, {1, 3, 0.5}, {2, 3, 0.5}};
  sys.static_couplings = {{3, 4, params.forster_coupling}};
  sys.basis_labels = {"00", "r0", "0r'", "rr'", "pp'"};
  return sys;
}

ChannelSystem build_channel_11() {
  ChannelSystem sys;
  sys.dimension = 1;
  sys.diagonal = Eigen::VectorXcd::Zero(1);
  sys.basis_labels = {"11"};
  return sys;
}

}  // namespace rydgate
