#include "rydgate/gate.hpp"

#include <cmath>
#include <stdexcept>

#include "rydgate/parallel.hpp"

namespace rydgate {

namespace {

using std::complex;

constexpr std::array<complex<double>, 4> kTargetCz{
    {{1, 0}, {1, 0}, {1, 0}, {-1, 0}}};
constexpr std::array<complex<double>, 4> kTargetCzFlipped{
    {{-1, 0}, {1, 0}, {1, 0}, {1, 0}}};

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * M_PI);  // (-pi, pi] up to the -pi edge
  if (a <= -M_PI) a += 2.0 * M_PI;
  return a;
}

double fidelity_with(const ChannelAmplitudes& diag, double theta_c,
                     double theta_t,
                     const std::array<complex<double>, 4>& target) {
  const complex<double> rot[4] = {
      {1.0, 0.0},
      std::polar(1.0, theta_t),
      std::polar(1.0, theta_c),
      std::polar(1.0, theta_c + theta_t)};
  double tr_mmdag = 0.0;
  complex<double> tr_m = 0.0;
  for (int i = 0; i < 4; ++i) {
    const complex<double> m = std::conj(target[i]) * rot[i] * diag[i];
    tr_mmdag += std::norm(m);
    tr_m += m;
  }
  return (tr_mmdag + std::norm(tr_m)) / 20.0;
}

// Alternating exact maximization of |a + b z_t + c z_c + d z_c z_t| over
// unit z_c, z_t; for fixed z_c the optimum z_t has closed form (and vice
// versa), and each half-step is monotone in F.
LocalPhases maximize_against(const ChannelAmplitudes& diag,
                             const std::array<complex<double>, 4>& target) {
  const complex<double> a = std::conj(target[0]) * diag[0];
  const complex<double> b = std::conj(target[1]) * diag[1];
  const complex<double> c = std::conj(target[2]) * diag[2];
  const complex<double> d = std::conj(target[3]) * diag[3];

  LocalPhases best;
  best.fidelity = -1.0;
  // analytic seed (phase zeroing) plus a coarse grid to pick the basin
  std::vector<double> seeds{-std::arg(diag[2]) + std::arg(diag[3]),
                            -std::arg(diag[2]) + std::arg(diag[3]) + M_PI};
  for (int i = 0; i < 16; ++i) seeds.push_back(-M_PI + i * (M_PI / 8.0));

  for (double theta_c : seeds) {
    double theta_t = 0.0, f_prev = -1.0, f = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
      const complex<double> zc = std::polar(1.0, theta_c);
      theta_t = std::arg(a + c * zc) - std::arg(b + d * zc);
      const complex<double> zt = std::polar(1.0, theta_t);
      theta_c = std::arg(a + b * zt) - std::arg(c + d * zt);
      f = fidelity_with(diag, theta_c, theta_t, target);
      if (std::abs(f - f_prev) < 1e-12) break;
      f_prev = f;
    }
    if (f > best.fidelity) {
      best.fidelity = f;
      best.theta_c = wrap_angle(theta_c);
      best.theta_t = wrap_angle(theta_t);
    }
  }
  return best;
}

Tolerances gap_tolerances(const Tolerances& tol, double gap_time) {
  Tolerances g = tol;
  g.max_step = std::min(tol.max_step, gap_time / 10.0);
  return g;
}

}  // namespace

std::string to_string(Propagation p) {
  return p == Propagation::CoPropagating ? "co_propagating"
                                         : "counter_propagating";
}

Propagation propagation_from_string(const std::string& s) {
  if (s == "co_propagating") return Propagation::CoPropagating;
  if (s == "counter_propagating") return Propagation::CounterPropagating;
  throw std::invalid_argument("unknown propagation '" + s +
                              "'; accepted: co_propagating, counter_propagating");
}

ChannelAmplitudes simulate_pulse(const GateScenario& scenario, int k_sign,
                                 const Tolerances& tol) {
  const double delta0 = scenario.waveform.detuning();
  const auto sys00 = build_double_channel(scenario.physics, delta0,
                                          scenario.v_control,
                                          scenario.v_target, k_sign);
  const auto sys01 = build_single_channel(scenario.physics, delta0,
                                          scenario.v_control, k_sign);
  const auto sys10 = build_single_channel(scenario.physics, delta0,
                                          scenario.v_target, k_sign);

  const ChannelSystem* systems[3] = {&sys00, &sys01, &sys10};
  ChannelAmplitudes out;
  out[3] = 1.0;  // |11> never participates
  parallel_for(3, [&](std::size_t i) {
    State psi0 = State::Zero(systems[i]->dimension);
    psi0(0) = 1.0;
    out[i] = evolve(*systems[i], scenario.waveform, psi0, tol)(0);
  });
  return out;
}

ChannelAmplitudes compose_dual_pulse(const GateScenario& scenario,
                                     const Tolerances& tol) {
  if (!(scenario.gap_time >= 0.0) || !std::isfinite(scenario.gap_time))
    throw std::invalid_argument("compose_dual_pulse: gap_time must be finite and >= 0");
  const double delta0 = scenario.waveform.detuning();
  const int k2 =
      scenario.propagation == Propagation::CoPropagating ? +1 : -1;

  auto run_channel = [&](const ChannelSystem& sys1, const ChannelSystem& sys2,
                         int dim) -> complex<double> {
    State psi = State::Zero(dim);
    psi(0) = 1.0;
    psi = evolve(sys1, scenario.waveform, psi, tol);
    if (scenario.gap_time > 0.0) {
      // gap: drive-free evolution in the first pulse's frame
      psi = evolve_envelope(sys1, [](double) { return 0.0; },
                            scenario.gap_time, psi,
                            gap_tolerances(tol, scenario.gap_time));
    }
    psi = evolve(sys2, scenario.waveform, psi, tol);
    return psi(0);
  };

  ChannelAmplitudes out;
  out[3] = 1.0;
  parallel_for(3, [&](std::size_t i) {
    switch (i) {
      case 0:
        out[0] = run_channel(
            build_double_channel(scenario.physics, delta0, scenario.v_control,
                                 scenario.v_target, +1),
            build_double_channel(scenario.physics, delta0, scenario.v_control,
                                 scenario.v_target, k2),
            5);
        break;
      case 1:
        out[1] = run_channel(
            build_single_channel(scenario.physics, delta0, scenario.v_control,
                                 +1),
            build_single_channel(scenario.physics, delta0, scenario.v_control,
                                 k2),
            2);
        break;
      case 2:
        out[2] = run_channel(
            build_single_channel(scenario.physics, delta0, scenario.v_target,
                                 +1),
            build_single_channel(scenario.physics, delta0, scenario.v_target,
                                 k2),
            2);
        break;
    }
  });
  return out;
}

double fidelity_from_diag(const ChannelAmplitudes& diag) {
  return fidelity_with(diag, 0.0, 0.0, kTargetCz);
}

LocalPhases optimize_local_phases(const ChannelAmplitudes& diag) {
  const LocalPhases cz = maximize_against(diag, kTargetCz);
  const LocalPhases flipped = maximize_against(diag, kTargetCzFlipped);
  return flipped.fidelity > cz.fidelity ? flipped : cz;
}

GateResult gate_error(const GateScenario& scenario) {
  return gate_error(scenario, Tolerances::defaults(scenario.waveform.duration()));
}

GateResult gate_error(const GateScenario& scenario, const Tolerances& tol) {
  GateResult r;
  r.diag = compose_dual_pulse(scenario, tol);
  for (int i = 0; i < 4; ++i) {
    double phase = std::arg(r.diag[i]);
    if (phase <= -M_PI) phase += 2.0 * M_PI;
    r.phases[i] = phase;
  }
  const LocalPhases local = optimize_local_phases(r.diag);
  r.theta_c = local.theta_c;
  r.theta_t = local.theta_t;
  r.fidelity = local.fidelity;
  r.error = 1.0 - local.fidelity;
  return r;
}

UnitsMode resolve_paper_units(const PhysicsParams& physics) {
  double best_return = -1.0;
  UnitsMode best_mode = UnitsMode::TwoPiMegahertz;
  for (UnitsMode mode :
       {UnitsMode::PlainMegahertz, UnitsMode::TwoPiMegahertz}) {
    GateScenario sc{make_paper_waveform(mode), physics};
    const Tolerances tol = Tolerances::defaults(sc.waveform.duration());
    const ChannelAmplitudes amps = simulate_pulse(sc, +1, tol);
    double worst = 1.0;
    for (int i = 0; i < 3; ++i) worst = std::min(worst, std::norm(amps[i]));
    if (worst > best_return) {
      best_return = worst;
      best_mode = mode;
    }
  }
  return best_mode;
}

nlohmann::json gate_result_to_json(const GateResult& result,
                                   const GateScenario& scenario) {
  nlohmann::json j;
  j["diag_moduli"] = {std::abs(result.diag[0]), std::abs(result.diag[1]),
                      std::abs(result.diag[2]), std::abs(result.diag[3])};
  j["phases_rad"] = result.phases;
  j["theta_c_rad"] = result.theta_c;
  j["theta_t_rad"] = result.theta_t;
  j["fidelity"] = result.fidelity;
  j["error"] = result.error;
  j["scenario"] = {
      {"v_control_m_per_s", scenario.v_control},
      {"v_target_m_per_s", scenario.v_target},
      {"propagation", to_string(scenario.propagation)},
      {"gap_time_s", scenario.gap_time},
      {"physics",
       {{"B_rad_per_s", scenario.physics.forster_coupling},
        {"delta_p_rad_per_s", scenario.physics.forster_penalty},
        {"gamma_per_s", scenario.physics.decay_rate},
        {"wavelength_m", scenario.physics.wavelength},
        {"atom_mass_kg", scenario.physics.atom_mass}}},
      {"waveform",
       {{"degree", scenario.waveform.degree()},
        {"coefficients_rad_per_s", scenario.waveform.coefficients()},
        {"detuning_rad_per_s", scenario.waveform.detuning()},
        {"duration_s", scenario.waveform.duration()}}}};
  return j;
}

}  // namespace rydgate
