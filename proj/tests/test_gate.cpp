#include <doctest.h>

#include <cmath>
#include <random>

#include "rydgate/gate.hpp"

using namespace rydgate;
using std::complex;

namespace {

GateScenario paper_scenario() {
  return GateScenario{make_paper_waveform(UnitsMode::TwoPiMegahertz),
                      PhysicsParams::defaults(Species::Rb87)};
}

Tolerances default_tol() { return Tolerances::defaults(1e-6); }

complex<double> unit(double phase) { return std::polar(1.0, phase); }

// exhaustive 2-D maximization over the local angles, as a slow reference
// for optimize_local_phases
double brute_force_fidelity(const ChannelAmplitudes& diag) {
  double best = 0.0;
  constexpr int kGrid = 600;
  for (int ic = 0; ic < kGrid; ++ic) {
    const double thc = -M_PI + ic * (2 * M_PI / kGrid);
    for (int it = 0; it < kGrid; ++it) {
      const double tht = -M_PI + it * (2 * M_PI / kGrid);
      ChannelAmplitudes rotated = diag;
      rotated[1] *= unit(tht);
      rotated[2] *= unit(thc);
      rotated[3] *= unit(thc + tht);
      best = std::max(best, fidelity_from_diag(rotated));
      rotated[0] = -rotated[0];  // flipped C-Z convention, same grid point
      rotated[3] = -rotated[3];
      best = std::max(best, fidelity_from_diag(rotated));
    }
  }
  return best;
}

}  // namespace

TEST_SUITE_BEGIN("gate");

TEST_CASE("fidelity formula anchors") {
  CHECK(fidelity_from_diag({1.0, 1.0, 1.0, -1.0}) == doctest::Approx(1.0));
  CHECK(fidelity_from_diag({1.0, 1.0, 1.0, 1.0}) == doctest::Approx(0.4));
  CHECK(fidelity_from_diag({0.0, 0.0, 0.0, 0.0}) == 0.0);
}

TEST_CASE("fidelity bounds and global-phase invariance") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> mod(0.0, 1.0);
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);
  for (int trial = 0; trial < 200; ++trial) {
    ChannelAmplitudes d;
    for (auto& a : d) a = mod(rng) * unit(ang(rng));
    const double f = fidelity_from_diag(d);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0 + 1e-12);
    const complex<double> global = unit(ang(rng));
    ChannelAmplitudes dg = d;
    for (auto& a : dg) a *= global;
    CHECK(fidelity_from_diag(dg) == doctest::Approx(f).epsilon(1e-12));
  }
}

TEST_CASE("local phase optimization") {
  SUBCASE("ideal C-Z needs no rotation") {
    const LocalPhases lp = optimize_local_phases({1.0, 1.0, 1.0, -1.0});
    CHECK(lp.fidelity == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::remainder(lp.theta_c, 2 * M_PI) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(std::remainder(lp.theta_t, 2 * M_PI) == doctest::Approx(0.0).epsilon(1e-9));
  }

  SUBCASE("any diag satisfying the phase condition reaches F = 1") {
    // phi01 + phi10 - phi00 = pi with phi11 = 0: local rotations plus a
    // global phase turn these into an exact C-Z
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> ang(-M_PI, M_PI);
    for (int trial = 0; trial < 50; ++trial) {
      const double alpha = ang(rng), beta = ang(rng);
      const ChannelAmplitudes d = {unit(alpha + beta - M_PI), unit(alpha),
                                   unit(beta), 1.0};
      const LocalPhases lp = optimize_local_phases(d);
      CHECK(lp.fidelity == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  SUBCASE("error grows quadratically in the phase-condition violation") {
    const double chi = 1e-3;
    auto with_violation = [&](double c) -> ChannelAmplitudes {
      // phi01 + phi10 - phi00 = pi + c with unit moduli
      return {unit(-0.3), unit(0.9), unit(M_PI - 0.3 - 0.9 + c), 1.0};
    };
    const double e1 = 1.0 - optimize_local_phases(with_violation(chi)).fidelity;
    const double e2 = 1.0 - optimize_local_phases(with_violation(2 * chi)).fidelity;
    CHECK(e2 / e1 == doctest::Approx(4.0).epsilon(0.02));
  }

  SUBCASE("matches brute-force grid maximization") {
    std::mt19937 rng(5150);
    std::uniform_real_distribution<double> mod(0.6, 1.0);
    std::uniform_real_distribution<double> ang(-M_PI, M_PI);
    for (int trial = 0; trial < 4; ++trial) {
      ChannelAmplitudes d;
      for (auto& a : d) a = mod(rng) * unit(ang(rng));
      const double fast = optimize_local_phases(d).fidelity;
      const double slow = brute_force_fidelity(d);
      CHECK(fast >= slow - 1e-4);  // grid resolution limits the reference
    }
  }
}

TEST_CASE("simulate_pulse basics") {
  const Tolerances tol = default_tol();

  SUBCASE("zero drive leaves every channel amplitude at exactly 1") {
    GateScenario sc = paper_scenario();
    sc.waveform = PulseWaveform(8, {0, 0, 0, 0, 0, 0, 0}, 0.0, 1e-6);
    const ChannelAmplitudes amps = simulate_pulse(sc, +1, tol);
    for (const auto& a : amps) CHECK(a == complex<double>(1.0, 0.0));
  }

  SUBCASE("paper waveform returns all channels with >= 0.999 population") {
    const ChannelAmplitudes amps = simulate_pulse(paper_scenario(), +1, tol);
    for (int i = 0; i < 3; ++i) CHECK(std::norm(amps[i]) >= 0.999);
    CHECK(amps[3] == complex<double>(1.0, 0.0));
  }
}

TEST_CASE("units resolution picks the interpretation with unity return") {
  CHECK(resolve_paper_units(PhysicsParams::defaults(Species::Rb87)) ==
        UnitsMode::TwoPiMegahertz);
}

TEST_CASE("dual pulse composition") {
  const Tolerances tol = default_tol();

  SUBCASE("co and counter are identical at v = 0") {
    GateScenario sc = paper_scenario();
    sc.propagation = Propagation::CounterPropagating;
    const ChannelAmplitudes counter = compose_dual_pulse(sc, tol);
    sc.propagation = Propagation::CoPropagating;
    const ChannelAmplitudes co = compose_dual_pulse(sc, tol);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(counter[i] - co[i]) < 1e-12);
  }

  SUBCASE("gap time is immaterial for a well-converged waveform") {
    GateScenario sc = paper_scenario();
    const ChannelAmplitudes no_gap = compose_dual_pulse(sc, tol);
    sc.gap_time = 100e-9;
    const ChannelAmplitudes gap = compose_dual_pulse(sc, tol);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(no_gap[i] - gap[i]) < 1e-6);
  }

  SUBCASE("channel phases double relative to one pulse at v = 0") {
    GateScenario sc = paper_scenario();
    const ChannelAmplitudes single = simulate_pulse(sc, +1, tol);
    const ChannelAmplitudes dual = compose_dual_pulse(sc, tol);
    for (int i = 0; i < 3; ++i) {
      const double doubled = std::remainder(2 * std::arg(single[i]), 2 * M_PI);
      const double got = std::remainder(std::arg(dual[i]), 2 * M_PI);
      CHECK(std::abs(std::remainder(doubled - got, 2 * M_PI)) < 1e-5);
    }
  }

  SUBCASE("gap_time must be finite and non-negative") {
    GateScenario sc = paper_scenario();
    sc.gap_time = -1e-9;
    CHECK_THROWS_AS(compose_dual_pulse(sc, tol), std::invalid_argument);
  }
}

TEST_CASE("zero-velocity gate error is far below 1e-4") {
  const GateResult r = gate_error(paper_scenario());
  CHECK(r.error < 1e-4);
  CHECK(r.fidelity > 1.0 - 1e-4);
  CHECK(r.diag[3] == complex<double>(1.0, 0.0));  // U11 = 1 exactly
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(r.diag[i]) <= 1.0 + 1e-9);
    CHECK(r.phases[i] == std::arg(r.diag[i]));
  }
  MESSAGE("baseline gate error eps0 = ", r.error);
}

TEST_CASE("velocity-sign and exchange symmetry") {
  // Sign symmetry is exact for the counter-propagating configuration: with
  // a time-symmetric envelope and real H the dual-pulse operator satisfies
  // M(-v) = M(v)^T, which fixes the ground-state amplitudes. It is NOT a
  // symmetry of the co-propagating configuration (odd first*second-order
  // phase cross terms survive), so only counter is asserted here.
  {
    GateScenario sc = paper_scenario();
    sc.propagation = Propagation::CounterPropagating;
    sc.v_control = 0.006;
    sc.v_target = -0.002;
    const double e1 = gate_error(sc).error;
    GateScenario neg = sc;
    neg.v_control = -sc.v_control;
    neg.v_target = -sc.v_target;
    CHECK(gate_error(neg).error ==
          doctest::Approx(e1).epsilon(1e-8).scale(1.0));
  }

  // exchange symmetry holds for both configurations
  for (auto prop :
       {Propagation::CounterPropagating, Propagation::CoPropagating}) {
    GateScenario sc = paper_scenario();
    sc.propagation = prop;
    sc.v_control = 0.006;
    sc.v_target = -0.002;
    const double e1 = gate_error(sc).error;
    GateScenario swapped = sc;
    std::swap(swapped.v_control, swapped.v_target);
    CHECK(gate_error(swapped).error ==
          doctest::Approx(e1).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("counter-propagating Doppler error is quadratic in v") {
  GateScenario sc = paper_scenario();
  const double kvt = 0.02;  // k v T_g
  const double v1 =
      kvt / (sc.physics.wave_number() * sc.waveform.duration());
  const double e0 = gate_error(sc).error;
  sc.v_control = sc.v_target = v1;
  const double e1 = gate_error(sc).error;
  sc.v_control = sc.v_target = 2 * v1;
  const double e2 = gate_error(sc).error;
  const double ratio = (e2 - e0) / (e1 - e0);
  CHECK(ratio >= 3.2);
  CHECK(ratio <= 4.8);
}

TEST_CASE("blockade-strength insensitivity") {
  // the error stays far below 1e-3 across the blockade range; the measured
  // max/min ratio is recorded by acceptance criterion 9
  for (double b_mhz : {250.0, 500.0, 1000.0}) {
    GateScenario sc = paper_scenario();
    sc.physics.forster_coupling = constants::kTwoPi * b_mhz * 1e6;
    const double e = gate_error(sc).error;
    CHECK(e < 1e-3);
  }
}

TEST_CASE("gate result serialization") {
  const GateScenario sc = paper_scenario();
  const GateResult r = gate_error(sc);
  const nlohmann::json j = gate_result_to_json(r, sc);
  CHECK(j["fidelity"].get<double>() == r.fidelity);
  CHECK(j["error"].get<double>() == r.error);
  CHECK(j["scenario"]["propagation"] == "counter_propagating");
  CHECK(j["scenario"]["waveform"]["degree"] == 8);
  CHECK(j["diag_moduli"].size() == 4);
}

TEST_SUITE_END();
