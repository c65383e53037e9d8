#include <doctest.h>

#include <cmath>

#include "rydgate/gate.hpp"
#include "rydgate/optimizer.hpp"

using namespace rydgate;

namespace {

PhysicsParams rb() { return PhysicsParams::defaults(Species::Rb87); }

std::vector<double> paper_params() {
  return {constants::kTwoPi * 0.794e6, 0.0, constants::kTwoPi * 5.841e6,
          constants::kTwoPi * 9.725e6, -constants::kTwoPi * 2.360e6};
}

}  // namespace

TEST_SUITE_BEGIN("optimizer");

TEST_CASE("config validation and parameter expansion") {
  OptimizerConfig cfg;
  CHECK(cfg.dimension() == 5);  // beta_1..beta_4 + Delta_0 for n = 8
  cfg.symmetric = false;
  CHECK(cfg.dimension() == 8);

  cfg = OptimizerConfig{};
  const PulseWaveform w = cfg.build_waveform(paper_params());
  CHECK(w.coefficients()[0] == w.coefficients()[6]);
  CHECK(w.coefficients()[2] == w.coefficients()[4]);
  CHECK(w.coefficients()[2] == doctest::Approx(constants::kTwoPi * 5.841e6));
  CHECK(w.detuning() == doctest::Approx(-constants::kTwoPi * 2.360e6));

  CHECK_THROWS_AS(cfg.build_waveform({1.0, 2.0}), std::invalid_argument);

  OptimizerConfig bad = cfg;
  bad.w_pop = bad.w_phase = bad.w_err = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.detuning_min = bad.detuning_max;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.max_evals = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("objective anchors") {
  const OptimizerConfig cfg;

  SUBCASE("zero drive: pure phase penalty plus identity-gate infidelity") {
    // the F term runs the full dual-pulse pipeline including the local
    // phase rotation, which lifts the identity gate from F = 0.4 to 0.6
    // (theta_c = theta_t = pi/2), so the term contributes 0.4
    const double f0 = objective({0, 0, 0, 0, 0}, cfg, rb());
    CHECK(f0 == doctest::Approx(M_PI * M_PI + 0.4).epsilon(1e-9));
  }

  SUBCASE("published parameters are already close to a solution") {
    const double fp = objective(paper_params(), cfg, rb());
    CHECK(fp < 1e-3);
    CHECK(fp > 0.0);
  }

  SUBCASE("weights gate the individual terms") {
    OptimizerConfig only_pop = cfg;
    only_pop.w_phase = only_pop.w_err = 0.0;
    CHECK(objective({0, 0, 0, 0, 0}, only_pop, rb()) ==
          doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("adiabatic sketch") {
  const OptimizerConfig cfg;
  const std::vector<double> beta = adiabatic_sketch(cfg, rb());
  REQUIRE(beta.size() == 7);
  for (double b : beta) CHECK(b > 0.0);
  for (int nu = 1; nu <= 3; ++nu)
    CHECK(beta[nu - 1] == doctest::Approx(beta[7 - nu]).epsilon(1e-15));
  CHECK(beta[3] > beta[2]);
  CHECK(beta[2] > beta[0]);

  // peak scaled to 2pi x 10 MHz
  const PulseWaveform w(8, beta, kSketchDetuning, cfg.duration);
  CHECK(w.omega_at(cfg.duration / 2) ==
        doctest::Approx(constants::kTwoPi * 10e6).epsilon(1e-12));

  // a usable starting point: better than no drive at all
  std::vector<double> params{beta[0], beta[1], beta[2], beta[3],
                             kSketchDetuning};
  CHECK(objective(params, cfg, rb()) <
        objective({0, 0, 0, 0, 0}, cfg, rb()));

  OptimizerConfig asym = cfg;
  asym.symmetric = false;
  CHECK_THROWS_AS(adiabatic_sketch(asym, rb()), std::invalid_argument);
}

TEST_CASE("single-evaluation run echoes the initial point") {
  OptimizerConfig cfg;
  cfg.initial = InitialGuess::PaperSeed;
  cfg.max_evals = 1;
  const OptimizationReport rep = optimize_waveform(cfg, rb());
  CHECK(rep.evaluations == 1);
  CHECK(rep.termination == Termination::MaxEvals);
  const std::vector<double> expected = paper_params();
  REQUIRE(rep.best_params.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i)
    CHECK(rep.best_params[i] == doctest::Approx(expected[i]).epsilon(1e-12));
}

TEST_CASE("search is deterministic") {
  OptimizerConfig cfg;
  cfg.initial = InitialGuess::AdiabaticSketch;
  cfg.max_evals = 60;
  const OptimizationReport a = optimize_waveform(cfg, rb());
  const OptimizationReport b = optimize_waveform(cfg, rb());
  CHECK(a.best_objective == b.best_objective);
  CHECK(a.evaluations == b.evaluations);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].first == b.trace[i].first);
    CHECK(a.trace[i].second == b.trace[i].second);
  }
}

TEST_CASE("trace records strictly improving best-so-far values") {
  OptimizerConfig cfg;
  cfg.initial = InitialGuess::PaperSeed;
  cfg.max_evals = 150;
  cfg.target_objective = 1e-9;
  const OptimizationReport rep = optimize_waveform(cfg, rb());
  REQUIRE(!rep.trace.empty());
  for (std::size_t i = 1; i < rep.trace.size(); ++i) {
    CHECK(rep.trace[i].first > rep.trace[i - 1].first);
    CHECK(rep.trace[i].second < rep.trace[i - 1].second);
  }
}

TEST_CASE("paper-seeded search refines the published waveform") {
  OptimizerConfig cfg;
  cfg.initial = InitialGuess::PaperSeed;
  cfg.max_evals = 400;
  cfg.target_objective = 1e-9;
  const double initial = objective(paper_params(), cfg, rb());
  const OptimizationReport rep = optimize_waveform(cfg, rb());
  CHECK(rep.best_objective <= initial);
  CHECK(rep.best_objective < 1e-7);

  GateScenario sc{rep.best_waveform(cfg), rb()};
  CHECK(gate_error(sc).error < 1e-4);

  // bounds are honored
  for (std::size_t i = 0; i + 1 < rep.best_params.size(); ++i)
    CHECK(std::abs(rep.best_params[i]) <= cfg.coefficient_bound);
  CHECK(rep.best_params.back() >= cfg.detuning_min);
  CHECK(rep.best_params.back() <= cfg.detuning_max);
}

TEST_CASE("phase and population penalties imply the dual-pulse condition") {
  // constraint consistency: drive the pop+phase terms below 1e-8 and the
  // dual-pulse infidelity at v = 0 must come out below 1e-6
  OptimizerConfig cfg;
  cfg.initial = InitialGuess::PaperSeed;
  cfg.w_err = 0.0;
  cfg.max_evals = 4000;
  cfg.target_objective = 1e-9;
  const OptimizationReport rep = optimize_waveform(cfg, rb());
  REQUIRE(rep.best_objective < 1e-8);  // premises met

  GateScenario sc{rep.best_waveform(cfg), rb()};
  CHECK(gate_error(sc).error < 1e-6);
}

TEST_CASE("report serialization uses the waveform document schema") {
  OptimizerConfig cfg;
  cfg.initial = InitialGuess::PaperSeed;
  cfg.max_evals = 5;
  const OptimizationReport rep = optimize_waveform(cfg, rb());
  const nlohmann::json j = rep.to_json(cfg);
  CHECK(j["best_waveform"]["degree"] == 8);
  CHECK(j["best_waveform"]["units_mode"] == "two_pi_megahertz");
  CHECK(j["best_waveform"]["coefficients_MHz"].size() == 7);
  CHECK(j["termination"] == "max_evals");
  CHECK(j["evaluations"] == 5);

  // document round-trips into a buildable waveform
  const WaveformSpec spec = j["best_waveform"].get<WaveformSpec>();
  CHECK_NOTHROW(spec.build());
}

TEST_CASE("paper seed requires degree 8") {
  OptimizerConfig cfg;
  cfg.degree = 10;
  cfg.initial = InitialGuess::PaperSeed;
  CHECK_THROWS_AS(optimize_waveform(cfg, rb()), std::invalid_argument);
}

TEST_SUITE_END();
