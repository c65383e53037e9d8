#include "rydgate/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "rydgate/scans.hpp"

namespace rydgate {

namespace {

constexpr double kFailurePenalty = 1e6;

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * M_PI);
  if (a <= -M_PI) a += 2.0 * M_PI;
  return a;
}

struct Bounds {
  std::vector<double> lo, hi;
  void clamp(std::vector<double>& x) const {
    for (std::size_t i = 0; i < x.size(); ++i)
      x[i] = std::clamp(x[i], lo[i], hi[i]);
  }
};

struct SearchState {
  long evals = 0;
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_x;
  std::vector<std::pair<long, double>> trace;
};

// Classic Nelder-Mead (alpha=1, gamma=2, rho=1/2, sigma=1/2) with box
// clamping. Returns true if it stopped because of max_evals/target rather
// than simplex collapse.
bool nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                 const std::vector<double>& x0,
                 const std::vector<double>& steps, const Bounds& bounds,
                 const OptimizerConfig& cfg, SearchState& st) {
  const std::size_t dim = x0.size();
  auto eval = [&](std::vector<double> x) {
    bounds.clamp(x);
    const double fx = f(x);
    ++st.evals;
    if (fx < st.best) {
      st.best = fx;
      st.best_x = x;
      st.trace.emplace_back(st.evals, fx);
    }
    return fx;
  };
  auto budget_left = [&]() {
    return st.evals < cfg.max_evals && st.best > cfg.target_objective;
  };

  std::vector<std::vector<double>> xs(dim + 1, x0);
  std::vector<double> fs(dim + 1);
  for (std::size_t i = 0; i < dim; ++i) xs[i + 1][i] += steps[i];
  for (std::size_t i = 0; i <= dim; ++i) {
    if (!budget_left()) return true;
    fs[i] = eval(xs[i]);
  }

  std::vector<std::size_t> order(dim + 1);
  while (budget_left()) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });

    const double fbest = fs[order[0]], fworst = fs[order[dim]];
    double xspread = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      const double d =
          std::abs(xs[order[dim]][i] - xs[order[0]][i]) / std::max(steps[i], 1e-300);
      xspread = std::max(xspread, d);
    }
    if (fworst - fbest <= cfg.simplex_f_tol || xspread <= cfg.simplex_x_tol)
      return false;  // collapsed

    std::vector<double> centroid(dim, 0.0);
    for (std::size_t k = 0; k < dim; ++k)
      for (std::size_t i = 0; i < dim; ++i) centroid[i] += xs[order[k]][i];
    for (double& c : centroid) c /= static_cast<double>(dim);

    auto& worst_x = xs[order[dim]];
    auto& worst_f = fs[order[dim]];
    std::vector<double> xr(dim);
    for (std::size_t i = 0; i < dim; ++i)
      xr[i] = centroid[i] + (centroid[i] - worst_x[i]);
    const double fr = eval(xr);

    if (fr < fs[order[0]]) {
      if (!budget_left()) return true;
      std::vector<double> xe(dim);
      for (std::size_t i = 0; i < dim; ++i)
        xe[i] = centroid[i] + 2.0 * (xr[i] - centroid[i]);
      const double fe = eval(xe);
      if (fe < fr) {
        worst_x = xe;
        worst_f = fe;
      } else {
        worst_x = xr;
        worst_f = fr;
      }
    } else if (fr < fs[order[dim - 1]]) {
      worst_x = xr;
      worst_f = fr;
    } else {
      if (!budget_left()) return true;
      const bool outside = fr < worst_f;
      std::vector<double> xc(dim);
      const auto& toward = outside ? xr : worst_x;
      for (std::size_t i = 0; i < dim; ++i)
        xc[i] = centroid[i] + 0.5 * (toward[i] - centroid[i]);
      const double fc = eval(xc);
      if (fc < (outside ? fr : worst_f)) {
        worst_x = xc;
        worst_f = fc;
      } else {
        // shrink toward the best vertex
        for (std::size_t k = 0; k <= dim; ++k) {
          if (order[k] == order[0]) continue;
          auto& xk = xs[order[k]];
          for (std::size_t i = 0; i < dim; ++i)
            xk[i] = xs[order[0]][i] + 0.5 * (xk[i] - xs[order[0]][i]);
          if (!budget_left()) return true;
          fs[order[k]] = eval(xk);
        }
      }
    }
  }
  return true;
}

}  // namespace

std::string to_string(InitialGuess g) {
  switch (g) {
    case InitialGuess::PaperSeed:
      return "paper_seed";
    case InitialGuess::AdiabaticSketch:
      return "adiabatic_sketch";
    case InitialGuess::Random:
      return "random";
  }
  throw std::logic_error("unreachable initial guess");
}

InitialGuess initial_guess_from_string(const std::string& s) {
  if (s == "paper_seed") return InitialGuess::PaperSeed;
  if (s == "adiabatic_sketch") return InitialGuess::AdiabaticSketch;
  if (s == "random") return InitialGuess::Random;
  throw std::invalid_argument(
      "unknown initial guess '" + s +
      "'; accepted: paper_seed, adiabatic_sketch, random");
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::TargetReached:
      return "target_reached";
    case Termination::MaxEvals:
      return "max_evals";
    case Termination::Converged:
      return "converged";
  }
  throw std::logic_error("unreachable termination");
}

int OptimizerConfig::dimension() const {
  const int unique = symmetric ? (degree % 2 == 0 ? degree / 2 : (degree - 1) / 2)
                               : degree - 1;
  return unique + 1;  // + Delta_0
}

void OptimizerConfig::validate() const {
  if (degree < 2 || degree > 64)
    throw std::invalid_argument("OptimizerConfig: degree must be in [2, 64]");
  if (!(duration > 0.0))
    throw std::invalid_argument("OptimizerConfig: duration must be positive");
  if (!(coefficient_bound > 0.0) || !std::isfinite(coefficient_bound))
    throw std::invalid_argument("OptimizerConfig: coefficient bound must be positive and finite");
  if (!(detuning_min < detuning_max) || !std::isfinite(detuning_min) ||
      !std::isfinite(detuning_max))
    throw std::invalid_argument("OptimizerConfig: detuning bounds must be finite with min < max");
  if (w_pop < 0.0 || w_phase < 0.0 || w_err < 0.0 ||
      (w_pop == 0.0 && w_phase == 0.0 && w_err == 0.0))
    throw std::invalid_argument("OptimizerConfig: weights must be >= 0 with at least one positive");
  if (max_evals < 1)
    throw std::invalid_argument("OptimizerConfig: max_evals must be >= 1");
}

PulseWaveform OptimizerConfig::build_waveform(
    const std::vector<double>& params) const {
  if (static_cast<int>(params.size()) != dimension())
    throw std::invalid_argument("build_waveform: parameter vector length mismatch");
  std::vector<double> beta(degree - 1);
  for (int nu = 1; nu < degree; ++nu) {
    const int idx = symmetric ? std::min(nu, degree - nu) - 1 : nu - 1;
    beta[nu - 1] = params[idx];
  }
  return PulseWaveform(degree, std::move(beta), params.back(), duration);
}

double objective(const std::vector<double>& params, const OptimizerConfig& cfg,
                 const PhysicsParams& physics) {
  cfg.validate();
  Tolerances tol{cfg.rel_tol, cfg.abs_tol,
                 cfg.max_step > 0.0 ? cfg.max_step : cfg.duration / 100.0};
  PhysicsParams phys = physics;
  phys.decay_rate = 0.0;

  try {
    GateScenario sc{cfg.build_waveform(params), phys, 0.0, 0.0,
                    Propagation::CounterPropagating, 0.0};

    double value = 0.0;
    if (cfg.w_pop > 0.0 || cfg.w_phase > 0.0) {
      const ChannelAmplitudes amps = simulate_pulse(sc, +1, tol);
      if (cfg.w_pop > 0.0) {
        double pop = 0.0;
        for (int i = 0; i < 3; ++i) pop += 1.0 - std::norm(amps[i]);
        value += cfg.w_pop * pop;
      }
      if (cfg.w_phase > 0.0) {
        const double combo = 2.0 * (std::arg(amps[1]) + std::arg(amps[2]) -
                                    std::arg(amps[0]));
        const double dist = std::abs(wrap_angle(combo - M_PI));
        value += cfg.w_phase * dist * dist;
      }
    }
    if (cfg.w_err > 0.0) {
      const ChannelAmplitudes diag = compose_dual_pulse(sc, tol);
      value += cfg.w_err * (1.0 - optimize_local_phases(diag).fidelity);
    }
    return value;
  } catch (const IntegrationError&) {
    return kFailurePenalty;
  } catch (const std::invalid_argument&) {
    return kFailurePenalty;
  }
}

std::vector<double> adiabatic_sketch(const OptimizerConfig& cfg,
                                     const PhysicsParams& /*physics*/) {
  if (!cfg.symmetric)
    throw std::invalid_argument("adiabatic_sketch: requires symmetric mode");
  const int n = cfg.degree;
  std::vector<double> beta(n - 1);
  for (int nu = 1; nu < n; ++nu)
    beta[nu - 1] = std::pow(std::sin(M_PI * nu / n), 2);

  // scale so the peak Rabi frequency is 2pi x 10 MHz
  PulseWaveform unit(n, beta, 0.0, cfg.duration);
  const double peak = unit.omega_at(cfg.duration / 2.0);
  const double scale = constants::kTwoPi * 10e6 / peak;
  for (double& b : beta) b *= scale;
  return beta;
}

OptimizationReport optimize_waveform(const OptimizerConfig& cfg,
                                     const PhysicsParams& physics) {
  cfg.validate();
  const int dim = cfg.dimension();
  const int n_beta = dim - 1;

  std::vector<double> x0(dim, 0.0);
  switch (cfg.initial) {
    case InitialGuess::PaperSeed: {
      if (cfg.degree != 8)
        throw std::invalid_argument("paper_seed requires degree 8");
      const PulseWaveform paper =
          make_paper_waveform(resolve_paper_units(physics));
      for (int i = 0; i < n_beta; ++i) {
        const int nu = i + 1;
        const int src = cfg.symmetric ? std::min(nu, cfg.degree - nu) : nu;
        x0[i] = paper.coefficients()[src - 1];
      }
      x0[dim - 1] = paper.detuning();
      break;
    }
    case InitialGuess::AdiabaticSketch: {
      const std::vector<double> beta = adiabatic_sketch(cfg, physics);
      for (int i = 0; i < n_beta; ++i) x0[i] = beta[i];
      x0[dim - 1] = kSketchDetuning;
      break;
    }
    case InitialGuess::Random: {
      CounterRng rng(RngSpec{cfg.random_seed, 0});
      for (int i = 0; i < n_beta; ++i)
        x0[i] = 0.4 * cfg.coefficient_bound * rng.uniform01();
      x0[dim - 1] = cfg.detuning_min +
                    (cfg.detuning_max - cfg.detuning_min) * rng.uniform01();
      break;
    }
  }

  Bounds bounds;
  bounds.lo.assign(dim, -cfg.coefficient_bound);
  bounds.hi.assign(dim, cfg.coefficient_bound);
  bounds.lo[dim - 1] = cfg.detuning_min;
  bounds.hi[dim - 1] = cfg.detuning_max;
  bounds.clamp(x0);

  std::vector<double> steps(dim);
  for (int i = 0; i < n_beta; ++i)
    steps[i] = std::max(0.1 * std::abs(x0[i]), constants::kTwoPi * 0.3e6);
  steps[dim - 1] =
      std::max(0.1 * std::abs(x0[dim - 1]), constants::kTwoPi * 0.15e6);

  auto f = [&](const std::vector<double>& x) {
    return objective(x, cfg, physics);
  };

  SearchState st;
  st.best_x = x0;
  bool out_of_budget = false;
  constexpr int kMaxRestarts = 8;
  for (int restart = 0; restart <= kMaxRestarts; ++restart) {
    const double before = st.best;
    std::vector<double> start = restart == 0 ? x0 : st.best_x;
    std::vector<double> local_steps = steps;
    for (double& s : local_steps) s *= std::pow(0.4, restart);
    out_of_budget = nelder_mead(f, start, local_steps, bounds, cfg, st);
    if (out_of_budget) break;
    if (restart > 0 && before - st.best < 1e-15) break;  // no more progress
  }

  OptimizationReport report;
  report.best_params = st.best_x;
  report.best_objective = st.best;
  report.evaluations = st.evals;
  report.trace = std::move(st.trace);
  if (st.best <= cfg.target_objective)
    report.termination = Termination::TargetReached;
  else if (st.evals >= cfg.max_evals)
    report.termination = Termination::MaxEvals;
  else
    report.termination = Termination::Converged;
  return report;
}

nlohmann::json OptimizationReport::to_json(const OptimizerConfig& cfg) const {
  const PulseWaveform w = best_waveform(cfg);
  WaveformSpec spec;
  spec.degree = w.degree();
  spec.units_mode = UnitsMode::TwoPiMegahertz;
  const double scale = 1.0 / (constants::kTwoPi * 1e6);
  spec.coefficients_MHz.resize(w.coefficients().size());
  for (std::size_t i = 0; i < spec.coefficients_MHz.size(); ++i)
    spec.coefficients_MHz[i] = w.coefficients()[i] * scale;
  spec.detuning_MHz = w.detuning() * scale;
  spec.duration_us = w.duration() * 1e6;

  nlohmann::json jtrace = nlohmann::json::array();
  for (const auto& [idx, value] : trace) jtrace.push_back({idx, value});

  return nlohmann::json{{"best_waveform", spec},
                        {"best_objective", best_objective},
                        {"evaluations", evaluations},
                        {"trace", jtrace},
                        {"termination", to_string(termination)}};
}

}  // namespace rydgate
