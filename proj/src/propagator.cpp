#include "rydgate/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>

namespace rydgate {

namespace {

using std::complex;
constexpr complex<double> kMinusI{0.0, -1.0};

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
// 5th-minus-4th order error weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense-output weights (Hairer, Norsett & Wanner).
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

// Applies dpsi/dt = -i H(t) psi with H(t) = base + omega(t) * drive pattern.
struct RhsApplier {
  Eigen::MatrixXcd base;
  std::vector<ChannelSystem::DriveCoupling> drive;

  explicit RhsApplier(const ChannelSystem& sys)
      : base(Eigen::MatrixXcd::Zero(sys.dimension, sys.dimension)),
        drive(sys.drive) {
    base.diagonal() = sys.diagonal;
    for (const auto& sc : sys.static_couplings) {
      base(sc.row, sc.col) += sc.value;
      base(sc.col, sc.row) += sc.value;
    }
  }

  void operator()(double omega, const State& psi, State& out) const {
    out.noalias() = base * psi;
    for (const auto& dc : drive) {
      out(dc.row) += dc.scale * omega * psi(dc.col);
      out(dc.col) += dc.scale * omega * psi(dc.row);
    }
    out *= kMinusI;
  }
};

// Bernstein-series envelope with precomputed binomial-weighted coefficients
// and iterative powers; same polynomial as PulseWaveform::omega_at, a few
// hundred times cheaper inside the stepper. Stage times are clamped to the
// window to absorb end-of-interval roundoff.
struct FastEnvelope {
  int n = 0;
  double inv_duration = 0.0;
  double duration = 0.0;
  std::vector<double> scaled;  // beta_nu * C(n, nu), nu = 1..n-1

  explicit FastEnvelope(const PulseWaveform& w)
      : n(w.degree()),
        inv_duration(1.0 / w.duration()),
        duration(w.duration()),
        scaled(w.coefficients()) {
    double binom = 1.0;
    for (int nu = 1; nu < n; ++nu) {
      binom = binom * (n - nu + 1) / nu;
      scaled[nu - 1] *= binom;
    }
  }

  double operator()(double t) const {
    const double x = std::clamp(t * inv_duration, 0.0, 1.0);
    if (x == 0.0 || x == 1.0) return 0.0;
    const double y = 1.0 - x;
    double xpows[65];
    xpows[0] = 1.0;
    for (int i = 1; i < n; ++i) xpows[i] = xpows[i - 1] * x;
    double sum = 0.0, ypow = 1.0;
    for (int nu = n - 1; nu >= 1; --nu) {
      ypow *= y;  // y^(n-nu)
      sum += scaled[nu - 1] * xpows[nu] * ypow;
    }
    return sum;
  }
};

double error_norm(const State& err, const State& y0, const State& y1,
                  double rel, double abs) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double sc =
        abs + rel * std::max(std::abs(y0(i)), std::abs(y1(i)));
    const double e = std::abs(err(i)) / sc;
    acc += e * e;
  }
  return std::sqrt(acc / static_cast<double>(err.size()));
}

// Core adaptive loop. `on_step` is called after every accepted step with
// (t, h, y_old, k1..k7, y_new) so dense output can interpolate into it.
template <class EnvelopeFn, class StepFn>
State integrate(const ChannelSystem& system, const EnvelopeFn& env,
                double duration, const State& psi0, const Tolerances& tol,
                StepFn&& on_step) {
  tol.validate();
  if (psi0.size() != system.dimension)
    throw std::invalid_argument("evolve: state dimension mismatch");
  if (!(duration >= 0.0) || !std::isfinite(duration))
    throw std::invalid_argument("evolve: bad duration");
  if (duration == 0.0) return psi0;

  const RhsApplier rhs(system);
  const Eigen::Index dim = psi0.size();
  State y = psi0, ynew(dim), ytmp(dim), yerr(dim);
  State k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim);

  double t = 0.0;
  rhs(env(0.0), y, k1);

  // initial step: capped by max_step and a crude first-derivative scale
  double h = std::min(tol.max_step, duration);
  {
    const double dy = y.norm() + tol.abs_tol;
    const double df = k1.norm();
    if (df > 1e-300) h = std::min(h, 0.01 * dy / df);
  }

  const double hmin = 16.0 * std::numeric_limits<double>::epsilon() * duration;
  long n_steps = 0;
  constexpr long kMaxSteps = 500'000'000L;

  while (t < duration) {
    if (++n_steps > kMaxSteps)
      throw IntegrationError("evolve: step budget exhausted", t);
    bool last = false;
    if (t + h >= duration) {
      h = duration - t;
      last = true;
    } else if (h < hmin) {
      throw IntegrationError("evolve: step size underflow", t);
    }

    ytmp = y + h * a21 * k1;
    rhs(env(t + c2 * h), ytmp, k2);
    ytmp = y + h * (a31 * k1 + a32 * k2);
    rhs(env(t + c3 * h), ytmp, k3);
    ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(env(t + c4 * h), ytmp, k4);
    ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(env(t + c5 * h), ytmp, k5);
    ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(env(t + h), ytmp, k6);
    ynew = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    rhs(env(t + h), ynew, k7);
    yerr = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    const double err = error_norm(yerr, y, ynew, tol.rel_tol, tol.abs_tol);
    if (err <= 1.0) {
      on_step(t, h, y, k1, k3, k4, k5, k6, k7, ynew);
      y.swap(ynew);
      k1.swap(k7);  // FSAL
      if (last) break;
      t += h;
      const double fac =
          err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      h = std::min(h * fac, tol.max_step);
    } else {
      h *= std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
      if (h < hmin) throw IntegrationError("evolve: step size underflow", t);
    }
  }
  return y;
}

struct NoopStep {
  template <class... Args>
  void operator()(const Args&...) const {}
};

}  // namespace

void Tolerances::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !(max_step > 0.0))
    throw std::invalid_argument("Tolerances: rel_tol, abs_tol, max_step must be positive");
}

State evolve(const ChannelSystem& system, const PulseWaveform& waveform,
             const State& psi0, const Tolerances& tol) {
  return integrate(system, FastEnvelope(waveform), waveform.duration(), psi0,
                   tol, NoopStep{});
}

State evolve_envelope(const ChannelSystem& system, const Envelope& envelope,
                      double duration, const State& psi0,
                      const Tolerances& tol) {
  return integrate(system, envelope, duration, psi0, tol, NoopStep{});
}

std::vector<TrajectoryPoint> evolve_trajectory(const ChannelSystem& system,
                                               const PulseWaveform& waveform,
                                               const State& psi0,
                                               const Tolerances& tol,
                                               int num_samples) {
  if (num_samples < 2)
    throw std::invalid_argument("evolve_trajectory: num_samples must be >= 2");
  const double duration = waveform.duration();
  const double dt = duration / (num_samples - 1);

  std::vector<TrajectoryPoint> out;
  out.reserve(num_samples);
  out.push_back({0.0, psi0});
  int next = 1;

  State rc2, rc3, rc4, rc5;  // dense-output coefficients, built lazily
  auto on_step = [&](double t, double h, const State& y, const State& k1,
                     const State& k3, const State& k4, const State& k5,
                     const State& k6, const State& k7, const State& ynew) {
    bool have_cont = false;
    while (next < num_samples - 1) {
      const double ts = next * dt;
      if (ts > t + h) break;
      if (!have_cont) {
        rc2 = ynew - y;
        rc3 = h * k1 - rc2;
        rc4 = rc2 - h * k7 - rc3;
        rc5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
        have_cont = true;
      }
      const double th = (ts - t) / h;
      const double th1 = 1.0 - th;
      State psi = y + th * (rc2 + th1 * (rc3 + th * (rc4 + th1 * rc5)));
      out.push_back({ts, std::move(psi)});
      ++next;
    }
  };

  State final_state =
      integrate(system, FastEnvelope(waveform), duration, psi0, tol, on_step);
  out.push_back({duration, std::move(final_state)});
  return out;
}

std::pair<double, double> ground_phase(const State& psi) {
  if (psi.size() < 1) throw std::invalid_argument("ground_phase: empty state");
  const std::complex<double> a0 = psi(0);
  const double pop = std::norm(a0);
  if (pop < 1e-12)
    throw std::domain_error("ground_phase: population below 1e-12, phase undefined");
  double phase = std::arg(a0);
  if (phase <= -M_PI) phase += 2.0 * M_PI;
  return {pop, phase};
}

State oracle_evolve(const ChannelSystem& system, const PulseWaveform& waveform,
                    const State& psi0, long steps) {
  if (steps < 10000)
    throw std::invalid_argument("oracle_evolve: steps must be >= 10^4");
  if (psi0.size() != system.dimension)
    throw std::invalid_argument("oracle_evolve: state dimension mismatch");

  const double T = waveform.duration();
  const double h = T / static_cast<double>(steps);
  auto deriv = [&](double t, const State& y) -> State {
    const double tc = std::clamp(t, 0.0, T);
    return kMinusI * (system.hamiltonian(waveform.omega_at(tc)) * y);
  };

  State y = psi0;
  for (long i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) * h;
    const State k1 = deriv(t, y);
    const State k2 = deriv(t + 0.5 * h, y + (0.5 * h) * k1);
    const State k3 = deriv(t + 0.5 * h, y + (0.5 * h) * k2);
    const State k4 = deriv(t + h, y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return y;
}

std::string trajectory_csv(const ChannelSystem& system,
                           const std::vector<TrajectoryPoint>& trajectory) {
  char buf[64];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };

  std::string csv = "t_us";
  for (const auto& label : system.basis_labels) csv += ", pop_" + label;
  csv += ", phase_ground_rad, norm\n";

  double prev_phase = 0.0;
  bool first = true;
  for (const auto& pt : trajectory) {
    csv += fmt(pt.t * 1e6);
    for (Eigen::Index i = 0; i < pt.psi.size(); ++i)
      csv += ", " + fmt(std::norm(pt.psi(i)));
    double phase = std::arg(pt.psi(0));
    if (!first)
      phase += 2.0 * M_PI * std::round((prev_phase - phase) / (2.0 * M_PI));
    prev_phase = phase;
    first = false;
    csv += ", " + fmt(phase) + ", " + fmt(pt.psi.norm()) + "\n";
  }
  return csv;
}

}  // namespace rydgate
