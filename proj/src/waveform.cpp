#include "rydgate/waveform.hpp"

#include <cmath>
#include <stdexcept>

namespace rydgate {

namespace {

constexpr int kMaxDegree = 64;
constexpr double kTwoPi = 6.283185307179586476925286766559;

// C(n, nu) via the multiplicative recurrence; exact in double for n <= 20
// and accurate to ~1 ulp for the degrees allowed here.
double binomial(int n, int nu) {
  if (nu > n - nu) nu = n - nu;
  double c = 1.0;
  for (int i = 1; i <= nu; ++i) c = c * (n - nu + i) / i;
  return c;
}

}  // namespace

std::string to_string(UnitsMode mode) {
  switch (mode) {
    case UnitsMode::PlainMegahertz:
      return "plain_megahertz";
    case UnitsMode::TwoPiMegahertz:
      return "two_pi_megahertz";
  }
  throw std::logic_error("unreachable units mode");
}

UnitsMode units_mode_from_string(const std::string& s) {
  if (s == "plain_megahertz") return UnitsMode::PlainMegahertz;
  if (s == "two_pi_megahertz") return UnitsMode::TwoPiMegahertz;
  throw std::invalid_argument("unknown units_mode '" + s +
                              "'; accepted: plain_megahertz, two_pi_megahertz");
}

double bernstein_basis(int nu, int n, double x) {
  if (n < 0 || n > kMaxDegree)
    throw std::invalid_argument("bernstein_basis: degree out of range [0, 64]");
  if (nu < 0 || nu > n)
    throw std::invalid_argument("bernstein_basis: nu out of range [0, n]");
  if (!(x >= 0.0 && x <= 1.0))
    throw std::invalid_argument("bernstein_basis: x out of range [0, 1]");
  // Direct power form; pow(0, 0) = 1 covers the endpoint cases.
  return binomial(n, nu) * std::pow(x, nu) * std::pow(1.0 - x, n - nu);
}

PulseWaveform::PulseWaveform(int degree, std::vector<double> coefficients_rad_s,
                             double detuning_rad_s, double duration_s)
    : degree_(degree),
      coefficients_(std::move(coefficients_rad_s)),
      detuning_(detuning_rad_s),
      duration_(duration_s) {
  if (degree_ < 2 || degree_ > kMaxDegree)
    throw std::invalid_argument("PulseWaveform: degree must be in [2, 64]");
  if (static_cast<int>(coefficients_.size()) != degree_ - 1)
    throw std::invalid_argument(
        "PulseWaveform: need exactly degree-1 coefficients (beta_1..beta_{n-1})");
  for (double b : coefficients_)
    if (!std::isfinite(b))
      throw std::invalid_argument("PulseWaveform: non-finite coefficient");
  if (!std::isfinite(detuning_))
    throw std::invalid_argument("PulseWaveform: non-finite detuning");
  if (!(duration_ > 0.0) || !std::isfinite(duration_))
    throw std::invalid_argument("PulseWaveform: duration must be positive and finite");
}

double PulseWaveform::omega_at(double t) const {
  if (!(t >= 0.0 && t <= duration_))
    throw std::invalid_argument("omega_at: t outside [0, T_g]");
  const double x = t / duration_;
  if (x == 0.0 || x == 1.0) return 0.0;  // beta_0 and beta_n are absent
  double sum = 0.0;
  for (int nu = 1; nu < degree_; ++nu)
    sum += coefficients_[nu - 1] * bernstein_basis(nu, degree_, x);
  return sum;
}

PulseWaveform PulseWaveform::time_reversed() const {
  // b_{nu,n}(1-x) = b_{n-nu,n}(x), so reversing the coefficient list
  // reverses the envelope in time.
  std::vector<double> rev(coefficients_.rbegin(), coefficients_.rend());
  return PulseWaveform(degree_, std::move(rev), detuning_, duration_);
}

bool is_time_symmetric(const PulseWaveform& w, double tol) {
  const auto& beta = w.coefficients();
  double bmax = 0.0;
  for (double b : beta) bmax = std::max(bmax, std::abs(b));
  const int n = w.degree();
  for (int nu = 1; nu < n; ++nu) {
    const double diff = std::abs(beta[nu - 1] - beta[n - nu - 1]);
    if (diff > tol * bmax) return false;
  }
  return true;
}

PulseWaveform make_paper_waveform(UnitsMode mode) {
  return WaveformSpec::paper(mode).build();
}

PulseWaveform WaveformSpec::build() const {
  const double scale =
      units_mode == UnitsMode::TwoPiMegahertz ? kTwoPi * 1e6 : 1e6;
  std::vector<double> beta(coefficients_MHz.size());
  for (std::size_t i = 0; i < beta.size(); ++i)
    beta[i] = coefficients_MHz[i] * scale;
  return PulseWaveform(degree, std::move(beta), detuning_MHz * scale,
                       duration_us * 1e-6);
}

WaveformSpec WaveformSpec::paper(UnitsMode mode) {
  WaveformSpec spec;
  spec.degree = 8;
  spec.coefficients_MHz = {0.794, 0.0, 5.841, 9.725, 5.841, 0.0, 0.794};
  spec.detuning_MHz = -2.360;
  spec.duration_us = 1.0;
  spec.units_mode = mode;
  return spec;
}

void to_json(nlohmann::json& j, const WaveformSpec& spec) {
  j = nlohmann::json{{"degree", spec.degree},
                     {"coefficients_MHz", spec.coefficients_MHz},
                     {"detuning_MHz", spec.detuning_MHz},
                     {"duration_us", spec.duration_us},
                     {"units_mode", to_string(spec.units_mode)}};
}

void from_json(const nlohmann::json& j, WaveformSpec& spec) {
  j.at("degree").get_to(spec.degree);
  j.at("coefficients_MHz").get_to(spec.coefficients_MHz);
  j.at("detuning_MHz").get_to(spec.detuning_MHz);
  j.at("duration_us").get_to(spec.duration_us);
  spec.units_mode = units_mode_from_string(j.at("units_mode").get<std::string>());
}

}  // namespace rydgate
