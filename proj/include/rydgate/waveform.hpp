#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace rydgate {

// Interpretation of frequency-like numbers quoted in MHz.
enum class UnitsMode {
  PlainMegahertz,  // x MHz -> x * 1e6 rad/s
  TwoPiMegahertz,  // x MHz -> 2*pi * x * 1e6 rad/s
};

std::string to_string(UnitsMode mode);
UnitsMode units_mode_from_string(const std::string& s);

/// Bernstein basis polynomial b_{nu,n}(x) = C(n,nu) x^nu (1-x)^(n-nu).
/// Degree is capped at 64; binomials are computed with a multiplicative
/// recurrence in double precision (exact through n = 20).
/// Throws std::invalid_argument for nu/x out of range.
double bernstein_basis(int nu, int n, double x);

/// Amplitude-modulated pulse envelope: a Bernstein series of degree n with
/// coefficients beta_1..beta_{n-1} (beta_0 = beta_n = 0, so the envelope
/// starts and ends at exactly zero), plus a constant detuning.
/// All frequencies are angular (rad/s), all times in seconds.
class PulseWaveform {
 public:
  PulseWaveform(int degree, std::vector<double> coefficients_rad_s,
                double detuning_rad_s, double duration_s);

  int degree() const { return degree_; }
  const std::vector<double>& coefficients() const { return coefficients_; }
  double detuning() const { return detuning_; }
  double duration() const { return duration_; }

  /// Envelope value Omega_s(t) for t in [0, T_g]; out of range throws
  /// std::invalid_argument (callers clamp only by explicit choice).
  double omega_at(double t) const;

  /// Envelope run backwards in time: omega_at(T_g - t) for all t.
  PulseWaveform time_reversed() const;

 private:
  int degree_;
  std::vector<double> coefficients_;  // beta_1..beta_{n-1}, rad/s
  double detuning_;                   // rad/s
  double duration_;                   // s
};

/// True iff |beta_nu - beta_{n-nu}| <= tol * max|beta| for all nu.
bool is_time_symmetric(const PulseWaveform& w, double tol);

/// The published degree-8 coefficient set (values quoted in MHz, T_g = 1 us),
/// converted to rad/s under the chosen units interpretation.
PulseWaveform make_paper_waveform(UnitsMode mode);

/// The on-disk / in-config waveform document. Numbers stay in the quoted
/// MHz / us units so that write -> read round-trips are bit-identical; the
/// rad/s PulseWaveform is derived deterministically via build().
struct WaveformSpec {
  int degree = 0;
  std::vector<double> coefficients_MHz;
  double detuning_MHz = 0.0;
  double duration_us = 0.0;
  UnitsMode units_mode = UnitsMode::TwoPiMegahertz;

  PulseWaveform build() const;

  static WaveformSpec paper(UnitsMode mode);

  bool operator==(const WaveformSpec&) const = default;
};

void to_json(nlohmann::json& j, const WaveformSpec& spec);
void from_json(const nlohmann::json& j, WaveformSpec& spec);

}  // namespace rydgate
