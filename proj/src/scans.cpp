#include "rydgate/scans.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "rydgate/parallel.hpp"

namespace rydgate {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t splitmix_finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// mean + standard error of the mean, summed in index order so results do
// not depend on the parallel schedule
ScanRow reduce_row(double x, const std::vector<double>& errors) {
  ScanRow row;
  row.x = x;
  row.n_samples = static_cast<int>(errors.size());
  double sum = 0.0;
  for (double e : errors) sum += e;
  row.mean_error = sum / row.n_samples;
  if (row.n_samples > 1) {
    double ss = 0.0;
    for (double e : errors) ss += (e - row.mean_error) * (e - row.mean_error);
    row.std_error = std::sqrt(ss / (static_cast<double>(row.n_samples) *
                                    (row.n_samples - 1)));
  }
  return row;
}

// fit of mean error vs x; degenerate grids (fewer than two distinct
// abscissas) get no fit
std::optional<LinearFit> fit_rows(const std::vector<ScanRow>& rows) {
  std::vector<double> xs(rows.size()), ys(rows.size());
  bool distinct = false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    xs[i] = rows[i].x;
    ys[i] = rows[i].mean_error;
    if (xs[i] != xs[0]) distinct = true;
  }
  if (rows.size() < 2 || !distinct) return std::nullopt;
  return linear_fit(xs, ys);
}

}  // namespace

RngSpec RngSpec::substream(std::uint64_t index) const {
  RngSpec child = *this;
  child.stream_id =
      splitmix_finalize(stream_id + kGolden * (index + 1) + 0x1F123BB5ull);
  return child;
}

CounterRng::CounterRng(const RngSpec& spec)
    : state_(splitmix_finalize(splitmix_finalize(spec.seed + kGolden) ^
                               spec.stream_id)) {}

std::uint64_t CounterRng::next_u64() {
  state_ += kGolden;
  return splitmix_finalize(state_);
}

double CounterRng::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::gaussian() {
  const double u1 = 1.0 - uniform01();  // (0, 1]
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double sample_axial_velocity(double temperature, double mass,
                             const RngSpec& rng) {
  if (!(temperature >= 0.0))
    throw std::invalid_argument("sample_axial_velocity: negative temperature");
  if (!(mass > 0.0))
    throw std::invalid_argument("sample_axial_velocity: mass must be positive");
  if (temperature == 0.0) return 0.0;
  const double sigma = std::sqrt(constants::kBoltzmann * temperature / mass);
  CounterRng gen(rng);
  return sigma * gen.gaussian();
}

LinearFit linear_fit(const std::vector<double>& xs,
                     const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("linear_fit: need >= 2 paired points");
  const double n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0)
    throw std::invalid_argument("linear_fit: all xs identical (degenerate fit)");

  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double pred = fit.intercept + fit.slope * xs[i];
    ss_res += (ys[i] - pred) * (ys[i] - pred);
    ss_tot += (ys[i] - my) * (ys[i] - my);
  }
  fit.r_squared = ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
  return fit;
}

std::string ScanTable::to_csv() const {
  std::string csv = "x, mean_error, stderr, n\n";
  for (const auto& row : rows) {
    csv += fmt17(row.x) + ", " + fmt17(row.mean_error) + ", " +
           fmt17(row.std_error) + ", " + std::to_string(row.n_samples) + "\n";
  }
  if (fit) {
    csv += "# fit: slope=" + fmt17(fit->slope) +
           ", intercept=" + fmt17(fit->intercept) +
           ", r2=" + fmt17(fit->r_squared) + "\n";
  }
  return csv;
}

nlohmann::json ScanTable::to_json() const {
  nlohmann::json j;
  j["rows"] = nlohmann::json::array();
  for (const auto& row : rows) {
    j["rows"].push_back({{"x", row.x},
                         {"mean_error", row.mean_error},
                         {"stderr", row.std_error},
                         {"n", row.n_samples}});
  }
  if (fit) {
    j["fit"] = {{"slope", fit->slope},
                {"intercept", fit->intercept},
                {"r2", fit->r_squared}};
  }
  return j;
}

std::string to_string(VelocityScanMode m) {
  return m == VelocityScanMode::BothAtoms ? "both_atoms" : "control_only";
}

VelocityScanMode velocity_scan_mode_from_string(const std::string& s) {
  if (s == "both_atoms") return VelocityScanMode::BothAtoms;
  if (s == "control_only") return VelocityScanMode::ControlOnly;
  throw std::invalid_argument("unknown velocity scan mode '" + s +
                              "'; accepted: both_atoms, control_only");
}

ScanTable scan_velocity(const GateScenario& base,
                        const std::vector<double>& velocities,
                        VelocityScanMode mode) {
  std::vector<ScanRow> rows(velocities.size());
  parallel_for(velocities.size(), [&](std::size_t i) {
    GateScenario sc = base;
    sc.v_control = velocities[i];
    sc.v_target = mode == VelocityScanMode::BothAtoms ? velocities[i] : 0.0;
    rows[i] = ScanRow{velocities[i], gate_error(sc).error, 0.0, 1};
  });
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ScanRow& a, const ScanRow& b) { return a.x < b.x; });
  return ScanTable{std::move(rows), std::nullopt};
}

ScanTable scan_temperature(const GateScenario& base,
                           const std::vector<double>& temperatures,
                           int n_samples, const RngSpec& rng) {
  if (n_samples < 2)
    throw std::invalid_argument("scan_temperature: n_samples must be >= 2");
  const std::size_t np = temperatures.size();
  std::vector<std::vector<double>> errors(np,
                                          std::vector<double>(n_samples, 0.0));

  parallel_for(np * static_cast<std::size_t>(n_samples), [&](std::size_t task) {
    const std::size_t i = task / n_samples;
    const std::size_t j = task % n_samples;
    const RngSpec sample_stream = rng.substream(i).substream(j);
    GateScenario sc = base;
    sc.v_control = sample_axial_velocity(temperatures[i],
                                         base.physics.atom_mass,
                                         sample_stream.substream(0));
    sc.v_target = sample_axial_velocity(temperatures[i],
                                        base.physics.atom_mass,
                                        sample_stream.substream(1));
    errors[i][j] = gate_error(sc).error;
  });

  ScanTable table;
  table.rows.reserve(np);
  for (std::size_t i = 0; i < np; ++i)
    table.rows.push_back(reduce_row(temperatures[i], errors[i]));
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [](const ScanRow& a, const ScanRow& b) { return a.x < b.x; });
  table.fit = fit_rows(table.rows);
  return table;
}

ScanTable scan_decay(const GateScenario& base,
                     const std::vector<double>& gammas, double temperature,
                     int n_samples, const RngSpec& rng) {
  if (n_samples < 2)
    throw std::invalid_argument("scan_decay: n_samples must be >= 2");
  for (double g : gammas)
    if (!(g >= 0.0))
      throw std::invalid_argument("scan_decay: gamma must be >= 0");

  const std::size_t np = gammas.size();
  std::vector<std::vector<double>> errors(np,
                                          std::vector<double>(n_samples, 0.0));

  parallel_for(np * static_cast<std::size_t>(n_samples), [&](std::size_t task) {
    const std::size_t i = task / n_samples;
    const std::size_t j = task % n_samples;
    const RngSpec sample_stream = rng.substream(i).substream(j);
    GateScenario sc = base;
    sc.physics.decay_rate = gammas[i];
    sc.v_control = sample_axial_velocity(temperature, base.physics.atom_mass,
                                         sample_stream.substream(0));
    sc.v_target = sample_axial_velocity(temperature, base.physics.atom_mass,
                                        sample_stream.substream(1));
    errors[i][j] = gate_error(sc).error;
  });

  ScanTable table;
  table.rows.reserve(np);
  for (std::size_t i = 0; i < np; ++i)
    table.rows.push_back(reduce_row(gammas[i], errors[i]));
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [](const ScanRow& a, const ScanRow& b) { return a.x < b.x; });
  table.fit = fit_rows(table.rows);
  return table;
}

ScanTable scan_blockade(const GateScenario& base,
                        const std::vector<double>& b_values) {
  for (double b : b_values)
    if (!(b > 0.0))
      throw std::invalid_argument("scan_blockade: B must be > 0");

  std::vector<ScanRow> rows(b_values.size());
  parallel_for(b_values.size(), [&](std::size_t i) {
    GateScenario sc = base;
    sc.physics.forster_coupling = b_values[i];
    sc.physics.decay_rate = 0.0;
    sc.v_control = 0.0;
    sc.v_target = 0.0;
    rows[i] = ScanRow{b_values[i], gate_error(sc).error, 0.0, 1};
  });
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ScanRow& a, const ScanRow& b) { return a.x < b.x; });
  return ScanTable{std::move(rows), std::nullopt};
}

}  // namespace rydgate
