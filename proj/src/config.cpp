#include "rydgate/config.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace rydgate {

namespace {

using nlohmann::json;

std::string join_keys(std::initializer_list<const char*> keys) {
  std::string out;
  for (const char* k : keys) {
    if (!out.empty()) out += ", ";
    out += k;
  }
  return out;
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object())
    throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) {
        ok = true;
        break;
      }
    if (!ok)
      throw ConfigError("unknown key '" + key + "' in " + where +
                        "; accepted keys: " + join_keys(allowed));
  }
}

const json& require(const json& obj, const std::string& where,
                    const char* key) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw ConfigError("missing required field '" + std::string(key) + "' in " +
                      where);
  return *it;
}

double require_number(const json& obj, const std::string& where,
                      const char* key) {
  const json& v = require(obj, where, key);
  if (!v.is_number())
    throw ConfigError("field '" + std::string(key) + "' in " + where +
                      " must be a number");
  return v.get<double>();
}

PhysicsParams parse_physics(const json& j) {
  check_keys(j, "physics",
             {"B_MHz_times_2pi", "delta_p_MHz_times_2pi", "gamma_per_s",
              "wavelength_nm", "species", "mass_u"});
  const std::string species =
      require(j, "physics", "species").get<std::string>();

  PhysicsParams p;
  if (species == "Rb")
    p = PhysicsParams::defaults(Species::Rb87);
  else if (species == "Cs")
    p = PhysicsParams::defaults(Species::Cs133);
  else if (species == "custom") {
    p = PhysicsParams::defaults(Species::Rb87);
    p.atom_mass =
        require_number(j, "physics", "mass_u") * constants::kAtomicMassUnit;
    p.wavelength = require_number(j, "physics", "wavelength_nm") * 1e-9;
  } else {
    throw ConfigError("physics.species must be one of Rb, Cs, custom");
  }
  if (species != "custom" && j.contains("mass_u"))
    throw ConfigError("physics.mass_u is only accepted with species=custom");

  p.forster_coupling = constants::kTwoPi * 1e6 *
                       require_number(j, "physics", "B_MHz_times_2pi");
  p.forster_penalty = constants::kTwoPi * 1e6 *
                      require_number(j, "physics", "delta_p_MHz_times_2pi");
  if (j.contains("gamma_per_s")) p.decay_rate = j["gamma_per_s"].get<double>();
  if (species != "custom" && j.contains("wavelength_nm"))
    p.wavelength = j["wavelength_nm"].get<double>() * 1e-9;

  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("physics: ") + e.what());
  }
  return p;
}

WaveformSpec parse_waveform(const json& j, const std::string& base_dir) {
  if (j.contains("file")) {
    check_keys(j, "waveform", {"file"});
    const std::filesystem::path ref = j["file"].get<std::string>();
    const std::filesystem::path path =
        ref.is_absolute() ? ref : std::filesystem::path(base_dir) / ref;
    std::ifstream in(path);
    if (!in)
      throw ConfigError("waveform.file: cannot open '" + path.string() + "'");
    json doc;
    try {
      in >> doc;
    } catch (const json::exception& e) {
      throw ConfigError("waveform.file '" + path.string() +
                        "': invalid JSON: " + e.what());
    }
    return parse_waveform(doc, path.parent_path().string());
  }

  check_keys(j, "waveform",
             {"degree", "coefficients_MHz", "detuning_MHz", "duration_us",
              "units_mode"});
  for (const char* k : {"degree", "coefficients_MHz", "detuning_MHz",
                        "duration_us", "units_mode"})
    require(j, "waveform", k);
  try {
    WaveformSpec spec = j.get<WaveformSpec>();
    spec.build();  // validate invariants now, with a config-flavored error
    return spec;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("waveform: ") + e.what());
  }
}

OptimizerConfig parse_optimizer(const json& j) {
  check_keys(j, "optimizer",
             {"degree", "symmetric", "duration_us", "coefficient_bound_MHz",
              "detuning_bounds_MHz", "initial", "random_seed", "weights",
              "max_evals", "target_objective", "simplex_f_tol"});
  OptimizerConfig cfg;
  if (j.contains("degree")) cfg.degree = j["degree"].get<int>();
  if (j.contains("symmetric")) cfg.symmetric = j["symmetric"].get<bool>();
  if (j.contains("duration_us"))
    cfg.duration = j["duration_us"].get<double>() * 1e-6;
  if (j.contains("coefficient_bound_MHz"))
    cfg.coefficient_bound =
        constants::kTwoPi * 1e6 * j["coefficient_bound_MHz"].get<double>();
  if (j.contains("detuning_bounds_MHz")) {
    const auto b = j["detuning_bounds_MHz"].get<std::vector<double>>();
    if (b.size() != 2)
      throw ConfigError("optimizer.detuning_bounds_MHz must be [min, max]");
    cfg.detuning_min = constants::kTwoPi * 1e6 * b[0];
    cfg.detuning_max = constants::kTwoPi * 1e6 * b[1];
  }
  if (j.contains("initial"))
    cfg.initial = initial_guess_from_string(j["initial"].get<std::string>());
  if (j.contains("random_seed"))
    cfg.random_seed = j["random_seed"].get<std::uint64_t>();
  if (j.contains("weights")) {
    const json& w = j["weights"];
    check_keys(w, "optimizer.weights", {"population", "phase", "error"});
    if (w.contains("population")) cfg.w_pop = w["population"].get<double>();
    if (w.contains("phase")) cfg.w_phase = w["phase"].get<double>();
    if (w.contains("error")) cfg.w_err = w["error"].get<double>();
  }
  if (j.contains("max_evals")) cfg.max_evals = j["max_evals"].get<long>();
  if (j.contains("target_objective"))
    cfg.target_objective = j["target_objective"].get<double>();
  if (j.contains("simplex_f_tol"))
    cfg.simplex_f_tol = j["simplex_f_tol"].get<double>();
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("optimizer: ") + e.what());
  }
  return cfg;
}

}  // namespace

GateScenario RunConfig::scenario() const {
  if (!waveform)
    throw ConfigError("missing required field 'waveform' in config");
  return GateScenario{waveform->build(), physics, v_control,
                      v_target,          propagation, gap_time};
}

Tolerances RunConfig::tolerances(double duration) const {
  return Tolerances{rel_tol, abs_tol, max_step_fraction * duration};
}

RunConfig parse_config(const nlohmann::json& doc, const std::string& base_dir) {
  check_keys(doc, "config",
             {"physics", "waveform", "scenario", "tolerances", "pulse", "scan",
              "optimizer", "seed", "output_dir"});

  RunConfig cfg;
  cfg.physics = parse_physics(require(doc, "config", "physics"));
  if (doc.contains("waveform"))
    cfg.waveform = parse_waveform(doc["waveform"], base_dir);

  if (doc.contains("scenario")) {
    const json& s = doc["scenario"];
    check_keys(s, "scenario",
               {"v_control_m_per_s", "v_target_m_per_s", "propagation",
                "gap_time_s"});
    if (s.contains("v_control_m_per_s"))
      cfg.v_control = s["v_control_m_per_s"].get<double>();
    if (s.contains("v_target_m_per_s"))
      cfg.v_target = s["v_target_m_per_s"].get<double>();
    if (s.contains("propagation"))
      cfg.propagation =
          propagation_from_string(s["propagation"].get<std::string>());
    if (s.contains("gap_time_s")) {
      cfg.gap_time = s["gap_time_s"].get<double>();
      if (!(cfg.gap_time >= 0.0) || !std::isfinite(cfg.gap_time))
        throw ConfigError("scenario.gap_time_s must be finite and >= 0");
    }
  }

  if (doc.contains("tolerances")) {
    const json& t = doc["tolerances"];
    check_keys(t, "tolerances", {"rel_tol", "abs_tol", "max_step_fraction"});
    if (t.contains("rel_tol")) cfg.rel_tol = t["rel_tol"].get<double>();
    if (t.contains("abs_tol")) cfg.abs_tol = t["abs_tol"].get<double>();
    if (t.contains("max_step_fraction"))
      cfg.max_step_fraction = t["max_step_fraction"].get<double>();
    if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0) ||
        !(cfg.max_step_fraction > 0.0))
      throw ConfigError("tolerances must all be positive");
  }

  if (doc.contains("pulse")) {
    const json& p = doc["pulse"];
    check_keys(p, "pulse", {"num_samples"});
    if (p.contains("num_samples")) {
      cfg.pulse_samples = p["num_samples"].get<int>();
      if (cfg.pulse_samples < 2)
        throw ConfigError("pulse.num_samples must be >= 2");
    }
  }

  if (doc.contains("scan")) {
    const json& s = doc["scan"];
    check_keys(s, "scan",
               {"velocities_m_per_s", "velocity_mode", "temperatures_uK",
                "n_samples", "gammas_per_s", "decay_temperature_uK",
                "blockade_B_MHz_times_2pi"});
    if (s.contains("velocities_m_per_s"))
      cfg.velocities = s["velocities_m_per_s"].get<std::vector<double>>();
    if (s.contains("velocity_mode"))
      cfg.velocity_mode = velocity_scan_mode_from_string(
          s["velocity_mode"].get<std::string>());
    if (s.contains("temperatures_uK")) {
      for (double t : s["temperatures_uK"].get<std::vector<double>>()) {
        if (!(t >= 0.0))
          throw ConfigError("scan.temperatures_uK must be >= 0");
        cfg.temperatures.push_back(t * 1e-6);
      }
    }
    if (s.contains("n_samples")) {
      cfg.n_samples = s["n_samples"].get<int>();
      if (cfg.n_samples < 2) throw ConfigError("scan.n_samples must be >= 2");
    }
    if (s.contains("gammas_per_s"))
      cfg.gammas = s["gammas_per_s"].get<std::vector<double>>();
    if (s.contains("decay_temperature_uK"))
      cfg.decay_temperature = s["decay_temperature_uK"].get<double>() * 1e-6;
    if (s.contains("blockade_B_MHz_times_2pi")) {
      for (double b :
           s["blockade_B_MHz_times_2pi"].get<std::vector<double>>())
        cfg.blockade_values.push_back(constants::kTwoPi * 1e6 * b);
    }
  }

  if (doc.contains("optimizer"))
    cfg.optimizer = parse_optimizer(doc["optimizer"]);

  if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
  if (doc.contains("output_dir"))
    cfg.output_dir = doc["output_dir"].get<std::string>();
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config '" + path + "': invalid JSON: " + e.what());
  }
  return parse_config(doc,
                      std::filesystem::path(path).parent_path().string());
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string fnv1a64_hex(const std::string& bytes) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

}  // namespace rydgate
