#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rydgate/config.hpp"
#include "rydgate/gate.hpp"
#include "rydgate/optimizer.hpp"
#include "rydgate/propagator.hpp"
#include "rydgate/scans.hpp"

namespace {

using nlohmann::json;
using namespace rydgate;

struct OutputSet {
  std::filesystem::path dir;
  std::string tag;  // <command>_<confighash>
  json manifest_outputs = json::array();

  void write(const std::string& name, const std::string& bytes) {
    const std::filesystem::path path = dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << bytes;
    out.close();
    manifest_outputs.push_back({{"file", name}, {"fnv1a64", fnv1a64_hex(bytes)}});
  }
};

// deterministic output names: <command>_<hash of canonical config + seed>.
// output_dir and seed are dropped from the hashed document (the seed is
// appended separately, and relocating the output must not rename files).
std::string config_tag(const std::string& command, json doc,
                       std::uint64_t seed) {
  doc.erase("output_dir");
  doc.erase("seed");
  return command + "_" + fnv1a64_hex(doc.dump() + "#" + std::to_string(seed));
}

json load_raw_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "': invalid JSON: " + e.what());
  }
  return doc;
}

void write_manifest(OutputSet& out, const std::string& command,
                    const json& config_echo, std::uint64_t seed,
                    double wall_time_s) {
  json manifest = {{"tool", kToolName},
                   {"version", kToolVersion},
                   {"command", command},
                   {"seed", seed},
                   {"config", config_echo},
                   {"wall_time_s", wall_time_s},
                   {"outputs", out.manifest_outputs}};
  const std::filesystem::path path = out.dir / ("manifest_" + out.tag + ".json");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  f << manifest.dump(2) << "\n";
}

void cmd_pulse(const RunConfig& cfg, OutputSet& out) {
  const GateScenario sc = cfg.scenario();
  const Tolerances tol = cfg.tolerances(sc.waveform.duration());
  const double delta0 = sc.waveform.detuning();

  struct Channel {
    std::string name;
    ChannelSystem system;
  };
  const std::vector<Channel> channels = {
      {"00", build_double_channel(sc.physics, delta0, sc.v_control,
                                  sc.v_target, +1)},
      {"01", build_single_channel(sc.physics, delta0, sc.v_control, +1)},
      {"10", build_single_channel(sc.physics, delta0, sc.v_target, +1)},
      {"11", build_channel_11()},
  };

  json summary;
  for (const auto& ch : channels) {
    State psi0 = State::Zero(ch.system.dimension);
    psi0(0) = 1.0;
    const auto traj =
        evolve_trajectory(ch.system, sc.waveform, psi0, tol, cfg.pulse_samples);
    out.write(out.tag + "_ch" + ch.name + ".csv",
              trajectory_csv(ch.system, traj));
    const auto [pop, phase] = ground_phase(traj.back().psi);
    summary["channels"][ch.name] = {{"ground_population", pop},
                                    {"ground_phase_rad", phase},
                                    {"norm", traj.back().psi.norm()}};
  }

  std::string wcsv = "t_us, omega_rad_s\n";
  char buf[64];
  for (int i = 0; i < cfg.pulse_samples; ++i) {
    const double t =
        sc.waveform.duration() * i / static_cast<double>(cfg.pulse_samples - 1);
    std::snprintf(buf, sizeof(buf), "%.17g, %.17g\n", t * 1e6,
                  sc.waveform.omega_at(std::min(t, sc.waveform.duration())));
    wcsv += buf;
  }
  out.write(out.tag + "_waveform.csv", wcsv);
  out.write(out.tag + "_summary.json", summary.dump(2) + "\n");
}

void cmd_gate(const RunConfig& cfg, OutputSet& out) {
  const GateScenario sc = cfg.scenario();
  const GateResult r = gate_error(sc, cfg.tolerances(sc.waveform.duration()));
  out.write(out.tag + ".json",
            gate_result_to_json(r, sc).dump(2) + "\n");
}

void write_scan(OutputSet& out, const ScanTable& table) {
  out.write(out.tag + ".csv", table.to_csv());
  out.write(out.tag + ".json", table.to_json().dump(2) + "\n");
}

void cmd_scan_velocity(const RunConfig& cfg, OutputSet& out) {
  if (cfg.velocities.empty())
    throw ConfigError("missing required field 'scan.velocities_m_per_s' in config");
  write_scan(out, scan_velocity(cfg.scenario(), cfg.velocities, cfg.velocity_mode));
}

void cmd_scan_temperature(const RunConfig& cfg, OutputSet& out) {
  if (cfg.temperatures.empty())
    throw ConfigError("missing required field 'scan.temperatures_uK' in config");
  write_scan(out, scan_temperature(cfg.scenario(), cfg.temperatures, cfg.n_samples,
                              RngSpec{cfg.seed, 0}));
}

void cmd_scan_decay(const RunConfig& cfg, OutputSet& out) {
  if (cfg.gammas.empty())
    throw ConfigError("missing required field 'scan.gammas_per_s' in config");
  write_scan(out, scan_decay(cfg.scenario(), cfg.gammas, cfg.decay_temperature,
                        cfg.n_samples, RngSpec{cfg.seed, 1}));
}

void cmd_scan_blockade(const RunConfig& cfg, OutputSet& out) {
  if (cfg.blockade_values.empty())
    throw ConfigError(
        "missing required field 'scan.blockade_B_MHz_times_2pi' in config");
  write_scan(out, scan_blockade(cfg.scenario(), cfg.blockade_values));
}

void cmd_optimize(const RunConfig& cfg, OutputSet& out) {
  if (!cfg.optimizer)
    throw ConfigError("missing required field 'optimizer' in config");
  const OptimizationReport report =
      optimize_waveform(*cfg.optimizer, cfg.physics);
  out.write(out.tag + "_report.json",
            report.to_json(*cfg.optimizer).dump(2) + "\n");
  const json jw = report.to_json(*cfg.optimizer)["best_waveform"];
  out.write(out.tag + "_waveform.json", jw.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Dual-pulse Rydberg-blockade controlled-PHASE gate simulator and "
      "waveform optimizer"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  std::uint64_t seed_override = 0;
  bool has_seed_override = false;

  const std::vector<std::string> commands = {
      "pulse",          "gate",       "scan-velocity", "scan-temperature",
      "scan-decay",     "scan-blockade", "optimize"};
  for (const auto& name : commands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON configuration file")
        ->required();
    sub->add_option("--out", out_override, "output directory override");
    sub->add_option_function<std::uint64_t>(
        "--seed",
        [&](std::uint64_t s) {
          seed_override = s;
          has_seed_override = true;
        },
        "RNG seed override");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    const json raw = load_raw_config(config_path);
    RunConfig cfg = parse_config(
        raw, std::filesystem::path(config_path).parent_path().string());
    if (has_seed_override) cfg.seed = seed_override;
    if (!out_override.empty()) cfg.output_dir = out_override;

    OutputSet out;
    out.dir = cfg.output_dir;
    std::filesystem::create_directories(out.dir);
    const std::string cli_command = command;
    std::string file_command = cli_command;
    for (auto& c : file_command)
      if (c == '-') c = '_';
    out.tag = config_tag(file_command, raw, cfg.seed);

    const auto t0 = std::chrono::steady_clock::now();
    if (command == "pulse")
      cmd_pulse(cfg, out);
    else if (command == "gate")
      cmd_gate(cfg, out);
    else if (command == "scan-velocity")
      cmd_scan_velocity(cfg, out);
    else if (command == "scan-temperature")
      cmd_scan_temperature(cfg, out);
    else if (command == "scan-decay")
      cmd_scan_decay(cfg, out);
    else if (command == "scan-blockade")
      cmd_scan_blockade(cfg, out);
    else if (command == "optimize")
      cmd_optimize(cfg, out);
    const auto t1 = std::chrono::steady_clock::now();

    write_manifest(out, cli_command, raw, cfg.seed,
                   std::chrono::duration<double>(t1 - t0).count());
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
