// cpgait: serve, run headless, record, replay and export.

#include <CLI11.hpp>
#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "cpgait/config.hpp"
#include "cpgait/export.hpp"
#include "cpgait/session.hpp"
#include "cpgait/teleop_service.hpp"

namespace {

std::atomic<bool> g_interrupted{false};

void on_signal(int) { g_interrupted.store(true); }

struct ExportSpec {
  std::string gait;
  std::size_t cycles = 1;
  std::string path;
};

ExportSpec parse_export(const std::string& arg) {
  const auto a = arg.find(':');
  const auto b = a == std::string::npos ? a : arg.find(':', a + 1);
  if (a == std::string::npos || b == std::string::npos) {
    throw CLI::ValidationError("--export", "expected <gait>:<cycles>:<path>");
  }
  ExportSpec s;
  s.gait = arg.substr(0, a);
  try {
    const long long n = std::stoll(arg.substr(a + 1, b - a - 1));
    if (n <= 0) throw std::invalid_argument("cycles");
    s.cycles = static_cast<std::size_t>(n);
  } catch (const std::exception&) {
    throw CLI::ValidationError("--export", "cycles must be a positive integer");
  }
  s.path = arg.substr(b + 1);
  if (s.path.empty()) throw CLI::ValidationError("--export", "missing path");
  return s;
}

std::size_t first_difference_line(const std::string& a, const std::string& b) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    if (a[i] != b[i]) return line;
    if (a[i] == '\n') ++line;
  }
  return line;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CPG gait runtime and tele-operation service"};

  std::string config_path, gaits_path, calibration_path, record_path, replay_path, export_arg,
      script_path, www;
  std::string address = "127.0.0.1";
  int port = 8080;
  double rate_hz = 0.0, dt = 0.0, duration = 0.0;
  std::size_t decimate = 1, resolution = 100;
  bool headless = false;

  app.add_option("--config", config_path, "Runtime config (YAML)")->check(CLI::ExistingFile);
  app.add_option("--gaits", gaits_path, "Gait library (YAML), overrides the config")
      ->check(CLI::ExistingFile);
  app.add_option("--calibration", calibration_path, "Calibration (YAML), overrides the config")
      ->check(CLI::ExistingFile);
  app.add_option("--address", address, "Listen address");
  app.add_option("--port", port, "Listen port (0 picks a free one)")->check(CLI::Range(0, 65535));
  app.add_option("--rate-hz", rate_hz, "Command rate in Hz")->check(CLI::PositiveNumber);
  app.add_option("--dt", dt, "Internal integration step in s")->check(CLI::PositiveNumber);
  app.add_option("--record", record_path, "Write a JSONL session record");
  app.add_option("--replay", replay_path, "Replay a session record and verify it")
      ->check(CLI::ExistingFile);
  app.add_flag("--headless", headless, "Run without the network service");
  app.add_option("--script", script_path, "Headless command script (JSONL with tick stamps)")
      ->check(CLI::ExistingFile);
  app.add_option("--duration", duration,
                 "Seconds to run; headless default 60, service default until interrupted")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--export", export_arg, "Export <gait>:<cycles>:<path> as CSV");
  app.add_option("--resolution", resolution, "Export rows per cycle")->check(CLI::PositiveNumber);
  app.add_option("--decimate", decimate, "Broadcast every Nth frame")->check(CLI::PositiveNumber);
  app.add_option("--www", www, "Static asset directory for the cockpit")->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  try {
    cpgait::RuntimeConfig config =
        config_path.empty() ? cpgait::RuntimeConfig{} : cpgait::load_runtime_config(config_path);
    if (!gaits_path.empty()) config.gaits = cpgait::load_gait_library(gaits_path);
    if (!calibration_path.empty()) config.calibration = cpgait::load_calibration(calibration_path);
    if (rate_hz > 0.0) config.command_rate = rate_hz;
    if (dt > 0.0) config.internal_dt = dt;
    config.validate();

    if (!export_arg.empty()) {
      const ExportSpec spec = parse_export(export_arg);
      cpgait::export_trajectory(config, spec.gait, spec.cycles, resolution, spec.path);
      std::cerr << "exported " << spec.cycles * resolution << " rows of " << spec.gait << " to "
                << spec.path << "\n";
      return 0;
    }

    if (!replay_path.empty()) {
      const std::string original = cpgait::read_text_file(replay_path);
      const cpgait::SessionRecord record = cpgait::parse_session(original);
      const std::string regenerated = cpgait::replay_session(record, config);
      if (!record_path.empty()) {
        std::ofstream(record_path, std::ios::binary) << regenerated;
      }
      if (regenerated == original) {
        std::cout << "replay identical: " << record.ticks << " frames, " << record.commands.size()
                  << " commands\n";
        return 0;
      }
      std::cout << "replay differs from record at line "
                << first_difference_line(original, regenerated) << "\n";
      return 1;
    }

    if (headless) {
      std::vector<cpgait::ScriptedCommand> script;
      if (!script_path.empty()) {
        script = cpgait::parse_command_script(cpgait::read_text_file(script_path));
      }
      const double seconds = duration > 0.0 ? duration : 60.0;
      const auto ticks = static_cast<std::uint64_t>(std::llround(seconds * config.command_rate));
      if (record_path.empty()) {
        cpgait::SessionWriter writer(std::cout, config);
        cpgait::run_headless(config, script, ticks, &writer);
      } else {
        std::ofstream out(record_path, std::ios::binary);
        if (!out) throw cpgait::ConfigError("cannot write " + record_path);
        cpgait::SessionWriter writer(out, config);
        cpgait::run_headless(config, script, ticks, &writer);
        std::cerr << "recorded " << ticks << " frames to " << record_path << "\n";
      }
      return 0;
    }

    cpgait::ServiceOptions options;
    options.address = address;
    options.port = static_cast<std::uint16_t>(port);
    options.decimate = decimate;
    options.www = www;
    if (!record_path.empty()) options.record = record_path;
    cpgait::TeleopService service(config, options);
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    service.start();
    std::cerr << "listening on " << address << ":" << service.port() << " at "
              << config.command_rate << " Hz\n";
    const auto deadline =
        std::chrono::steady_clock::now() + std::chrono::duration<double>(duration);
    while (!g_interrupted.load() &&
           (duration <= 0.0 || std::chrono::steady_clock::now() < deadline)) {
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
    service.stop();
    std::cerr << "stopped after " << service.ticks() << " frames\n";
    return 0;
  } catch (const cpgait::ReplayRefused& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
