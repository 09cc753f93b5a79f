#pragma once

// JSON-lines session records: a header line, then command and telemetry
// lines in the order they took effect, then an end line.
//
//   {"type":"header","format":"cpgait-session/1","config_hash":..,"gaits_hash":..,
//    "start_time":0.0,"rate_hz":50.0,"dt":0.002}
//   {"type":"command","tick":T,"client":C,"seq":S,"cmd":{...}}   applied before frame T
//   {"type":"telemetry","tick":T,...}
//   {"type":"end","ticks":N}
//
// start_time is simulation time, so two runs of one script are byte-identical.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cpgait/runtime.hpp"

namespace cpgait {

inline constexpr const char* kSessionFormat = "cpgait-session/1";

struct SessionHeader {
  std::string format;
  std::string config_hash;
  std::string gaits_hash;
  double start_time = 0.0;
  double rate_hz = 0.0;
  double dt = 0.0;
};

struct CommandEntry {
  std::uint64_t tick = 0;  // first frame that reflects the command
  std::uint64_t client = 0;
  std::int64_t seq = 0;
  Command command;
};

struct SessionRecord {
  SessionHeader header;
  std::vector<CommandEntry> commands;
  std::vector<std::string> frame_lines;  // raw telemetry lines, without newline
  std::uint64_t ticks = 0;
};

class SessionWriter {
 public:
  SessionWriter(std::ostream& out, const RuntimeConfig& config);

  void command(const CommandEntry& entry);
  void frame(const TelemetryFrame& frame);
  /// Writes the end line and flushes. Idempotent.
  void close();

  std::uint64_t frames_written() const { return frames_; }

 private:
  std::ostream& out_;
  std::uint64_t frames_ = 0;
  bool closed_ = false;
};

SessionHeader make_session_header(const RuntimeConfig& config);

/// Throws ParseError carrying the byte offset of the first bad line. A record
/// without an end line counts as truncated.
SessionRecord parse_session(const std::string& text);
SessionRecord load_session(const std::filesystem::path& path);

class ReplayRefused : public Error {
 public:
  using Error::Error;
};

/// Timestamped command for a headless run; applied before frame `tick`.
struct ScriptedCommand {
  std::uint64_t tick = 1;
  std::uint64_t client = 0;
  std::int64_t seq = 0;
  Command command;
};

/// Script file: one JSON object per line, a wire command plus "tick".
/// Blank lines and lines starting with '#' are skipped. seq defaults to the
/// line's position among commands.
std::vector<ScriptedCommand> parse_command_script(const std::string& text);

/// Runs `ticks` frames, applying commands at their tick boundaries. Commands
/// that fail validation are skipped and not logged. Writes to `writer` when
/// given; returns every frame.
std::vector<TelemetryFrame> run_headless(const RuntimeConfig& config,
                                         const std::vector<ScriptedCommand>& script,
                                         std::uint64_t ticks, SessionWriter* writer = nullptr);

/// Re-runs a record's command log against `config` and returns the
/// regenerated JSONL text. Throws ReplayRefused on a config or gait library
/// hash mismatch.
std::string replay_session(const SessionRecord& record, const RuntimeConfig& config);

/// Reads a file into a string. Throws ConfigError when it cannot be opened.
std::string read_text_file(const std::filesystem::path& path);

}  // namespace cpgait
