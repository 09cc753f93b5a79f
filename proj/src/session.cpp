#include "cpgait/session.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "cpgait/config.hpp"
#include "cpgait/wire.hpp"

namespace cpgait {

SessionHeader make_session_header(const RuntimeConfig& config) {
  return {kSessionFormat,         config_hash(config), gaits_hash(config.gaits), 0.0,
          config.command_rate,    config.internal_dt};
}

SessionWriter::SessionWriter(std::ostream& out, const RuntimeConfig& config) : out_(out) {
  const SessionHeader h = make_session_header(config);
  Json j;
  j["type"] = "header";
  j["format"] = h.format;
  j["config_hash"] = h.config_hash;
  j["gaits_hash"] = h.gaits_hash;
  j["start_time"] = h.start_time;
  j["rate_hz"] = h.rate_hz;
  j["dt"] = h.dt;
  out_ << j.dump() << '\n';
}

void SessionWriter::command(const CommandEntry& e) {
  Json j;
  j["type"] = "command";
  j["tick"] = e.tick;
  j["client"] = e.client;
  j["seq"] = e.seq;
  j["cmd"] = command_to_json(e.command);
  out_ << j.dump() << '\n';
}

void SessionWriter::frame(const TelemetryFrame& frame) {
  out_ << frame_to_json(frame).dump() << '\n';
  ++frames_;
}

void SessionWriter::close() {
  if (closed_) return;
  closed_ = true;
  Json j;
  j["type"] = "end";
  j["ticks"] = frames_;
  out_ << j.dump() << '\n';
  out_.flush();
}

SessionRecord parse_session(const std::string& text) {
  SessionRecord rec;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool ended = false;
  while (pos < text.size()) {
    const std::size_t start = pos;
    const std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) throw ParseError("session: truncated line", start);
    const std::string line = text.substr(start, nl - start);
    pos = nl + 1;
    if (ended) throw ParseError("session: data after end line", start);

    Json j;
    try {
      j = Json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("session: bad JSON line: ") + e.what(),
                       start + (e.byte > 0 ? e.byte - 1 : 0));
    }
    try {
      const std::string type = j.at("type").get<std::string>();
      if (line_no == 0) {
        if (type != "header") throw ParseError("session: first line must be the header", start);
        rec.header.format = j.at("format").get<std::string>();
        if (rec.header.format != kSessionFormat) {
          throw ParseError("session: unsupported format " + rec.header.format, start);
        }
        rec.header.config_hash = j.at("config_hash").get<std::string>();
        rec.header.gaits_hash = j.at("gaits_hash").get<std::string>();
        rec.header.start_time = j.at("start_time").get<double>();
        rec.header.rate_hz = j.at("rate_hz").get<double>();
        rec.header.dt = j.at("dt").get<double>();
      } else if (type == "command") {
        CommandEntry e;
        e.tick = j.at("tick").get<std::uint64_t>();
        e.client = j.at("client").get<std::uint64_t>();
        e.seq = j.at("seq").get<std::int64_t>();
        e.command = command_from_json(j.at("cmd"));
        if (e.tick != rec.frame_lines.size() + 1) {
          throw ParseError("session: command tick out of order", start);
        }
        rec.commands.push_back(std::move(e));
      } else if (type == "telemetry") {
        if (j.at("tick").get<std::uint64_t>() != rec.frame_lines.size() + 1) {
          throw ParseError("session: telemetry tick gap", start);
        }
        rec.frame_lines.push_back(line);
      } else if (type == "end") {
        rec.ticks = j.at("ticks").get<std::uint64_t>();
        if (rec.ticks != rec.frame_lines.size()) {
          throw ParseError("session: end line tick count mismatch", start);
        }
        ended = true;
      } else {
        throw ParseError("session: unknown line type '" + type + "'", start);
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("session: malformed line: ") + e.what(), start);
    } catch (const CommandError& e) {
      throw ParseError(std::string("session: bad command: ") + e.what(), start);
    }
    ++line_no;
  }
  if (line_no == 0) throw ParseError("session: empty file", 0);
  if (!ended) throw ParseError("session: truncated, no end line", text.size());
  return rec;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SessionRecord load_session(const std::filesystem::path& path) {
  return parse_session(read_text_file(path));
}

std::vector<ScriptedCommand> parse_command_script(const std::string& text) {
  std::vector<ScriptedCommand> out;
  std::istringstream in(text);
  std::string line;
  std::size_t offset = 0;
  while (std::getline(in, line)) {
    const std::size_t start = offset;
    offset += line.size() + 1;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError("script: bad JSON", start + (e.byte > 0 ? e.byte - 1 : 0));
    }
    ScriptedCommand c;
    try {
      c.tick = j.at("tick").get<std::uint64_t>();
      c.seq = j.contains("seq") ? j["seq"].get<std::int64_t>()
                                : static_cast<std::int64_t>(out.size() + 1);
      c.client = j.contains("client") ? j["client"].get<std::uint64_t>() : 0;
      c.command = command_from_json(j);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("script: ") + e.what(), start);
    } catch (const CommandError& e) {
      throw ParseError(std::string("script: ") + e.what(), start);
    }
    if (c.tick == 0) throw ParseError("script: tick must be >= 1", start);
    out.push_back(std::move(c));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const ScriptedCommand& a, const ScriptedCommand& b) { return a.tick < b.tick; });
  return out;
}

std::vector<TelemetryFrame> run_headless(const RuntimeConfig& config,
                                         const std::vector<ScriptedCommand>& script,
                                         std::uint64_t ticks, SessionWriter* writer) {
  GaitRuntime runtime(config);
  std::vector<TelemetryFrame> frames;
  frames.reserve(ticks);
  std::size_t next = 0;
  for (std::uint64_t t = 1; t <= ticks; ++t) {
    for (; next < script.size() && script[next].tick <= t; ++next) {
      const ScriptedCommand& c = script[next];
      try {
        runtime.apply(c.command);
      } catch (const CommandError&) {
        continue;
      }
      if (writer) writer->command({t, c.client, c.seq, c.command});
    }
    frames.push_back(runtime.tick());
    if (writer) writer->frame(frames.back());
  }
  if (writer) writer->close();
  return frames;
}

std::string replay_session(const SessionRecord& record, const RuntimeConfig& config) {
  const SessionHeader h = make_session_header(config);
  if (record.header.config_hash != h.config_hash) {
    throw ReplayRefused("replay refused: config hash " + record.header.config_hash +
                        " does not match " + h.config_hash);
  }
  if (record.header.gaits_hash != h.gaits_hash) {
    throw ReplayRefused("replay refused: gait library hash " + record.header.gaits_hash +
                        " does not match " + h.gaits_hash);
  }
  std::vector<ScriptedCommand> script;
  script.reserve(record.commands.size());
  for (const CommandEntry& e : record.commands) {
    script.push_back({e.tick, e.client, e.seq, e.command});
  }
  std::ostringstream out;
  SessionWriter writer(out, config);
  run_headless(config, script, record.ticks, &writer);
  return out.str();
}

}  // namespace cpgait
