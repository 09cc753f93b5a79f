#pragma once

// JSON wire format shared by the socket protocol and session records.
//
// Up:   {"type":"set_gait","gait":"trot","seq":7}
//       {"type":"set_turn","direction":"left","seq":8}
//       {"type":"set_frequency","hz":1.5,"seq":9}
//       {"type":"stop","seq":10}
//       {"type":"inject_delta","leg":1,"delta":[dx,dy],"seq":11}   leg is 1-based, m/s
// Down: telemetry frames, {"ok":true,"seq":N,"tick":T}, {"ok":false,"reason":str,"seq":N}

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "cpgait/runtime.hpp"

namespace cpgait {

using Json = nlohmann::ordered_json;

/// Telemetry message. Leading keys: type, tick, t, gait, phases, feet,
/// joints, pwm, speed; diagnostic keys follow.
Json frame_to_json(const TelemetryFrame& frame);

/// Command payload without seq.
Json command_to_json(const Command& command);

/// Throws CommandError on a missing or ill-typed field.
Command command_from_json(const Json& j);

struct CommandMessage {
  std::int64_t seq = 0;
  Command command;
};

/// Parses one upstream message. Throws ParseError for text that is not JSON
/// and CommandError for well-formed JSON that is not a valid command.
CommandMessage parse_command_message(const std::string& text);

/// Best-effort seq extraction for error replies.
std::optional<std::int64_t> peek_seq(const std::string& text);

std::string ack_message(std::int64_t seq, std::uint64_t tick);
std::string error_message(const std::string& reason, std::optional<std::int64_t> seq);

}  // namespace cpgait
