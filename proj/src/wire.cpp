#include "cpgait/wire.hpp"

namespace cpgait {

namespace {

Json point(const Point2& p) { return Json::array({p.x, p.y}); }

Json pair(const JointPair& q) { return Json::array({q.hip, q.knee}); }

template <typename F>
Json per_leg(const TelemetryFrame& frame, F&& f) {
  Json out = Json::array();
  for (const LegTelemetry& leg : frame.legs) out.push_back(f(leg));
  return out;
}

template <typename T>
T field(const Json& j, const char* key, const char* what) {
  const auto it = j.find(key);
  if (it == j.end()) throw CommandError(std::string("missing field '") + key + "'");
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw CommandError(std::string("field '") + key + "' must be " + what);
  }
}

double number(const Json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw CommandError(std::string("missing field '") + key + "'");
  if (!it->is_number()) throw CommandError(std::string("field '") + key + "' must be a number");
  return it->get<double>();
}

}  // namespace

Json frame_to_json(const TelemetryFrame& f) {
  Json j;
  j["type"] = "telemetry";
  j["tick"] = f.tick;
  j["t"] = f.t;
  j["gait"] = f.gait;
  j["phases"] = f.phases;
  j["feet"] = per_leg(f, [](const LegTelemetry& l) { return point(l.commanded); });
  j["joints"] = per_leg(f, [](const LegTelemetry& l) {
    return Json::array({l.joints.q_hip, l.joints.q_knee});
  });
  j["pwm"] = per_leg(f, [](const LegTelemetry& l) { return pair(l.pwm); });
  j["speed"] = f.speed;
  j["omega"] = f.omega;
  j["omega_target"] = f.omega_target;
  j["offsets"] = f.offsets;
  j["target_offsets"] = f.target_offsets;
  j["turn"] = f.turn;
  j["turn_target"] = to_string(f.turn_target);
  j["desired"] = per_leg(f, [](const LegTelemetry& l) { return point(l.desired); });
  j["filtered"] = per_leg(f, [](const LegTelemetry& l) { return point(l.filtered); });
  j["motor"] = per_leg(f, [](const LegTelemetry& l) { return pair(l.motor); });
  j["clamped"] = per_leg(f, [](const LegTelemetry& l) {
    return Json::array({l.clamp.hip_position, l.clamp.hip_rate, l.clamp.knee_position,
                        l.clamp.knee_rate});
  });
  j["projected"] = per_leg(f, [](const LegTelemetry& l) { return l.projected; });
  return j;
}

Json command_to_json(const Command& command) {
  Json j;
  j["type"] = command_name(command);
  if (const auto* c = std::get_if<SetGait>(&command)) {
    j["gait"] = c->gait;
  } else if (const auto* c = std::get_if<SetTurn>(&command)) {
    j["direction"] = to_string(c->direction);
  } else if (const auto* c = std::get_if<SetFrequency>(&command)) {
    j["hz"] = c->hz;
  } else if (const auto* c = std::get_if<InjectDelta>(&command)) {
    j["leg"] = c->leg + 1;
    j["delta"] = point(c->velocity);
  }
  return j;
}

Command command_from_json(const Json& j) {
  if (!j.is_object()) throw CommandError("command must be a JSON object");
  const auto type = field<std::string>(j, "type", "a string");
  if (type == "set_gait") return SetGait{field<std::string>(j, "gait", "a string")};
  if (type == "set_turn") {
    return SetTurn{turn_direction_from_string(field<std::string>(j, "direction", "a string"))};
  }
  if (type == "set_frequency") return SetFrequency{number(j, "hz")};
  if (type == "stop") return Stop{};
  if (type == "inject_delta") {
    const auto it = j.find("leg");
    if (it == j.end() || !it->is_number_integer()) {
      throw CommandError("field 'leg' must be an integer 1..4");
    }
    const auto leg = it->get<std::int64_t>();
    if (leg < 1 || leg > static_cast<std::int64_t>(kNumLegs)) {
      throw CommandError("field 'leg' must be an integer 1..4");
    }
    const auto d = j.find("delta");
    if (d == j.end() || !d->is_array() || d->size() != 2 || !(*d)[0].is_number() ||
        !(*d)[1].is_number()) {
      throw CommandError("field 'delta' must be [dx, dy]");
    }
    return InjectDelta{static_cast<std::size_t>(leg - 1),
                       {(*d)[0].get<double>(), (*d)[1].get<double>()}};
  }
  throw CommandError("unknown command type '" + type + "'");
}

CommandMessage parse_command_message(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("malformed JSON", e.byte);
  }
  if (!j.is_object()) throw CommandError("command must be a JSON object");
  const auto it = j.find("seq");
  if (it == j.end() || !it->is_number_integer()) {
    throw CommandError("field 'seq' must be an integer");
  }
  CommandMessage msg;
  msg.seq = it->get<std::int64_t>();
  msg.command = command_from_json(j);
  return msg;
}

std::optional<std::int64_t> peek_seq(const std::string& text) {
  const Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  const auto it = j.find("seq");
  if (it == j.end() || !it->is_number_integer()) return std::nullopt;
  return it->get<std::int64_t>();
}

std::string ack_message(std::int64_t seq, std::uint64_t tick) {
  Json j;
  j["ok"] = true;
  j["seq"] = seq;
  j["tick"] = tick;
  return j.dump();
}

std::string error_message(const std::string& reason, std::optional<std::int64_t> seq) {
  Json j;
  j["ok"] = false;
  j["reason"] = reason;
  j["seq"] = seq ? Json(*seq) : Json(nullptr);
  return j.dump();
}

}  // namespace cpgait
