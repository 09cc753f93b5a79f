#include <doctest.h>

#include <sstream>

#include "cpgait/config.hpp"
#include "cpgait/session.hpp"
#include "cpgait/wire.hpp"

using namespace cpgait;

namespace {

std::string record(const RuntimeConfig& c, const std::vector<ScriptedCommand>& script,
                   std::uint64_t ticks) {
  std::ostringstream out;
  SessionWriter w(out, c);
  run_headless(c, script, ticks, &w);
  return out.str();
}

std::vector<ScriptedCommand> five_commands() {
  return {{50, 1, 1, SetGait{"bound"}},
          {120, 1, 2, SetTurn{TurnDirection::kLeft}},
          {200, 2, 1, SetFrequency{1.25}},
          {260, 1, 3, InjectDelta{3, {0.05, -0.02}}},
          {400, 2, 2, Stop{}}};
}

}  // namespace

TEST_CASE("empty command log is reproducible") {
  const RuntimeConfig c;
  const std::string a = record(c, {}, 100);
  const std::string b = record(c, {}, 100);
  CHECK(a == b);
  const SessionRecord r = parse_session(a);
  CHECK(r.commands.empty());
  CHECK(r.ticks == 100);
  CHECK(r.frame_lines.size() == 100);
  CHECK(replay_session(r, c) == a);
}

TEST_CASE("ten second session with five commands replays byte for byte") {
  const RuntimeConfig c;
  const std::string text = record(c, five_commands(), 500);
  const SessionRecord r = parse_session(text);
  REQUIRE(r.commands.size() == 5);
  CHECK(r.commands[0].tick == 50);
  CHECK(std::get<SetGait>(r.commands[0].command).gait == "bound");
  CHECK(std::get<InjectDelta>(r.commands[3].command).leg == 3);
  CHECK(r.header.format == kSessionFormat);
  CHECK(r.header.config_hash == config_hash(c));
  CHECK(r.header.gaits_hash == gaits_hash(c.gaits));
  CHECK(r.header.start_time == 0.0);
  CHECK(replay_session(r, c) == text);
}

TEST_CASE("frames carry the wire telemetry keys in order") {
  const std::string text = record(RuntimeConfig{}, {}, 3);
  const SessionRecord r = parse_session(text);
  const Json j = Json::parse(r.frame_lines[1]);
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  const std::vector<std::string> lead{"type", "tick", "t", "gait", "phases", "feet", "joints", "pwm", "speed"};
  REQUIRE(keys.size() >= lead.size());
  for (std::size_t i = 0; i < lead.size(); ++i) CHECK(keys[i] == lead[i]);
  CHECK(j["tick"] == 2);
  CHECK(j["feet"].size() == 4);
  CHECK(j["feet"][0].size() == 2);
  CHECK(j["joints"][3].size() == 2);
  CHECK(j["pwm"][2].size() == 2);
}

TEST_CASE("replay is refused on a config or gait library mismatch") {
  const RuntimeConfig c;
  const SessionRecord r = parse_session(record(c, five_commands(), 60));
  RuntimeConfig other = c;
  other.cpg.alpha_endpoint = 24.0;
  CHECK_THROWS_AS(replay_session(r, other), ReplayRefused);
  RuntimeConfig gaits = c;
  GaitDefinition g = gaits.gaits.at("walk");
  g.nominal_frequency *= 1.01;
  gaits.gaits.add(g);
  CHECK_THROWS_AS(replay_session(r, gaits), ReplayRefused);
}

TEST_CASE("truncated or corrupted records report a byte offset") {
  const std::string text = record(RuntimeConfig{}, five_commands(), 60);
  SUBCASE("cut mid-line") {
    const std::size_t cut = text.size() / 2;
    const std::size_t line_start = text.rfind('\n', cut) + 1;
    try {
      parse_session(text.substr(0, cut));
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.offset() == line_start);
    }
  }
  SUBCASE("cut at a line boundary") {
    const std::size_t cut = text.rfind('\n', text.size() - 2) + 1;  // drop the end line
    try {
      parse_session(text.substr(0, cut));
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.offset() == cut);
    }
  }
  SUBCASE("garbage line") {
    std::string bad = text;
    const std::size_t second = bad.find('\n') + 1;
    bad.insert(second, "{not json}\n");
    try {
      parse_session(bad);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.offset() >= second);
      CHECK(e.offset() < second + 11);
    }
  }
  SUBCASE("missing frame") {
    std::string bad = text;
    const std::size_t a = bad.find("\"tick\":5,");
    const std::size_t start = bad.rfind('\n', a) + 1;
    const std::size_t end = bad.find('\n', a) + 1;
    bad.erase(start, end - start);
    CHECK_THROWS_AS(parse_session(bad), ParseError);
  }
  CHECK_THROWS_AS(parse_session(""), ParseError);
}

TEST_CASE("command scripts") {
  const std::string script =
      "# tick-stamped commands\n"
      "{\"tick\": 10, \"type\": \"set_gait\", \"gait\": \"walk\"}\n"
      "\n"
      "{\"tick\": 5, \"type\": \"set_turn\", \"direction\": \"right\", \"seq\": 9}\n";
  const auto cmds = parse_command_script(script);
  REQUIRE(cmds.size() == 2);
  CHECK(cmds[0].tick == 5);
  CHECK(cmds[0].seq == 9);
  CHECK(cmds[1].seq == 1);
  CHECK_THROWS_AS(parse_command_script("{\"type\": \"stop\"}\n"), ParseError);
  CHECK_THROWS_AS(parse_command_script("{\"tick\": 1, \"type\": \"jump\"}\n"), ParseError);
}

TEST_CASE("invalid scripted commands are skipped and not logged") {
  const RuntimeConfig c;
  const std::string text = record(c, {{3, 0, 1, SetGait{"canter"}}, {4, 0, 2, SetFrequency{9.0}}}, 10);
  CHECK(parse_session(text).commands.empty());
  CHECK(text == record(c, {}, 10));
}
