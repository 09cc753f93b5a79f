#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cpgait/cpg.hpp"
#include "cpgait/runtime.hpp"
#include "cpgait/wire.hpp"

using namespace cpgait;
using std::numbers::pi;

namespace {

RuntimeConfig at_hz(double hz, const std::string& gait = "trot") {
  RuntimeConfig c;
  c.initial_gait = gait;
  c.initial_frequency_hz = hz;
  return c;
}

double motor_step(const TelemetryFrame& a, const TelemetryFrame& b, std::size_t leg) {
  return std::max(std::abs(a.legs[leg].motor.hip - b.legs[leg].motor.hip),
                  std::abs(a.legs[leg].motor.knee - b.legs[leg].motor.knee));
}

void check_safe(const TelemetryFrame& prev, const TelemetryFrame& f, const RuntimeConfig& c) {
  const double step = deg_to_rad(461.0) * c.command_period() * (1 + 1e-12);
  for (std::size_t leg = 0; leg < kNumLegs; ++leg) {
    REQUIRE(std::abs(f.legs[leg].motor.hip) <= c.limits.hip_range);
    REQUIRE(std::abs(f.legs[leg].motor.knee) <= c.limits.knee_range);
    REQUIRE(motor_step(prev, f, leg) <= step);
  }
}

}  // namespace

TEST_CASE("config validation") {
  RuntimeConfig c;
  CHECK(c.substeps() == 10);
  c.internal_dt = 0.003;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RuntimeConfig{};
  c.initial_gait = "canter";
  CHECK_THROWS_AS(GaitRuntime{c}, ConfigError);
  c = RuntimeConfig{};
  c.initial_frequency_hz = 4.0;
  CHECK_THROWS_AS(GaitRuntime{c}, ConfigError);
  c = RuntimeConfig{};
  c.gaits = GaitLibrary{};
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("zero frequency gives identical consecutive frames") {
  GaitRuntime rt(at_hz(0.0));
  TelemetryFrame prev = rt.tick();
  for (int k = 0; k < 50; ++k) {
    const TelemetryFrame f = rt.tick();
    CHECK(f.tick == prev.tick + 1);
    CHECK(f.phases == prev.phases);
    for (std::size_t leg = 0; leg < kNumLegs; ++leg) {
      CHECK(f.legs[leg].filtered == prev.legs[leg].filtered);
      CHECK(f.legs[leg].motor == prev.legs[leg].motor);
      CHECK(f.legs[leg].pwm == prev.legs[leg].pwm);
    }
    CHECK(f.speed == 0.0);
    prev = f;
  }
}

TEST_CASE("trot at 1.5 Hz locks diagonal legs") {
  RuntimeConfig c = at_hz(1.5, "bound");
  GaitRuntime rt(c);
  rt.set_gait("trot");
  TelemetryFrame f;
  for (int k = 0; k < 500; ++k) f = rt.tick();
  CHECK(std::abs(wrap_difference(f.phases[0] - f.phases[3])) < 1e-3);
  CHECK(std::abs(wrap_difference(f.phases[1] - f.phases[2])) < 1e-3);
  CHECK(std::abs(std::abs(wrap_difference(f.phases[0] - f.phases[1])) - pi) < 1e-3);
}

TEST_CASE("set_gait") {
  RuntimeConfig c = at_hz(0.5);
  SUBCASE("unknown gait leaves the state untouched") {
    GaitRuntime a(c), b(c);
    a.tick();
    b.tick();
    CHECK_THROWS_AS(a.apply(SetGait{"canter"}), CommandError);
    CHECK(frame_to_json(a.tick()).dump() == frame_to_json(b.tick()).dump());
  }
  SUBCASE("re-selecting the active gait is a no-op") {
    GaitRuntime a(c), b(c);
    for (int k = 0; k < 7; ++k) {
      a.tick();
      b.tick();
    }
    a.set_gait("trot");
    for (int k = 0; k < 20; ++k) {
      CHECK(frame_to_json(a.tick()).dump() == frame_to_json(b.tick()).dump());
    }
  }
  SUBCASE("trot to bound settles within 1.5 s and stays rate-safe") {
    GaitRuntime rt(c);
    TelemetryFrame prev = rt.tick();
    rt.set_gait("bound");
    const Vec4 bound = c.gaits.at("bound").target_offsets;
    for (int k = 0; k < 75; ++k) {
      const TelemetryFrame f = rt.tick();
      check_safe(prev, f, c);
      // Active offsets are the filter state, never the raw target, mid-transition.
      CHECK(f.offsets == rt.state().current_offsets);
      CHECK(f.target_offsets == bound);
      if (k < 10) CHECK(f.offsets != bound);
      prev = f;
    }
    for (std::size_t i = 0; i < kNumLegs; ++i) {
      CHECK(std::abs(wrap_difference(prev.offsets[i] - bound[i])) < 0.01);
    }
    CHECK(prev.gait == "bound");
  }
}

TEST_CASE("set_frequency") {
  GaitRuntime rt(at_hz(0.0));
  rt.set_frequency(1.5);
  TelemetryFrame f;
  for (int k = 0; k < 25; ++k) f = rt.tick();
  CHECK(std::abs(f.omega - 3 * pi) / (3 * pi) < 0.01);
  CHECK(f.omega == doctest::Approx(3 * pi * (1 - std::exp(-5.0))).epsilon(1e-9));
  CHECK_THROWS_AS(rt.set_frequency(5.0), CommandError);
  CHECK_THROWS_AS(rt.set_frequency(-0.1), CommandError);
  CHECK(rt.omega_target() == doctest::Approx(3 * pi));

  rt.stop();
  double last = f.omega;
  for (int k = 0; k < 100; ++k) {
    f = rt.tick();
    REQUIRE(f.omega < last);
    REQUIRE(f.omega >= 0.0);
    last = f.omega;
  }
  CHECK(f.omega < 3 * pi * std::exp(-19.0));
}

TEST_CASE("left turn suppresses the stride of legs 2 and 3 only") {
  RuntimeConfig c = at_hz(0.5);
  GaitRuntime rt(c), straight(c);
  rt.set_turn(TurnDirection::kLeft);
  TelemetryFrame f, g;
  for (int k = 0; k < 250; ++k) {
    f = rt.tick();
    g = straight.tick();
  }
  double x_amp[kNumLegs] = {};
  for (int k = 0; k < 100; ++k) {
    f = rt.tick();
    g = straight.tick();
    for (std::size_t leg = 0; leg < kNumLegs; ++leg) {
      x_amp[leg] = std::max(x_amp[leg], std::abs(f.legs[leg].commanded.x));
      REQUIRE(f.legs[leg].commanded.y == g.legs[leg].commanded.y);
    }
  }
  CHECK(x_amp[1] < 1e-3 * 0.05);
  CHECK(x_amp[2] < 1e-3 * 0.05);
  CHECK(x_amp[0] > 0.04);
  CHECK(x_amp[3] > 0.04);
  CHECK(f.turn_target == TurnDirection::kLeft);
}

TEST_CASE("inject_delta nudges one leg for one frame") {
  RuntimeConfig c = at_hz(0.0);
  GaitRuntime a(c), b(c);
  a.inject_delta(2, {0.1, 0.0});
  const TelemetryFrame fa = a.tick();
  const TelemetryFrame fb = b.tick();
  const double shift = fa.legs[2].filtered.x - fb.legs[2].filtered.x;
  // Pure integration would give 0.1 * 0.02 = 2 mm; the endpoint filter pulls part back.
  CHECK(shift > 0.5 * 0.002);
  CHECK(shift < 0.002);
  CHECK(fa.legs[0].filtered == fb.legs[0].filtered);
  CHECK(a.state().delta_input[2] == Point2{0.0, 0.0});
  CHECK_THROWS_AS(a.inject_delta(4, {0, 0}), CommandError);
  CHECK_THROWS_AS(a.inject_delta(0, {std::nan(""), 0}), CommandError);
}

TEST_CASE("identical command histories give identical frames") {
  RuntimeConfig c = at_hz(0.8);
  GaitRuntime a(c), b(c);
  for (int k = 0; k < 300; ++k) {
    if (k == 40) {
      a.apply(SetGait{"gallop"});
      b.apply(SetGait{"gallop"});
    }
    if (k == 130) {
      a.apply(SetTurn{TurnDirection::kRight});
      b.apply(SetTurn{TurnDirection::kRight});
    }
    REQUIRE(frame_to_json(a.tick()).dump() == frame_to_json(b.tick()).dump());
  }
}

TEST_CASE("random command storms never break the limits") {
  RuntimeConfig c;
  GaitRuntime rt(c);
  std::mt19937_64 rng(31);
  const auto& gaits = c.gaits.gaits();
  std::uniform_int_distribution<int> pick(0, 9);
  std::uniform_real_distribution<double> hz(0.0, 3.0);
  TelemetryFrame prev = rt.tick();
  for (int k = 0; k < 3000; ++k) {
    switch (pick(rng)) {
      case 0: rt.set_gait(gaits[static_cast<std::size_t>(pick(rng)) % gaits.size()].name); break;
      case 1: rt.set_turn(static_cast<TurnDirection>(pick(rng) % 3)); break;
      case 2: rt.set_frequency(hz(rng)); break;
      case 3: rt.inject_delta(static_cast<std::size_t>(pick(rng) % 4), {0.5, -0.5}); break;
      default: break;
    }
    const TelemetryFrame f = rt.tick();
    check_safe(prev, f, c);
    for (const LegTelemetry& l : f.legs) {
      REQUIRE(l.pwm.hip >= 500.0);
      REQUIRE(l.pwm.knee <= 2500.0);
      REQUIRE(all_finite(l.commanded));
    }
    prev = f;
  }
}

TEST_CASE("speed estimate grows linearly with frequency") {
  double per_hz[3];
  const double freqs[3] = {0.5, 1.0, 1.5};
  for (int i = 0; i < 3; ++i) {
    GaitRuntime rt(at_hz(freqs[i]));
    TelemetryFrame f;
    for (int k = 0; k < 300; ++k) f = rt.tick();
    CHECK(f.speed > 0.0);
    per_hz[i] = f.speed / freqs[i];
  }
  CHECK(per_hz[1] == doctest::Approx(per_hz[0]).epsilon(0.10));
  CHECK(per_hz[2] == doctest::Approx(per_hz[0]).epsilon(0.10));
}

TEST_CASE("command queue preserves order") {
  CommandQueue q;
  q.push({1, 1, SetGait{"bound"}});
  q.push({2, 1, SetTurn{TurnDirection::kLeft}});
  q.push({1, 2, Stop{}});
  CHECK(q.size() == 3);
  const auto drained = q.drain();
  REQUIRE(drained.size() == 3);
  CHECK(drained[0].client == 1);
  CHECK(drained[1].client == 2);
  CHECK(drained[2].seq == 2);
  CHECK(q.size() == 0);
}
