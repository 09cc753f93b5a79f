#pragma once

// Fixed-rate gait pipeline: phase dynamics -> desired endpoints -> endpoint
// filter -> turning -> IK -> limits -> PWM.
//
// A GaitRuntime has a single owner that calls tick(); it never reads the wall
// clock, so the telemetry stream is a pure function of the configuration and
// the commands applied between ticks.

#include <array>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cpgait/cpg.hpp"
#include "cpgait/gait_library.hpp"
#include "cpgait/kinematics.hpp"
#include "cpgait/speed.hpp"
#include "cpgait/trajectory.hpp"

namespace cpgait {

struct RuntimeConfig {
  double command_rate = 50.0;  // Hz
  double internal_dt = 0.002;  // s; must divide 1/command_rate
  CpgConfig cpg{};             // omega_target and phase_offsets are seeded from the initial gait
  double alpha_turn = 3.0;     // 1/s
  GaitLibrary gaits = default_gait_library();
  std::string initial_gait = "trot";
  std::optional<double> initial_frequency_hz;  // defaults to the gait's nominal frequency
  double max_frequency_hz = 3.0;
  LegGeometry geometry{};
  JointLimits limits{};
  Calibration calibration{};
  std::array<std::string, kNumLegs> leg_names{"front_left", "front_right", "hind_left",
                                              "hind_right"};
  std::size_t speed_history = 500;  // frames kept for the speed estimate

  double command_period() const { return 1.0 / command_rate; }

  /// Integrator substeps per command period. Throws ConfigError if the
  /// internal step does not divide the period.
  std::size_t substeps() const;

  void validate() const;
};

struct LegTelemetry {
  Point2 desired;    // X_d at the current phase
  Point2 filtered;   // X, endpoint filter state
  Point2 commanded;  // after turn scaling and workspace projection
  bool projected = false;
  JointAngles joints;  // IK of `commanded`
  JointPair motor;     // motor frame, after limits
  JointPair pwm;       // microseconds
  ClampFlags clamp;
};

struct TelemetryFrame {
  std::uint64_t tick = 0;
  double t = 0.0;
  std::string gait;
  double omega = 0.0;
  double omega_target = 0.0;
  Vec4 phases{};
  Vec4 offsets{};
  Vec4 target_offsets{};
  Vec4 turn{};
  TurnDirection turn_target = TurnDirection::kNone;
  std::array<LegTelemetry, kNumLegs> legs{};
  double speed = 0.0;
};

// Operator commands.

struct SetGait {
  std::string gait;
};
struct SetTurn {
  TurnDirection direction = TurnDirection::kNone;
};
struct SetFrequency {
  double hz = 0.0;
};
struct Stop {};
struct InjectDelta {
  std::size_t leg = 0;  // 0-based
  Point2 velocity;      // m/s, applied for one tick
};

using Command = std::variant<SetGait, SetTurn, SetFrequency, Stop, InjectDelta>;

std::string command_name(const Command& command);

/// Checks a command against the configuration without touching any runtime.
/// Throws CommandError.
void validate_command(const Command& command, const RuntimeConfig& config);

class GaitRuntime {
 public:
  explicit GaitRuntime(RuntimeConfig config);

  /// Switches target offsets and cross-fades weights over 3 / alpha_offset seconds.
  /// Re-selecting the active gait is a no-op.
  void set_gait(const std::string& name);
  void set_turn(TurnDirection direction);
  void set_frequency(double hz);
  /// Drives the target frequency to zero; the robot halts smoothly.
  void stop();
  void inject_delta(std::size_t leg, Point2 velocity);

  /// Dispatches to the setters above. Throws CommandError, state unchanged.
  void apply(const Command& command);

  TelemetryFrame tick();

  const RuntimeConfig& config() const { return config_; }
  const CpgState& state() const { return state_; }
  const TurnState& turn() const { return turn_; }
  const std::string& active_gait() const { return active_gait_; }
  const Vec4& target_offsets() const { return target_offsets_; }
  double omega_target() const { return omega_target_; }
  std::uint64_t tick_count() const { return tick_; }

 private:
  void substep(double dt);
  void current_weights(WeightMatrix& wx, WeightMatrix& wy) const;
  double current_speed() const;

  RuntimeConfig config_;
  std::size_t substeps_;
  double period_;

  CpgState state_;
  TurnState turn_;
  Vec4 target_offsets_{};
  double omega_target_ = 0.0;
  std::string active_gait_;

  // Weight cross-fade between the previous blend and the active gait.
  WeightMatrix fade_from_x_{};
  WeightMatrix fade_from_y_{};
  double fade_progress_ = 1.0;
  double fade_duration_ = 0.0;

  std::array<JointPair, kNumLegs> previous_motors_{};
  std::uint64_t tick_ = 0;
  std::deque<SpeedSample> history_;
};

/// Command stamped with the sender and its per-client sequence number.
struct QueuedCommand {
  std::uint64_t client = 0;
  std::int64_t seq = 0;
  Command command;
};

/// Serialised hand-off from connection handlers to the tick owner.
class CommandQueue {
 public:
  void push(QueuedCommand command);
  std::vector<QueuedCommand> drain();
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::vector<QueuedCommand> pending_;
};

}  // namespace cpgait
