#include "cpgait/runtime.hpp"

#include <algorithm>
#include <cmath>

namespace cpgait {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

std::size_t RuntimeConfig::substeps() const {
  if (!all_finite(command_rate, internal_dt) || command_rate <= 0.0 || internal_dt <= 0.0) {
    throw ConfigError("runtime: command rate and internal dt must be positive");
  }
  const double ratio = command_period() / internal_dt;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * rounded) {
    throw ConfigError("runtime: internal dt must divide the command period exactly");
  }
  return static_cast<std::size_t>(rounded);
}

void RuntimeConfig::validate() const {
  substeps();
  cpg.validate();
  gaits.validate();
  geometry.validate();
  limits.validate();
  calibration.validate();
  if (!gaits.contains(initial_gait)) {
    throw ConfigError("runtime: initial gait '" + initial_gait + "' not in library");
  }
  if (!std::isfinite(alpha_turn) || alpha_turn < 0.0) {
    throw ConfigError("runtime: turn filter gain must be non-negative");
  }
  if (!std::isfinite(max_frequency_hz) || max_frequency_hz < 0.0) {
    throw ConfigError("runtime: bad frequency cap");
  }
  if (initial_frequency_hz &&
      !(*initial_frequency_hz >= 0.0 && *initial_frequency_hz <= max_frequency_hz)) {
    throw ConfigError("runtime: initial frequency outside [0, cap]");
  }
  if (speed_history < 2) throw ConfigError("runtime: speed history needs at least two frames");
}

std::string command_name(const Command& command) {
  return std::visit(Overloaded{
                        [](const SetGait&) { return std::string("set_gait"); },
                        [](const SetTurn&) { return std::string("set_turn"); },
                        [](const SetFrequency&) { return std::string("set_frequency"); },
                        [](const Stop&) { return std::string("stop"); },
                        [](const InjectDelta&) { return std::string("inject_delta"); },
                    },
                    command);
}

void validate_command(const Command& command, const RuntimeConfig& config) {
  std::visit(Overloaded{
                 [&](const SetGait& c) {
                   if (!config.gaits.contains(c.gait)) {
                     throw CommandError("unknown gait '" + c.gait + "'");
                   }
                 },
                 [](const SetTurn&) {},
                 [&](const SetFrequency& c) {
                   if (!(c.hz >= 0.0 && c.hz <= config.max_frequency_hz)) {
                     throw CommandError("frequency must lie in [0, " +
                                        std::to_string(config.max_frequency_hz) + "] Hz");
                   }
                 },
                 [](const Stop&) {},
                 [](const InjectDelta& c) {
                   if (c.leg >= kNumLegs) throw CommandError("leg index out of range");
                   if (!all_finite(c.velocity)) throw CommandError("non-finite delta");
                 },
             },
             command);
}

GaitRuntime::GaitRuntime(RuntimeConfig config) : config_(std::move(config)) {
  config_.validate();
  substeps_ = config_.substeps();
  period_ = config_.command_period();

  const GaitDefinition& gait = config_.gaits.at(config_.initial_gait);
  active_gait_ = gait.name;
  target_offsets_ = gait.target_offsets;
  omega_target_ = config_.initial_frequency_hz ? *config_.initial_frequency_hz * kTwoPi
                                               : gait.nominal_frequency;
  config_.cpg.omega_target = omega_target_;
  config_.cpg.phase_offsets = gait.target_offsets;
  fade_duration_ = config_.cpg.alpha_offset > 0.0 ? 3.0 / config_.cpg.alpha_offset : 0.0;

  state_.omega = omega_target_;
  state_.current_offsets = gait.target_offsets;
  state_.phases = locked_phases(gait.target_offsets);
  for (std::size_t leg = 0; leg < kNumLegs; ++leg) {
    state_.endpoints[leg] = eval_endpoint(gait, leg, state_.phases[leg]);
  }
  fade_from_x_ = gait.weights_x;
  fade_from_y_ = gait.weights_y;

  for (std::size_t leg = 0; leg < kNumLegs; ++leg) {
    const Point2 p = project_to_workspace(state_.endpoints[leg], config_.geometry);
    const JointAngles q = inverse_kinematics(p.x, p.y, config_.geometry);
    JointPair m = joints_to_motor({q.q_hip, q.q_knee}, config_.calibration);
    m.hip = std::clamp(m.hip, -config_.limits.hip_range, config_.limits.hip_range);
    m.knee = std::clamp(m.knee, -config_.limits.knee_range, config_.limits.knee_range);
    previous_motors_[leg] = m;
  }
}

void GaitRuntime::set_gait(const std::string& name) {
  const GaitDefinition& next = config_.gaits.at(name);
  if (name == active_gait_) return;
  WeightMatrix wx{};
  WeightMatrix wy{};
  current_weights(wx, wy);
  fade_from_x_ = wx;
  fade_from_y_ = wy;
  fade_progress_ = fade_duration_ > 0.0 ? 0.0 : 1.0;
  active_gait_ = next.name;
  target_offsets_ = next.target_offsets;
}

void GaitRuntime::set_turn(TurnDirection direction) { turn_.target = direction; }

void GaitRuntime::set_frequency(double hz) {
  validate_command(SetFrequency{hz}, config_);
  omega_target_ = hz * kTwoPi;
}

void GaitRuntime::stop() { omega_target_ = 0.0; }

void GaitRuntime::inject_delta(std::size_t leg, Point2 velocity) {
  validate_command(InjectDelta{leg, velocity}, config_);
  state_.delta_input[leg].x += velocity.x;
  state_.delta_input[leg].y += velocity.y;
}

void GaitRuntime::apply(const Command& command) {
  validate_command(command, config_);
  std::visit(Overloaded{
                 [&](const SetGait& c) { set_gait(c.gait); },
                 [&](const SetTurn& c) { set_turn(c.direction); },
                 [&](const SetFrequency& c) { set_frequency(c.hz); },
                 [&](const Stop&) { stop(); },
                 [&](const InjectDelta& c) { inject_delta(c.leg, c.velocity); },
             },
             command);
}

void GaitRuntime::current_weights(WeightMatrix& wx, WeightMatrix& wy) const {
  const GaitDefinition& to = config_.gaits.at(active_gait_);
  if (fade_progress_ >= 1.0) {
    wx = to.weights_x;
    wy = to.weights_y;
    return;
  }
  const double s = fade_progress_;
  for (std::size_t leg = 0; leg < kNumLegs; ++leg) {
    for (std::size_t j = 0; j < kBasisSize; ++j) {
      wx[leg][j] = fade_from_x_[leg][j] + s * (to.weights_x[leg][j] - fade_from_x_[leg][j]);
      wy[leg][j] = fade_from_y_[leg][j] + s * (to.weights_y[leg][j] - fade_from_y_[leg][j]);
    }
  }
}

void GaitRuntime::substep(double dt) {
  const CpgConfig& cpg = config_.cpg;
  state_.omega = step_frequency(state_.omega, omega_target_, cpg.alpha_omega, dt);
  state_.current_offsets =
      step_offset_filter(state_.current_offsets, target_offsets_, cpg.alpha_offset, dt);
  turn_ = step_turn_filter(turn_, dt, config_.alpha_turn);
  if (fade_progress_ < 1.0) fade_progress_ = std::min(1.0, fade_progress_ + dt / fade_duration_);

  WeightMatrix wx{};
  WeightMatrix wy{};
  current_weights(wx, wy);

  const Vec4 rates =
      phase_rates(state_.phases, state_.omega, cpg.coupling, state_.current_offsets);
  for (std::size_t leg = 0; leg < kNumLegs; ++leg) {
    const double phi = state_.phases[leg];
    const Point2 xd = eval_endpoint(wx[leg], wy[leg], phi);
    const Point2 xd_prime = eval_endpoint_derivative(wx[leg], wy[leg], phi);
    state_.endpoints[leg] = step_endpoint_filter(state_.endpoints[leg], xd, xd_prime, rates[leg],
                                                 cpg.alpha_endpoint, state_.delta_input[leg], dt);
  }
  state_.phases =
      step_phases(state_.phases, state_.omega, cpg.coupling, state_.current_offsets, dt);
}

TelemetryFrame GaitRuntime::tick() {
  const double dt = period_ / static_cast<double>(substeps_);
  for (std::size_t k = 0; k < substeps_; ++k) substep(dt);
  state_.delta_input = {};
  ++tick_;

  TelemetryFrame frame;
  frame.tick = tick_;
  frame.t = static_cast<double>(tick_) * period_;
  frame.gait = active_gait_;
  frame.omega = state_.omega;
  frame.omega_target = omega_target_;
  frame.phases = state_.phases;
  frame.offsets = state_.current_offsets;
  frame.target_offsets = target_offsets_;
  frame.turn = turn_.coefficients;
  frame.turn_target = turn_.target;

  WeightMatrix wx{};
  WeightMatrix wy{};
  current_weights(wx, wy);

  Vec4 x_filtered{};
  for (std::size_t leg = 0; leg < kNumLegs; ++leg) x_filtered[leg] = state_.endpoints[leg].x;
  const Vec4 x_turned = apply_turning(x_filtered, turn_);

  SpeedSample sample;
  sample.t = frame.t;
  sample.omega = state_.omega;

  for (std::size_t leg = 0; leg < kNumLegs; ++leg) {
    LegTelemetry& lt = frame.legs[leg];
    lt.desired = eval_endpoint(wx[leg], wy[leg], state_.phases[leg]);
    lt.filtered = state_.endpoints[leg];
    const Point2 target{x_turned[leg], state_.endpoints[leg].y};
    lt.commanded = target;
    if (!workspace_contains(target.x, target.y, config_.geometry)) {
      lt.commanded = project_to_workspace(target, config_.geometry);
      lt.projected = true;
    }
    lt.joints = inverse_kinematics(lt.commanded.x, lt.commanded.y, config_.geometry);
    const JointPair raw =
        joints_to_motor({lt.joints.q_hip, lt.joints.q_knee}, config_.calibration);
    const ClampResult clamped =
        clamp_joint_command(raw, previous_motors_[leg], config_.limits, period_);
    lt.motor = clamped.command;
    lt.clamp = clamped.flags;
    lt.pwm = {motor_to_pwm(lt.motor.hip, config_.calibration.pwm),
              motor_to_pwm(lt.motor.knee, config_.calibration.pwm)};
    previous_motors_[leg] = lt.motor;
    sample.feet[leg] = lt.filtered;
  }

  history_.push_back(sample);
  while (history_.size() > config_.speed_history) history_.pop_front();
  frame.speed = current_speed();
  return frame;
}

double GaitRuntime::current_speed() const {
  if (history_.size() < 2) return 0.0;
  // Smallest trailing window that spans one full cycle of leg 1.
  double covered = 0.0;
  std::size_t first = history_.size() - 1;
  while (first > 0 && covered < kTwoPi) {
    covered += std::abs(history_[first].omega) * (history_[first].t - history_[first - 1].t);
    --first;
  }
  const std::vector<SpeedSample> window(history_.begin() + static_cast<std::ptrdiff_t>(first),
                                        history_.end());
  if (covered >= kTwoPi) return estimate_body_speed(window);
  return estimate_body_speed_partial(window);
}

void CommandQueue::push(QueuedCommand command) {
  std::lock_guard<std::mutex> lock(mutex_);
  pending_.push_back(std::move(command));
}

std::vector<QueuedCommand> CommandQueue::drain() {
  std::lock_guard<std::mutex> lock(mutex_);
  std::vector<QueuedCommand> out;
  out.swap(pending_);
  return out;
}

std::size_t CommandQueue::size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return pending_.size();
}

}  // namespace cpgait
