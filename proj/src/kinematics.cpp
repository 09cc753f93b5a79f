#include "cpgait/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cpgait {

void LegGeometry::validate() const {
  if (!all_finite(l1, l2) || l1 <= 0.0 || l2 <= 0.0) {
    throw ConfigError("leg geometry: link lengths must be positive");
  }
}

void JointLimits::validate() const {
  if (!all_finite(hip_range, knee_range, hip_speed_max, knee_speed_max) || hip_range <= 0.0 ||
      knee_range <= 0.0 || hip_speed_max <= 0.0 || knee_speed_max <= 0.0) {
    throw ConfigError("joint limits: ranges and speeds must be positive");
  }
}

JointAngles inverse_kinematics(double x, double y, const LegGeometry& geom) {
  if (!all_finite(x, y)) throw InvalidInput("inverse_kinematics: non-finite target");
  const double l1 = geom.l1;
  const double l2 = geom.l2;
  const double l3 = std::hypot(x, y);
  if (l3 == 0.0) throw SingularInput("inverse_kinematics: target at the hip origin");
  if (l3 > geom.max_reach() || l3 < geom.min_reach()) {
    throw WorkspaceError("inverse_kinematics: radius " + std::to_string(l3) +
                             " m outside reachable annulus",
                         l3);
  }

  JointAngles q;
  q.l3 = l3;
  q.theta = std::atan2(y, x);
  const double c = (l3 * l3 - l1 * l1 - l2 * l2) / (2.0 * l1 * l2);
  q.kappa = std::acos(std::clamp(c, -1.0, 1.0));
  q.zeta = std::atan2(l2 * std::sin(q.kappa), l1 + l2 * std::cos(q.kappa));
  q.q_hip = q.theta + q.zeta;
  q.q_knee = q.kappa + q.q_hip;
  return q;
}

ForwardResult forward_kinematics(double q_hip, double q_knee, const LegGeometry& geom) {
  if (!all_finite(q_hip, q_knee)) throw InvalidInput("forward_kinematics: non-finite angle");
  const double kappa = q_knee - q_hip;
  if (kappa < 0.0 || kappa > std::numbers::pi) {
    throw InvalidConfiguration("forward_kinematics: knee angle q_knee - q_hip outside [0, pi]");
  }
  const double l1 = geom.l1;
  const double l2 = geom.l2;
  const double zeta = std::atan2(l2 * std::sin(kappa), l1 + l2 * std::cos(kappa));
  const double theta = q_hip - zeta;
  const double l3sq = l1 * l1 + l2 * l2 + 2.0 * l1 * l2 * std::cos(kappa);
  const double l3 = std::sqrt(std::max(l3sq, 0.0));

  ForwardResult out;
  // Folded flat with equal links leaves only rounding noise in l3.
  if (l3 <= 1e-12 * (l1 + l2)) {
    out.singular = true;
    return out;
  }
  out.foot = {l3 * std::cos(theta), l3 * std::sin(theta)};
  return out;
}

bool workspace_contains(double x, double y, const LegGeometry& geom, double margin) {
  const double r = std::hypot(x, y);
  return r >= geom.min_reach() + margin && r <= geom.max_reach() - margin;
}

Point2 project_to_workspace(Point2 p, const LegGeometry& geom, double margin) {
  const double r = std::hypot(p.x, p.y);
  const double lo = geom.min_reach() + margin;
  const double hi = geom.max_reach() - margin;
  if (r == 0.0) return {0.0, lo};
  const double target = std::clamp(r, lo, hi);
  if (target == r) return p;
  return {p.x * target / r, p.y * target / r};
}

namespace {

double clamp_one(double cmd, double prev, double range, double speed, double dt,
                 bool& position_flag, bool& rate_flag) {
  double q = cmd;
  if (q > range) {
    q = range;
    position_flag = true;
  } else if (q < -range) {
    q = -range;
    position_flag = true;
  }
  const double max_step = speed * dt;
  const double step = q - prev;
  if (step > max_step) {
    q = prev + max_step;
    rate_flag = true;
  } else if (step < -max_step) {
    q = prev - max_step;
    rate_flag = true;
  }
  // prev itself may sit outside the range (first command after a limit change).
  return std::clamp(q, -range, range);
}

}  // namespace

ClampResult clamp_joint_command(JointPair command, JointPair previous, const JointLimits& limits,
                                double dt) {
  if (!std::isfinite(dt) || dt <= 0.0) throw InvalidInput("clamp_joint_command: dt must be positive");
  ClampResult out;
  out.command.hip = clamp_one(command.hip, previous.hip, limits.hip_range, limits.hip_speed_max, dt,
                              out.flags.hip_position, out.flags.hip_rate);
  out.command.knee = clamp_one(command.knee, previous.knee, limits.knee_range,
                               limits.knee_speed_max, dt, out.flags.knee_position,
                               out.flags.knee_rate);
  return out;
}

void Calibration::validate() const {
  for (const AffineMap* m : {&hip, &knee}) {
    if (!all_finite(m->scale, m->offset) || m->scale == 0.0) {
      throw ConfigError("calibration: joint scale must be finite and non-zero");
    }
  }
  if (!all_finite(pwm.min_us, pwm.max_us, pwm.min_angle, pwm.max_angle) ||
      pwm.max_us <= pwm.min_us || pwm.max_angle <= pwm.min_angle) {
    throw ConfigError("calibration: PWM span must be increasing in both angle and pulse width");
  }
}

JointPair joints_to_motor(JointPair joints, const Calibration& calibration) {
  calibration.validate();
  return {calibration.hip.apply(joints.hip), calibration.knee.apply(joints.knee)};
}

JointPair motor_to_joints(JointPair motor, const Calibration& calibration) {
  calibration.validate();
  return {calibration.hip.invert(motor.hip), calibration.knee.invert(motor.knee)};
}

double motor_to_pwm(double motor_angle, const PwmMap& map) {
  const double u = (motor_angle - map.min_angle) / (map.max_angle - map.min_angle);
  return std::clamp(map.min_us + u * (map.max_us - map.min_us), map.min_us, map.max_us);
}

}  // namespace cpgait
