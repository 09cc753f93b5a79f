#pragma once

// Two-link leg kinematics, actuator limits and the joint -> motor -> PWM chain.

#include <filesystem>
#include <string>

#include "cpgait/common.hpp"

namespace cpgait {

struct LegGeometry {
  double l1 = 0.120;  // m, hip link
  double l2 = 0.120;  // m, knee link

  double max_reach() const { return l1 + l2; }
  double min_reach() const { return std::abs(l1 - l2); }
  void validate() const;
};

/// Actuator limits in the motor frame.
struct JointLimits {
  double hip_range = deg_to_rad(45.0);          // +/- rad
  double knee_range = deg_to_rad(70.0);         // +/- rad
  double hip_speed_max = deg_to_rad(461.0);     // rad/s
  double knee_speed_max = deg_to_rad(461.0);    // rad/s

  void validate() const;
};

/// IK solution. kappa is the inter-link angle, zeta the offset between the
/// hip-to-foot ray and the hip link, theta the direction of that ray, l3 its length.
struct JointAngles {
  double q_hip = 0.0;
  double q_knee = 0.0;
  double kappa = 0.0;
  double zeta = 0.0;
  double theta = 0.0;
  double l3 = 0.0;
};

class WorkspaceError : public Error {
 public:
  WorkspaceError(const std::string& what, double radius) : Error(what), radius_(radius) {}
  double radius() const noexcept { return radius_; }

 private:
  double radius_;
};

class SingularInput : public Error {
 public:
  using Error::Error;
};

class InvalidConfiguration : public Error {
 public:
  using Error::Error;
};

/// Closed-form IK. Throws SingularInput at the hip origin and WorkspaceError
/// outside [|l1-l2|, l1+l2].
JointAngles inverse_kinematics(double x, double y, const LegGeometry& geom);

struct ForwardResult {
  Point2 foot;
  bool singular = false;  // foot on the hip axis (zero-length l3)
};

/// Algebraic inverse of inverse_kinematics. Throws InvalidConfiguration when
/// q_knee - q_hip is outside [0, pi].
ForwardResult forward_kinematics(double q_hip, double q_knee, const LegGeometry& geom);

inline constexpr double kWorkspaceMargin = 1e-3;  // m

bool workspace_contains(double x, double y, const LegGeometry& geom,
                        double margin = kWorkspaceMargin);

/// Radial projection onto the margin-shrunk annulus. Points at the origin go
/// straight down (+y).
Point2 project_to_workspace(Point2 p, const LegGeometry& geom, double margin = kWorkspaceMargin);

struct JointPair {
  double hip = 0.0;
  double knee = 0.0;

  friend bool operator==(const JointPair&, const JointPair&) = default;
};

struct ClampFlags {
  bool hip_position = false;
  bool hip_rate = false;
  bool knee_position = false;
  bool knee_rate = false;

  bool any() const { return hip_position || hip_rate || knee_position || knee_rate; }
};

struct ClampResult {
  JointPair command;
  ClampFlags flags;
};

/// Position clamp followed by a rate limit relative to `previous`. Angles are
/// motor-frame radians.
ClampResult clamp_joint_command(JointPair command, JointPair previous, const JointLimits& limits,
                                double dt);

struct AffineMap {
  double scale = 1.0;
  double offset = 0.0;  // rad

  double apply(double q) const { return scale * q + offset; }
  double invert(double m) const { return (m - offset) / scale; }
};

struct PwmMap {
  double min_us = 500.0;
  double max_us = 2500.0;
  double min_angle = deg_to_rad(-135.0);
  double max_angle = deg_to_rad(135.0);
};

struct Calibration {
  AffineMap hip{1.0, deg_to_rad(-115.0)};
  AffineMap knee{1.0, deg_to_rad(-170.5)};
  PwmMap pwm{};

  /// Throws ConfigError on zero or non-finite scale, or a degenerate PWM span.
  void validate() const;
};

JointPair joints_to_motor(JointPair joints, const Calibration& calibration);
JointPair motor_to_joints(JointPair motor, const Calibration& calibration);

/// Linear angle -> pulse width map, saturating at the PWM endpoints.
double motor_to_pwm(double motor_angle, const PwmMap& map = {});

/// Calibration document (YAML):
///   hip: {scale, offset_deg}
///   knee: {scale, offset_deg}
///   pwm: {min_us, max_us, min_angle_deg, max_angle_deg}
Calibration parse_calibration_yaml(const std::string& text);
Calibration load_calibration(const std::filesystem::path& path);
std::string dump_calibration_yaml(const Calibration& calibration);

}  // namespace cpgait
