#include "cpgait/export.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "cpgait/cpg.hpp"

namespace cpgait {

std::string export_trajectory_csv(const RuntimeConfig& config, const std::string& name,
                                  std::size_t cycles, std::size_t resolution) {
  const GaitDefinition& gait = config.gaits.at(name);
  if (cycles == 0 || resolution == 0) throw InvalidInput("export: cycles and resolution must be > 0");

  std::ostringstream out;
  out << std::setprecision(17);
  out << "phase";
  for (const std::string& leg : config.leg_names) {
    for (const char* col : {"x", "y", "dx_dphi", "dy_dphi", "q_hip", "q_knee", "pwm_hip", "pwm_knee"}) {
      out << ',' << leg << '_' << col;
    }
  }
  out << '\n';

  const std::size_t rows = cycles * resolution;
  for (std::size_t k = 0; k < rows; ++k) {
    const double phi = kTwoPi * static_cast<double>(k % resolution) / static_cast<double>(resolution);
    out << phi;
    for (std::size_t leg = 0; leg < kNumLegs; ++leg) {
      const double leg_phi = wrap_phase(phi - gait.target_offsets[leg]);
      const Point2 p = eval_endpoint(gait, leg, leg_phi);
      const Point2 d = eval_endpoint_derivative(gait, leg, leg_phi);
      const Point2 reach = project_to_workspace(p, config.geometry);
      const JointAngles q = inverse_kinematics(reach.x, reach.y, config.geometry);
      JointPair m = joints_to_motor({q.q_hip, q.q_knee}, config.calibration);
      m.hip = std::clamp(m.hip, -config.limits.hip_range, config.limits.hip_range);
      m.knee = std::clamp(m.knee, -config.limits.knee_range, config.limits.knee_range);
      out << ',' << p.x << ',' << p.y << ',' << d.x << ',' << d.y << ',' << q.q_hip << ','
          << q.q_knee << ',' << motor_to_pwm(m.hip, config.calibration.pwm) << ','
          << motor_to_pwm(m.knee, config.calibration.pwm);
    }
    out << '\n';
  }
  return out.str();
}

void export_trajectory(const RuntimeConfig& config, const std::string& gait, std::size_t cycles,
                       std::size_t resolution, const std::filesystem::path& path) {
  const std::string csv = export_trajectory_csv(config, gait, cycles, resolution);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << csv;
}

}  // namespace cpgait
