#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "cpgait/kinematics.hpp"

namespace cpgait {

namespace {

AffineMap read_affine(const YAML::Node& node, const AffineMap& fallback) {
  if (!node) return fallback;
  AffineMap m = fallback;
  if (node["scale"]) m.scale = node["scale"].as<double>();
  if (node["offset_deg"]) m.offset = deg_to_rad(node["offset_deg"].as<double>());
  return m;
}

}  // namespace

Calibration parse_calibration_yaml(const std::string& text) {
  Calibration cal;
  try {
    const YAML::Node doc = YAML::Load(text);
    cal.hip = read_affine(doc["hip"], cal.hip);
    cal.knee = read_affine(doc["knee"], cal.knee);
    if (const YAML::Node pwm = doc["pwm"]) {
      if (pwm["min_us"]) cal.pwm.min_us = pwm["min_us"].as<double>();
      if (pwm["max_us"]) cal.pwm.max_us = pwm["max_us"].as<double>();
      if (pwm["min_angle_deg"]) cal.pwm.min_angle = deg_to_rad(pwm["min_angle_deg"].as<double>());
      if (pwm["max_angle_deg"]) cal.pwm.max_angle = deg_to_rad(pwm["max_angle_deg"].as<double>());
    }
  } catch (const YAML::Exception& e) {
    throw ParseError("calibration: " + e.msg, static_cast<std::size_t>(std::max(e.mark.pos, 0)));
  }
  cal.validate();
  return cal;
}

Calibration load_calibration(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open calibration " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_calibration_yaml(ss.str());
}

std::string dump_calibration_yaml(const Calibration& cal) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  for (const auto& [key, map] : {std::pair{"hip", cal.hip}, std::pair{"knee", cal.knee}}) {
    out << YAML::Key << key << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "scale" << YAML::Value << map.scale;
    out << YAML::Key << "offset_deg" << YAML::Value << rad_to_deg(map.offset);
    out << YAML::EndMap;
  }
  out << YAML::Key << "pwm" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "min_us" << YAML::Value << cal.pwm.min_us;
  out << YAML::Key << "max_us" << YAML::Value << cal.pwm.max_us;
  out << YAML::Key << "min_angle_deg" << YAML::Value << rad_to_deg(cal.pwm.min_angle);
  out << YAML::Key << "max_angle_deg" << YAML::Value << rad_to_deg(cal.pwm.max_angle);
  out << YAML::EndMap << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace cpgait
