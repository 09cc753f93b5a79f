#include "cpgait/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace cpgait {

namespace {

template <typename T>
void read(const YAML::Node& node, const char* key, T& out) {
  if (node[key]) out = node[key].as<T>();
}

void read_deg(const YAML::Node& node, const char* key, double& out) {
  if (node[key]) out = deg_to_rad(node[key].as<double>());
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

RuntimeConfig parse_runtime_config_yaml(const std::string& text,
                                        const std::filesystem::path& base_dir) {
  RuntimeConfig cfg;
  try {
    const YAML::Node doc = YAML::Load(text);
    if (doc && !doc.IsNull() && !doc.IsMap()) {
      throw ConfigError("runtime config: top level must be a mapping");
    }
    read(doc, "command_rate_hz", cfg.command_rate);
    read(doc, "internal_dt", cfg.internal_dt);
    read(doc, "max_frequency_hz", cfg.max_frequency_hz);
    read(doc, "initial_gait", cfg.initial_gait);
    if (doc["initial_frequency_hz"] && !doc["initial_frequency_hz"].IsNull()) {
      cfg.initial_frequency_hz = doc["initial_frequency_hz"].as<double>();
    }
    read(doc, "speed_history", cfg.speed_history);
    if (const YAML::Node names = doc["leg_names"]) {
      if (!names.IsSequence() || names.size() != kNumLegs) {
        throw ConfigError("runtime config: leg_names needs four entries");
      }
      for (std::size_t i = 0; i < kNumLegs; ++i) cfg.leg_names[i] = names[i].as<std::string>();
    }
    if (const YAML::Node f = doc["filters"]) {
      read(f, "alpha_omega", cfg.cpg.alpha_omega);
      read(f, "alpha_endpoint", cfg.cpg.alpha_endpoint);
      read(f, "alpha_offset", cfg.cpg.alpha_offset);
      read(f, "alpha_turn", cfg.alpha_turn);
    }
    if (const YAML::Node c = doc["coupling"]) {
      double gain = cfg.cpg.coupling.gains[0][1];
      double sign = cfg.cpg.coupling.sign;
      read(c, "gain", gain);
      read(c, "sign", sign);
      cfg.cpg.coupling = Coupling::all_to_all(gain, sign);
    }
    if (const YAML::Node g = doc["geometry"]) {
      read(g, "l1", cfg.geometry.l1);
      read(g, "l2", cfg.geometry.l2);
    }
    if (const YAML::Node l = doc["limits"]) {
      read_deg(l, "hip_range_deg", cfg.limits.hip_range);
      read_deg(l, "knee_range_deg", cfg.limits.knee_range);
      read_deg(l, "hip_speed_deg_s", cfg.limits.hip_speed_max);
      read_deg(l, "knee_speed_deg_s", cfg.limits.knee_speed_max);
    }
    if (doc["gaits"]) {
      cfg.gaits = load_gait_library(resolve(base_dir, doc["gaits"].as<std::string>()));
    }
    if (doc["calibration"]) {
      cfg.calibration = load_calibration(resolve(base_dir, doc["calibration"].as<std::string>()));
    }
  } catch (const YAML::Exception& e) {
    throw ParseError("runtime config: " + e.msg, static_cast<std::size_t>(std::max(e.mark.pos, 0)));
  }
  cfg.validate();
  return cfg;
}

RuntimeConfig load_runtime_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open runtime config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_runtime_config_yaml(ss.str(), path.parent_path());
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string config_hash(const RuntimeConfig& c) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["command_rate"] = c.command_rate;
  j["internal_dt"] = c.internal_dt;
  j["alpha_omega"] = c.cpg.alpha_omega;
  j["alpha_endpoint"] = c.cpg.alpha_endpoint;
  j["alpha_offset"] = c.cpg.alpha_offset;
  j["alpha_turn"] = c.alpha_turn;
  j["coupling_gains"] = c.cpg.coupling.gains;
  j["coupling_sign"] = c.cpg.coupling.sign;
  j["initial_gait"] = c.initial_gait;
  j["initial_frequency_hz"] =
      c.initial_frequency_hz ? ordered_json(*c.initial_frequency_hz) : ordered_json(nullptr);
  j["max_frequency_hz"] = c.max_frequency_hz;
  j["geometry"] = {c.geometry.l1, c.geometry.l2};
  j["limits"] = {c.limits.hip_range, c.limits.knee_range, c.limits.hip_speed_max,
                 c.limits.knee_speed_max};
  j["calibration"] = {c.calibration.hip.scale,  c.calibration.hip.offset,
                      c.calibration.knee.scale, c.calibration.knee.offset,
                      c.calibration.pwm.min_us, c.calibration.pwm.max_us,
                      c.calibration.pwm.min_angle, c.calibration.pwm.max_angle};
  j["leg_names"] = c.leg_names;
  j["speed_history"] = c.speed_history;
  return hex64(fnv1a64(j.dump()));
}

std::string gaits_hash(const GaitLibrary& gaits) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const GaitDefinition& g : gaits.gaits()) {
    j.push_back({{"name", g.name},
                 {"weights_x", g.weights_x},
                 {"weights_y", g.weights_y},
                 {"offsets", g.target_offsets},
                 {"nominal_frequency", g.nominal_frequency}});
  }
  return hex64(fnv1a64(j.dump()));
}

}  // namespace cpgait
