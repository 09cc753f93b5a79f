#pragma once

// Runtime configuration files and content hashes.

#include <cstdint>
#include <filesystem>
#include <string>

#include "cpgait/runtime.hpp"

namespace cpgait {

/// Runtime document (YAML). Every key is optional; missing keys keep the
/// defaults of RuntimeConfig.
///
///   command_rate_hz, internal_dt, max_frequency_hz, initial_gait,
///   initial_frequency_hz, speed_history, leg_names[4]
///   filters: {alpha_omega, alpha_endpoint, alpha_offset, alpha_turn}
///   coupling: {gain, sign}
///   geometry: {l1, l2}
///   limits: {hip_range_deg, knee_range_deg, hip_speed_deg_s, knee_speed_deg_s}
///   gaits: path to a gait library, relative to the document
///   calibration: path to a calibration document, relative to the document
///
/// `base_dir` resolves the two relative paths when parsing from a string.
RuntimeConfig parse_runtime_config_yaml(const std::string& text,
                                        const std::filesystem::path& base_dir = {});
RuntimeConfig load_runtime_config(const std::filesystem::path& path);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t value);

/// Hash of every runtime parameter except the gait library.
std::string config_hash(const RuntimeConfig& config);
/// Hash of the gait library contents, in slot order.
std::string gaits_hash(const GaitLibrary& gaits);

}  // namespace cpgait
