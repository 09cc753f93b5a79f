#pragma once

#include <cstddef>
#include <filesystem>
#include <string>

#include "cpgait/runtime.hpp"

namespace cpgait {

/// Open-loop trajectory table for plotting. One row per sample of the
/// reference phase phi = 2*pi*k/resolution over `cycles` cycles; leg i runs
/// at wrap(phi - Phi_i). Columns: phase, then per leg x, y, dx/dphi,
/// dy/dphi, q_hip, q_knee, pwm_hip, pwm_knee (prefixed by the leg name).
/// Joint columns come from the workspace-projected endpoint, PWM from the
/// position-clamped motor angle. Throws CommandError for an unknown gait and
/// InvalidInput for zero cycles or resolution.
std::string export_trajectory_csv(const RuntimeConfig& config, const std::string& gait,
                                  std::size_t cycles, std::size_t resolution);

void export_trajectory(const RuntimeConfig& config, const std::string& gait, std::size_t cycles,
                       std::size_t resolution, const std::filesystem::path& path);

}  // namespace cpgait
