#pragma once

#include <span>

#include "cpgait/common.hpp"

namespace cpgait {

struct SpeedSample {
  double t = 0.0;      // s
  double omega = 0.0;  // rad/s
  LegPoints feet{};    // filtered endpoints, m
};

inline constexpr double kStanceBand = 0.005;  // m below the window's deepest foot position

/// Kinematic treadmill estimate: mean of -dx/dt over every leg and sample
/// interval where the foot stays within `stance_band` of that leg's maximum
/// extension in the window. Throws InvalidInput when the window has fewer
/// than two samples or, for a moving gait, covers less than one cycle.
double estimate_body_speed(std::span<const SpeedSample> window, double stance_band = kStanceBand);

/// Same estimator without the one-cycle requirement.
double estimate_body_speed_partial(std::span<const SpeedSample> window,
                                   double stance_band = kStanceBand);

}  // namespace cpgait
