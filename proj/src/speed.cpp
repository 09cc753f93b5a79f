#include "cpgait/speed.hpp"

#include <algorithm>
#include <limits>

namespace cpgait {

double estimate_body_speed_partial(std::span<const SpeedSample> window, double stance_band) {
  if (window.size() < 2) throw InvalidInput("speed estimate: window too short");

  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t leg = 0; leg < kNumLegs; ++leg) {
    double deepest = -std::numeric_limits<double>::infinity();
    for (const auto& s : window) deepest = std::max(deepest, s.feet[leg].y);
    const double floor = deepest - stance_band;
    for (std::size_t k = 1; k < window.size(); ++k) {
      const Point2& a = window[k - 1].feet[leg];
      const Point2& b = window[k].feet[leg];
      const double dt = window[k].t - window[k - 1].t;
      if (dt <= 0.0 || a.y < floor || b.y < floor) continue;
      sum += -(b.x - a.x) / dt;
      ++count;
    }
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

double estimate_body_speed(std::span<const SpeedSample> window, double stance_band) {
  if (window.size() < 2) throw InvalidInput("speed estimate: window too short");
  double covered = 0.0;
  bool moving = false;
  for (std::size_t k = 1; k < window.size(); ++k) {
    const double omega = window[k].omega;
    if (omega > 1e-6) moving = true;
    covered += std::abs(omega) * (window[k].t - window[k - 1].t);
  }
  if (moving && covered < kTwoPi * (1.0 - 1e-9)) {
    throw InvalidInput("speed estimate: window covers less than one gait cycle");
  }
  return estimate_body_speed_partial(window, stance_band);
}

}  // namespace cpgait
