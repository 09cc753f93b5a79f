#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cpgait {

inline constexpr std::size_t kNumLegs = 4;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Planar point or vector in the leg frame: x forward, y downward from the hip.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

using Vec4 = std::array<double, kNumLegs>;
using Matrix4 = std::array<Vec4, kNumLegs>;
using LegPoints = std::array<Point2, kNumLegs>;

// Error hierarchy. Every failure the library reports derives from Error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite or otherwise malformed numeric input.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Caller broke a documented precondition (e.g. an unwrapped phase).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Bad configuration value (zero calibration scale, empty gait library, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Rejected operator command; runtime state is left untouched.
class CommandError : public Error {
 public:
  using Error::Error;
};

/// File or message that could not be parsed. `offset` is a byte offset into
/// the input when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

inline bool all_finite(double v) { return std::isfinite(v); }

template <typename... Ts>
bool all_finite(double v, Ts... rest) {
  return std::isfinite(v) && all_finite(rest...);
}

inline bool all_finite(const Vec4& v) {
  for (double e : v) {
    if (!std::isfinite(e)) return false;
  }
  return true;
}

inline bool all_finite(const Point2& p) { return std::isfinite(p.x) && std::isfinite(p.y); }

}  // namespace cpgait
