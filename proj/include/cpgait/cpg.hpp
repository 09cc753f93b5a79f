#pragma once

// Coupled phase-oscillator network and its first-order filters.
//
// Every function here is a pure map from inputs to outputs, so any of them can
// be called from any thread.

#include "cpgait/common.hpp"

namespace cpgait {

/// Global sign applied to the coupling magnitudes. With the oscillator model
///   dphi_i/dt = omega + sign * sum_j K_ij sin(phi_i - phi_j + Phi_i - Phi_j)
/// a negative sign makes phi_i + Phi_i synchronise across legs, i.e. the
/// configured offsets are the stable equilibrium and leg i lags leg 1 by Phi_i.
inline constexpr double kStableCouplingSign = -1.0;

struct Coupling {
  Matrix4 gains{};  // magnitudes, 1/s; diagonal must be zero
  double sign = kStableCouplingSign;

  static Coupling all_to_all(double gain, double sign = kStableCouplingSign);
};

struct CpgConfig {
  double omega_target = 0.0;     // rad/s
  double alpha_omega = 10.0;     // 1/s
  Coupling coupling = Coupling::all_to_all(0.75);
  Vec4 phase_offsets{};          // rad, each in [0, 2pi)
  double alpha_endpoint = 25.0;  // 1/s
  double alpha_offset = 5.0;     // 1/s

  /// Throws ConfigError when a gain is negative, the coupling diagonal is
  /// non-zero, or an offset is outside [0, 2pi).
  void validate() const;
};

struct CpgState {
  double omega = 0.0;
  Vec4 phases{};
  LegPoints endpoints{};
  Vec4 current_offsets{};
  LegPoints delta_input{};  // m/s, cleared after every tick
};

/// Maps any finite angle onto [0, 2pi).
double wrap_phase(double phi);

/// Maps any finite angle difference onto (-pi, pi].
double wrap_difference(double delta);

/// Exact solution of dv/dt = gain * (target - v) over dt. Unconditionally stable.
double exponential_approach(double value, double target, double gain, double dt);

/// One step of the frequency low-pass filter.
double step_frequency(double omega, double omega_target, double alpha_omega, double dt);

/// Right-hand side of the phase dynamics (no wrapping).
Vec4 phase_rates(const Vec4& phases, double omega, const Coupling& coupling,
                 const Vec4& offsets);

/// One RK4 step of the phase dynamics, wrapped to [0, 2pi).
Vec4 step_phases(const Vec4& phases, double omega, const Coupling& coupling,
                 const Vec4& offsets, double dt);

/// One explicit Euler step of the endpoint filter for a single leg:
///   dX/dt = phase_rate * X'_d + alpha (X_d - X) + delta
Point2 step_endpoint_filter(Point2 x, Point2 x_d, Point2 x_d_prime, double phase_rate,
                            double alpha, Point2 delta, double dt);

/// Exponential pursuit of target offsets along the shortest angular path.
Vec4 step_offset_filter(const Vec4& offsets, const Vec4& target_offsets,
                        double alpha_offset, double dt);

/// Phases of a network locked to `offsets` with leg 1 at `leg1_phase`.
Vec4 locked_phases(const Vec4& offsets, double leg1_phase = 0.0);

}  // namespace cpgait
