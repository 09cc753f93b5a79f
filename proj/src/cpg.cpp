#include "cpgait/cpg.hpp"

#include <cmath>
#include <numbers>

namespace cpgait {

namespace {

void require_step(double dt) {
  if (!std::isfinite(dt) || dt <= 0.0) {
    throw InvalidInput("time step must be finite and positive");
  }
}

Vec4 axpy(const Vec4& base, double scale, const Vec4& dir) {
  Vec4 out{};
  for (std::size_t i = 0; i < kNumLegs; ++i) out[i] = base[i] + scale * dir[i];
  return out;
}

}  // namespace

Coupling Coupling::all_to_all(double gain, double sign) {
  Coupling c;
  c.sign = sign;
  for (std::size_t i = 0; i < kNumLegs; ++i) {
    for (std::size_t j = 0; j < kNumLegs; ++j) {
      c.gains[i][j] = (i == j) ? 0.0 : gain;
    }
  }
  return c;
}

void CpgConfig::validate() const {
  if (!all_finite(omega_target, alpha_omega, alpha_endpoint, alpha_offset)) {
    throw ConfigError("cpg: non-finite parameter");
  }
  if (alpha_omega < 0.0 || alpha_endpoint < 0.0 || alpha_offset < 0.0) {
    throw ConfigError("cpg: filter gains must be non-negative");
  }
  if (coupling.sign != 1.0 && coupling.sign != -1.0) {
    throw ConfigError("cpg: coupling sign must be +1 or -1");
  }
  for (std::size_t i = 0; i < kNumLegs; ++i) {
    if (coupling.gains[i][i] != 0.0) throw ConfigError("cpg: coupling diagonal must be zero");
    for (double k : coupling.gains[i]) {
      if (!std::isfinite(k) || k < 0.0) {
        throw ConfigError("cpg: coupling magnitudes must be finite and non-negative");
      }
    }
    if (!(phase_offsets[i] >= 0.0 && phase_offsets[i] < kTwoPi)) {
      throw ConfigError("cpg: phase offsets must lie in [0, 2pi)");
    }
  }
}

double wrap_phase(double phi) {
  if (!std::isfinite(phi)) throw InvalidInput("wrap_phase: non-finite phase");
  double r = std::fmod(phi, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  // fmod of a tiny negative value plus 2pi can round up to exactly 2pi.
  if (r >= kTwoPi) r = 0.0;
  return r;
}

double wrap_difference(double delta) {
  if (!std::isfinite(delta)) throw InvalidInput("wrap_difference: non-finite angle");
  double r = std::fmod(delta, kTwoPi);
  if (r > std::numbers::pi) r -= kTwoPi;
  if (r <= -std::numbers::pi) r += kTwoPi;
  return r;
}

double exponential_approach(double value, double target, double gain, double dt) {
  return value + (target - value) * -std::expm1(-gain * dt);
}

double step_frequency(double omega, double omega_target, double alpha_omega, double dt) {
  if (!all_finite(omega, omega_target, alpha_omega, dt)) {
    throw InvalidInput("step_frequency: non-finite input");
  }
  require_step(dt);
  if (alpha_omega < 0.0) throw InvalidInput("step_frequency: negative gain");
  return exponential_approach(omega, omega_target, alpha_omega, dt);
}

Vec4 phase_rates(const Vec4& phases, double omega, const Coupling& coupling,
                 const Vec4& offsets) {
  Vec4 rates{};
  for (std::size_t i = 0; i < kNumLegs; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < kNumLegs; ++j) {
      const double k = coupling.gains[i][j];
      if (k == 0.0) continue;
      sum += k * std::sin(phases[i] - phases[j] + offsets[i] - offsets[j]);
    }
    rates[i] = omega + coupling.sign * sum;
  }
  return rates;
}

Vec4 step_phases(const Vec4& phases, double omega, const Coupling& coupling,
                 const Vec4& offsets, double dt) {
  if (!all_finite(phases) || !all_finite(offsets) || !all_finite(omega, dt)) {
    throw InvalidInput("step_phases: non-finite input");
  }
  require_step(dt);

  const Vec4 k1 = phase_rates(phases, omega, coupling, offsets);
  const Vec4 k2 = phase_rates(axpy(phases, 0.5 * dt, k1), omega, coupling, offsets);
  const Vec4 k3 = phase_rates(axpy(phases, 0.5 * dt, k2), omega, coupling, offsets);
  const Vec4 k4 = phase_rates(axpy(phases, dt, k3), omega, coupling, offsets);

  Vec4 out{};
  for (std::size_t i = 0; i < kNumLegs; ++i) {
    const double slope = (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0;
    out[i] = wrap_phase(phases[i] + dt * slope);
  }
  return out;
}

Point2 step_endpoint_filter(Point2 x, Point2 x_d, Point2 x_d_prime, double phase_rate,
                            double alpha, Point2 delta, double dt) {
  if (!all_finite(x) || !all_finite(x_d) || !all_finite(x_d_prime) || !all_finite(delta) ||
      !all_finite(phase_rate, alpha, dt)) {
    throw InvalidInput("step_endpoint_filter: non-finite input");
  }
  require_step(dt);
  const double vx = phase_rate * x_d_prime.x + alpha * (x_d.x - x.x) + delta.x;
  const double vy = phase_rate * x_d_prime.y + alpha * (x_d.y - x.y) + delta.y;
  return {x.x + dt * vx, x.y + dt * vy};
}

Vec4 step_offset_filter(const Vec4& offsets, const Vec4& target_offsets,
                        double alpha_offset, double dt) {
  if (!all_finite(offsets) || !all_finite(target_offsets) || !all_finite(alpha_offset, dt)) {
    throw InvalidInput("step_offset_filter: non-finite input");
  }
  require_step(dt);
  Vec4 out{};
  for (std::size_t i = 0; i < kNumLegs; ++i) {
    const double error = wrap_difference(target_offsets[i] - offsets[i]);
    if (error == 0.0) {
      out[i] = wrap_phase(offsets[i]);
      continue;
    }
    out[i] = wrap_phase(offsets[i] + error * -std::expm1(-alpha_offset * dt));
  }
  return out;
}

Vec4 locked_phases(const Vec4& offsets, double leg1_phase) {
  Vec4 out{};
  for (std::size_t i = 0; i < kNumLegs; ++i) {
    out[i] = wrap_phase(leg1_phase + offsets[0] - offsets[i]);
  }
  return out;
}

}  // namespace cpgait
