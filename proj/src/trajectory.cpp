#include "cpgait/trajectory.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cpgait/cpg.hpp"

namespace cpgait {

namespace {

BasisVector monomials(double normalized) {
  BasisVector b{};
  double p = 1.0;
  for (std::size_t j = 0; j < kBasisSize; ++j) {
    b[j] = p;
    p *= normalized;
  }
  return b;
}

void require_wrapped(double phi) {
  if (!(phi >= 0.0 && phi < kTwoPi)) {
    throw ContractViolation("phase must be wrapped to [0, 2pi) before evaluation");
  }
}

double dot(const WeightRow& w, const BasisVector& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < kBasisSize; ++j) s += w[j] * b[j];
  return s;
}

void require_leg(std::size_t leg) {
  if (leg >= kNumLegs) throw ContractViolation("leg index out of range");
}

}  // namespace

BasisVector eval_basis(double phi) {
  require_wrapped(phi);
  return monomials(phi / kTwoPi);
}

BasisVector eval_basis_derivative(double phi) {
  require_wrapped(phi);
  const double u = phi / kTwoPi;
  BasisVector d{};
  double p = 1.0;  // u^(j-1)
  for (std::size_t j = 1; j < kBasisSize; ++j) {
    d[j] = static_cast<double>(j) * p / kTwoPi;
    p *= u;
  }
  return d;
}

Point2 eval_endpoint(const WeightRow& wx, const WeightRow& wy, double phi) {
  const BasisVector b = eval_basis(phi);
  return {dot(wx, b), dot(wy, b)};
}

Point2 eval_endpoint(const GaitDefinition& gait, std::size_t leg, double phi) {
  require_leg(leg);
  return eval_endpoint(gait.weights_x[leg], gait.weights_y[leg], phi);
}

Point2 eval_endpoint_derivative(const WeightRow& wx, const WeightRow& wy, double phi) {
  const BasisVector d = eval_basis_derivative(phi);
  return {dot(wx, d), dot(wy, d)};
}

Point2 eval_endpoint_derivative(const GaitDefinition& gait, std::size_t leg, double phi) {
  require_leg(leg);
  return eval_endpoint_derivative(gait.weights_x[leg], gait.weights_y[leg], phi);
}

FitResult fit_weights(std::span<const TrajectorySample> samples) {
  if (samples.size() < kBasisSize) {
    throw FitError("fit_weights: need at least " + std::to_string(kBasisSize) +
                   " samples, got " + std::to_string(samples.size()));
  }
  const auto rows = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd a(rows, static_cast<Eigen::Index>(kBasisSize));
  Eigen::MatrixXd rhs(rows, 2);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& s = samples[static_cast<std::size_t>(r)];
    if (!all_finite(s.phi, s.x, s.y)) throw FitError("fit_weights: non-finite sample");
    const BasisVector b = monomials(s.phi / kTwoPi);
    for (std::size_t j = 0; j < kBasisSize; ++j) a(r, static_cast<Eigen::Index>(j)) = b[j];
    rhs(r, 0) = s.x;
    rhs(r, 1) = s.y;
  }

  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < static_cast<Eigen::Index>(kBasisSize)) {
    throw FitError("fit_weights: samples are rank deficient (need 6 distinct phases)");
  }
  const Eigen::MatrixXd w = qr.solve(rhs);
  const Eigen::MatrixXd residual = a * w - rhs;

  FitResult out;
  for (std::size_t j = 0; j < kBasisSize; ++j) {
    out.weights_x[j] = w(static_cast<Eigen::Index>(j), 0);
    out.weights_y[j] = w(static_cast<Eigen::Index>(j), 1);
  }
  out.max_residual = residual.cwiseAbs().maxCoeff();
  return out;
}

Point2 reference_foot_path(const StrideProfile& p, double phi) {
  const double u = wrap_phase(phi) / kTwoPi;
  const double half = 0.5 * p.stride;
  if (u < p.stance_fraction) {
    return {half * std::cos(std::numbers::pi * u / p.stance_fraction), p.height};
  }
  const double s = (u - p.stance_fraction) / (1.0 - p.stance_fraction);
  return {-half * std::cos(std::numbers::pi * s),
          p.height - p.clearance * std::sin(std::numbers::pi * s)};
}

std::vector<TrajectorySample> sample_reference_path(const StrideProfile& profile,
                                                    std::size_t count) {
  std::vector<TrajectorySample> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    // Same rounding as a normalized-phase grid k/count.
    const double u = static_cast<double>(k) / static_cast<double>(count);
    const double phi = u * kTwoPi;
    const Point2 p = reference_foot_path(profile, phi);
    out.push_back({phi, p.x, p.y});
  }
  return out;
}

Vec4 turn_vector(TurnDirection direction) {
  switch (direction) {
    case TurnDirection::kLeft:
      return {1.0, 0.0, 0.0, 1.0};
    case TurnDirection::kRight:
      return {0.0, 1.0, 1.0, 0.0};
    case TurnDirection::kNone:
      break;
  }
  return {1.0, 1.0, 1.0, 1.0};
}

std::string to_string(TurnDirection direction) {
  switch (direction) {
    case TurnDirection::kLeft:
      return "left";
    case TurnDirection::kRight:
      return "right";
    case TurnDirection::kNone:
      break;
  }
  return "none";
}

TurnDirection turn_direction_from_string(const std::string& name) {
  if (name == "left") return TurnDirection::kLeft;
  if (name == "right") return TurnDirection::kRight;
  if (name == "none") return TurnDirection::kNone;
  throw CommandError("unknown turn direction '" + name + "'");
}

Vec4 apply_turning(const Vec4& x_targets, const TurnState& turn) {
  Vec4 out{};
  for (std::size_t i = 0; i < kNumLegs; ++i) out[i] = turn.coefficients[i] * x_targets[i];
  return out;
}

TurnState step_turn_filter(const TurnState& turn, double dt, double gain) {
  if (!all_finite(dt, gain) || dt <= 0.0 || gain < 0.0) {
    throw InvalidInput("step_turn_filter: dt must be positive and gain non-negative");
  }
  TurnState out = turn;
  const Vec4 target = turn_vector(turn.target);
  for (std::size_t i = 0; i < kNumLegs; ++i) {
    out.coefficients[i] =
        std::clamp(exponential_approach(turn.coefficients[i], target[i], gain, dt), 0.0, 1.0);
  }
  return out;
}

}  // namespace cpgait
