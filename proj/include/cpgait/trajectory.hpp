#pragma once

// Foot trajectories as weighted sums of polynomial motion primitives.
//
// A trajectory is x(phi) = sum_j w_x[j] * b_j(phi), y likewise, with the
// monomial basis b_j(phi) = (phi / 2pi)^j, j = 0..5. Legs are indexed 0..3
// (front-left, front-right, hind-left, hind-right by default).

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cpgait/common.hpp"

namespace cpgait {

inline constexpr std::size_t kBasisSize = 6;

using BasisVector = std::array<double, kBasisSize>;
using WeightRow = std::array<double, kBasisSize>;
using WeightMatrix = std::array<WeightRow, kNumLegs>;

struct GaitDefinition {
  std::string name;
  WeightMatrix weights_x{};   // m
  WeightMatrix weights_y{};   // m
  Vec4 target_offsets{};      // rad
  double nominal_frequency = 0.0;  // rad/s
};

/// Basis values at phi in [0, 2pi). Throws ContractViolation outside that range.
BasisVector eval_basis(double phi);

/// d/dphi of every basis function at phi.
BasisVector eval_basis_derivative(double phi);

Point2 eval_endpoint(const WeightRow& wx, const WeightRow& wy, double phi);
Point2 eval_endpoint(const GaitDefinition& gait, std::size_t leg, double phi);

Point2 eval_endpoint_derivative(const WeightRow& wx, const WeightRow& wy, double phi);
Point2 eval_endpoint_derivative(const GaitDefinition& gait, std::size_t leg, double phi);

struct TrajectorySample {
  double phi = 0.0;  // rad, in [0, 2pi]
  double x = 0.0;
  double y = 0.0;
};

struct FitResult {
  WeightRow weights_x{};
  WeightRow weights_y{};
  double max_residual = 0.0;  // m, worst absolute error over both axes
};

/// Thrown by fit_weights when the samples do not determine the weights.
class FitError : public Error {
 public:
  using Error::Error;
};

/// Least-squares projection of the samples onto the basis.
FitResult fit_weights(std::span<const TrajectorySample> samples);

/// Parameters of the stance/swing reference loop the shipped gaits are fitted to.
struct StrideProfile {
  double stride = 0.10;          // m, stance sweep along x
  double clearance = 0.04;       // m, swing lift
  double height = 0.22;          // m, stance depth below the hip
  double stance_fraction = 0.5;  // share of the cycle spent in stance
};

/// Reference foot position: the first `stance_fraction` of the cycle is a
/// straight stance line at `height` from +stride/2 to -stride/2 (cosine
/// timing); the remainder is a semi-elliptic swing back to +stride/2.
Point2 reference_foot_path(const StrideProfile& profile, double phi);

/// Uniform samples of the reference path over one cycle.
std::vector<TrajectorySample> sample_reference_path(const StrideProfile& profile,
                                                    std::size_t count);

// Turning by stride suppression.

enum class TurnDirection { kNone, kLeft, kRight };

/// Target coefficient vector for a turn: left [1,0,0,1], right [0,1,1,0], none [1,1,1,1].
Vec4 turn_vector(TurnDirection direction);

std::string to_string(TurnDirection direction);
TurnDirection turn_direction_from_string(const std::string& name);

struct TurnState {
  Vec4 coefficients{1.0, 1.0, 1.0, 1.0};
  TurnDirection target = TurnDirection::kNone;
};

/// Scales the x targets by the turn coefficients.
Vec4 apply_turning(const Vec4& x_targets, const TurnState& turn);

/// Exponential pursuit of the target turn vector.
TurnState step_turn_filter(const TurnState& turn, double dt, double gain);

}  // namespace cpgait
