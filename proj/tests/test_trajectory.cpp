#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "cpgait/cpg.hpp"
#include "cpgait/gait_library.hpp"
#include "cpgait/kinematics.hpp"
#include "cpgait/trajectory.hpp"

using namespace cpgait;
using std::numbers::pi;

TEST_CASE("eval_basis examples") {
  CHECK(eval_basis(0.0) == BasisVector{1, 0, 0, 0, 0, 0});
  const BasisVector half = eval_basis(pi);
  const BasisVector expected{1, 0.5, 0.25, 0.125, 0.0625, 0.03125};
  for (std::size_t j = 0; j < kBasisSize; ++j) CHECK(half[j] == doctest::Approx(expected[j]).epsilon(1e-15));
  const BasisVector end = eval_basis(std::nextafter(kTwoPi, 0.0));
  for (double v : end) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(eval_basis(-1e-9), ContractViolation);
  CHECK_THROWS_AS(eval_basis(kTwoPi), ContractViolation);
}

TEST_CASE("eval_endpoint examples") {
  const WeightRow zero{};
  CHECK(eval_endpoint(zero, zero, 1.0) == Point2{0.0, 0.0});
  const WeightRow wx{0.03, 0, 0, 0, 0, 0};
  const WeightRow wy{0.2, 0, 0, 0, 0, 0};
  for (double phi : {0.0, 1.0, 3.0, 6.2}) {
    CHECK(eval_endpoint(wx, wy, phi) == Point2{0.03, 0.2});
    CHECK(eval_endpoint_derivative(wx, wy, phi) == Point2{0.0, 0.0});
  }
  const WeightRow lin{0, 0.5, 0, 0, 0, 0};
  for (double phi : {0.0, 2.0, 5.0}) {
    CHECK(eval_endpoint_derivative(lin, zero, phi).x == doctest::Approx(0.5 / kTwoPi).epsilon(1e-15));
  }

  // Default trot at phi = 0 sits on the stance-start point within the fit residual.
  const GaitRecipe trot = default_gait_recipes().front();
  const FittedGait fitted = fit_gait(trot);
  const Point2 p = eval_endpoint(fitted.gait, 0, 0.0);
  const Point2 ref = reference_foot_path(trot.profile, 0.0);
  CHECK(ref == Point2{0.05, 0.22});
  CHECK(std::abs(p.x - ref.x) <= fitted.max_residual);
  CHECK(std::abs(p.y - ref.y) <= fitted.max_residual);
}

TEST_CASE("eval_endpoint is linear in the weights") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> ph(0.0, kTwoPi);
  for (int k = 0; k < 1000; ++k) {
    WeightRow a{}, b{}, c{}, z{};
    for (std::size_t j = 0; j < kBasisSize; ++j) {
      a[j] = u(rng);
      b[j] = u(rng);
    }
    const double s = u(rng), t = u(rng), phi = ph(rng);
    for (std::size_t j = 0; j < kBasisSize; ++j) c[j] = s * a[j] + t * b[j];
    const double lhs = eval_endpoint(c, z, phi).x;
    const double rhs = s * eval_endpoint(a, z, phi).x + t * eval_endpoint(b, z, phi).x;
    REQUIRE(std::abs(lhs - rhs) <= 1e-12);
  }
}

TEST_CASE("analytic derivative matches central differences for every shipped gait") {
  const GaitLibrary lib = default_gait_library();
  const double h = 1e-6;
  for (const GaitDefinition& g : lib.gaits()) {
    for (int k = 1; k < 1000; ++k) {
      const double phi = kTwoPi * k / 1000.0;
      if (phi + h >= kTwoPi) continue;
      for (std::size_t leg = 0; leg < kNumLegs; ++leg) {
        const Point2 d = eval_endpoint_derivative(g, leg, phi);
        const Point2 a = eval_endpoint(g, leg, phi + h);
        const Point2 b = eval_endpoint(g, leg, phi - h);
        const double fx = (a.x - b.x) / (2 * h), fy = (a.y - b.y) / (2 * h);
        // Relative tolerance with an absolute floor near zero-slope points.
        REQUIRE(std::abs(fx - d.x) <= 1e-6 * std::max(1.0, std::abs(d.x)));
        REQUIRE(std::abs(fy - d.y) <= 1e-6 * std::max(1.0, std::abs(d.y)));
      }
    }
  }
}

TEST_CASE("fit recovers in-span data exactly") {
  const WeightRow wx{0.02, -0.1, 0.3, 0.05, -0.2, 0.01};
  const WeightRow wy{0.2, 0.01, -0.02, 0.03, 0.0, -0.01};
  std::vector<TrajectorySample> samples;
  for (int k = 0; k < 40; ++k) {
    const double phi = kTwoPi * k / 40.0;
    const Point2 p = eval_endpoint(wx, wy, phi);
    samples.push_back({phi, p.x, p.y});
  }
  const FitResult r = fit_weights(samples);
  CHECK(r.max_residual < 1e-10);
  for (std::size_t j = 0; j < kBasisSize; ++j) {
    CHECK(r.weights_x[j] == doctest::Approx(wx[j]).epsilon(1e-8));
    CHECK(r.weights_y[j] == doctest::Approx(wy[j]).epsilon(1e-8));
  }
}

TEST_CASE("fit rejects underdetermined and degenerate sample sets") {
  std::vector<TrajectorySample> three{{0.0, 0, 0}, {1.0, 0, 0}, {2.0, 0, 0}};
  CHECK_THROWS_AS(fit_weights(three), FitError);
  std::vector<TrajectorySample> repeated(10, TrajectorySample{1.0, 0.1, 0.2});
  CHECK_THROWS_AS(fit_weights(repeated), FitError);
}

TEST_CASE("fit residual against the reference path is non-increasing in sample count") {
  // The in-sample max residual grows with the sample count (it is zero at six
  // samples), so the property is checked on the RMS error against the
  // continuous reference path, evaluated on a dense grid.
  const StrideProfile profile{};
  const int grid = 16384;
  double previous = 1e9;
  for (std::size_t n : {6u, 8u, 12u, 16u, 24u, 32u, 48u, 64u, 96u, 128u, 256u, 512u}) {
    const FitResult r = fit_weights(sample_reference_path(profile, n));
    double sq = 0.0;
    for (int k = 0; k < grid; ++k) {
      const double phi = kTwoPi * k / grid;
      const Point2 p = eval_endpoint(r.weights_x, r.weights_y, phi);
      const Point2 ref = reference_foot_path(profile, phi);
      sq += (p.x - ref.x) * (p.x - ref.x) + (p.y - ref.y) * (p.y - ref.y);
    }
    const double rms = std::sqrt(sq / (2.0 * grid));
    INFO("samples ", n, " rms ", rms);
    CHECK(rms <= previous);
    previous = rms;
  }
}

TEST_CASE("every shipped gait stays in the workspace and below the hip") {
  const GaitLibrary lib = default_gait_library();
  const LegGeometry geom{};
  for (const GaitDefinition& g : lib.gaits()) {
    for (int k = 0; k < 4096; ++k) {
      const double phi = kTwoPi * k / 4096.0;
      for (std::size_t leg = 0; leg < kNumLegs; ++leg) {
        const Point2 p = eval_endpoint(g, leg, phi);
        INFO(g.name, " leg ", leg, " phi ", phi);
        REQUIRE(workspace_contains(p.x, p.y, geom));
        REQUIRE(p.y > 0.0);
        // Turned legs run at x = 0.
        REQUIRE(workspace_contains(0.0, p.y, geom));
      }
    }
  }
}

TEST_CASE("turn vectors and application") {
  CHECK(turn_vector(TurnDirection::kNone) == Vec4{1, 1, 1, 1});
  CHECK(turn_vector(TurnDirection::kLeft) == Vec4{1, 0, 0, 1});
  CHECK(turn_vector(TurnDirection::kRight) == Vec4{0, 1, 1, 0});
  const Vec4 x{0.01, -0.02, 0.03, -0.04};
  CHECK(apply_turning(x, {}) == x);
  TurnState left{turn_vector(TurnDirection::kLeft), TurnDirection::kLeft};
  CHECK(apply_turning(x, left) == Vec4{0.01, 0.0, 0.0, -0.04});
  TurnState right{turn_vector(TurnDirection::kRight), TurnDirection::kRight};
  CHECK(apply_turning(x, right) == Vec4{0.0, -0.02, 0.03, 0.0});
  // Converged coefficients are idempotent.
  for (const TurnState& t : {left, right, TurnState{}}) {
    CHECK(apply_turning(apply_turning(x, t), t) == apply_turning(x, t));
  }
  CHECK(turn_direction_from_string("left") == TurnDirection::kLeft);
  CHECK(to_string(TurnDirection::kRight) == "right");
  CHECK_THROWS_AS(turn_direction_from_string("up"), CommandError);
}

TEST_CASE("turn filter examples") {
  TurnState at{turn_vector(TurnDirection::kLeft), TurnDirection::kLeft};
  CHECK(step_turn_filter(at, 0.002, 5.0).coefficients == at.coefficients);

  TurnState t{};
  t.target = TurnDirection::kLeft;
  for (int k = 0; k < 100; ++k) t = step_turn_filter(t, 0.002, 5.0);
  CHECK(t.coefficients[1] == doctest::Approx(0.36787944117144233).epsilon(1e-12));
  CHECK(t.coefficients[0] == 1.0);

  TurnState frozen{};
  frozen.target = TurnDirection::kRight;
  CHECK(step_turn_filter(frozen, 0.1, 0.0).coefficients == Vec4{1, 1, 1, 1});

  // Left then none: coefficients return monotonically to 1.
  t.target = TurnDirection::kNone;
  double last = t.coefficients[1];
  for (int k = 0; k < 2000; ++k) {
    t = step_turn_filter(t, 0.002, 5.0);
    REQUIRE(t.coefficients[1] >= last);
    REQUIRE(t.coefficients[1] <= 1.0);
    last = t.coefficients[1];
  }
}
