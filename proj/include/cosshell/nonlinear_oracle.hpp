#pragma once

#include <array>
#include <string>
#include <vector>

#include "cosshell/displacement.hpp"
#include "cosshell/kinematics.hpp"
#include "cosshell/surface_geometry.hpp"

namespace cosshell {

// Symmetric square root via eigendecomposition; throws NotSPD unless
// lambda_min > tol * max(1, lambda_max).
Mat3 spd_sqrt(const Mat3& a, double tol = 1e-14);

// Orthogonal polar factor by SVD; throws SingularF when det F <= 0 or F is rank deficient.
Mat3 polar_rotation(const Mat3& F);

// m = y0 + t v and its unit normal.
struct DeformedSurface {
  Mat32 grad_m;
  std::array<std::array<Vec3, 2>, 2> dd_m;
  Vec3 n;
  std::array<Vec3, 2> d_n;
  Mat2 I_m;
};
DeformedSurface deformed_surface(const GeometryFrame& f, const LocalDisplacement& u, double t);

// (grad m | n) [grad Theta]^{-1} (grad Theta I_hat_m^{-1} grad Theta^T)^{1/2}.
Mat3 polar_rotation_explicit(const GeometryFrame& f, const DeformedSurface& m);

struct NonlinearStrains {
  Mat3 Q;               // polar factor of (grad m | n) [grad Theta]^{-1}
  Mat3 Q_explicit;      // same rotation from the closed formula
  Mat3 E;               // Q^T (grad m | n) [grad Theta]^{-1} - 1
  Mat3 E_two_roots;     // difference of the two Gram square roots
  Mat2 G;               // (Q grad y0)^T grad m - I
  Mat2 R;               // -(Q grad y0)^T grad n - II
  Mat3 K;               // (axl(Q^T d_1 Q) | axl(Q^T d_2 Q) | 0) [grad Theta]^{-1}
  Vec3 n;
};

struct OracleOptions {
  // Chart step for d_a Q as a fraction of the domain extent (fourth-order central).
  double rotation_step = 1e-3;
};

NonlinearStrains nonlinear_strains(const SurfaceChart& chart, const DisplacementFunction& field,
                                   const Vec2& p, double t, const OracleOptions& opt = {});

// D(t) = |X(t) / t - X_lin| for t in `ts`; passes when the log-log slope is >= 0.9
// or every D is at roundoff level.
struct SlopeTest {
  std::string measure;
  std::vector<double> ts;
  std::vector<double> defects;
  double slope = 0.0;
  bool pass = false;
};

inline const std::vector<double>& default_slope_steps() {
  static const std::vector<double> ts = {1e-2, 1e-3, 1e-4};
  return ts;
}

// Measures: E, G, R, K, normal, Q.
std::vector<SlopeTest> linearization_slope_tests(const SurfaceChart& chart,
                                                 const DisplacementFunction& field, const Vec2& p,
                                                 const std::vector<double>& ts = default_slope_steps(),
                                                 const OracleOptions& opt = {});

// |(R(t) - R(-t)) / (2t) - (R_koiter - G L)|; O(t^2).
double bending_identity_residual(const SurfaceChart& chart, const DisplacementFunction& field,
                                 const Vec2& p, double t = 1e-4, const OracleOptions& opt = {});

double fitted_slope(const std::vector<double>& ts, const std::vector<double>& defects);

}  // namespace cosshell
