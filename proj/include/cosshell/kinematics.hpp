#pragma once

#include <array>

#include "cosshell/surface_geometry.hpp"
#include "cosshell/tensor.hpp"

namespace cosshell {

// Displacement value and chart derivatives at one point; dd is symmetric.
struct LocalDisplacement {
  Vec3 v = Vec3::Zero();
  std::array<Vec3, 2> d{Vec3::Zero(), Vec3::Zero()};
  std::array<std::array<Vec3, 2>, 2> dd{{{Vec3::Zero(), Vec3::Zero()}, {Vec3::Zero(), Vec3::Zero()}}};

  Mat32 grad() const {
    Mat32 g;
    g.col(0) = d[0];
    g.col(1) = d[1];
    return g;
  }
};

// Linearized strain measures at one point. Every field is linear in the displacement.
struct StrainState {
  Mat2 G = Mat2::Zero();            // change of metric
  Mat2 R_koiter = Mat2::Zero();     // Koiter bending strain
  Mat2 R_inf = Mat2::Zero();        // R_koiter - G L
  Vec3 theta = Vec3::Zero();        // infinitesimal rotation vector
  Mat32 grad_theta = Mat32::Zero();
  Mat3 A_theta = Mat3::Zero();      // anti(theta)
  Mat3 E = Mat3::Zero();            // lift(G)
  Mat3 EB_plus_CK = Mat3::Zero();   // -lift(R_koiter - 2 G L)
  Mat3 EB2_plus_CKB = Mat3::Zero(); // -lift((R_koiter - 2 G L) L)
  Mat3 K = Mat3::Zero();            // (grad theta | 0) [grad Theta]^{-1}
  Mat3 KB = Mat3::Zero();           // K B
  Mat3 KB2 = Mat3::Zero();          // K B^2
  Vec2 shear = Vec2::Zero();        // transverse shear, vanishes under the constraint

  StrainState& operator+=(const StrainState& o);
  StrainState& operator*=(double s);
};

// sym((grad y0)^T grad v)
Mat2 change_of_metric(const GeometryFrame& f, const LocalDisplacement& u);
// <n0, d_ab v - sum_g gamma^g_ab d_g v>
Mat2 koiter_bending(const GeometryFrame& f, const LocalDisplacement& u);

// Same measures written in the covariant components v_a = <v, a_a>, v_3 = <v, n0>.
Mat2 change_of_metric_covariant(const GeometryFrame& f, const LocalDisplacement& u);
Mat2 koiter_bending_covariant(const GeometryFrame& f, const LocalDisplacement& u);

// theta = <theta, n0> n0 + n0 x w with w = theta x n0 = -sum_a <n0, d_a v> a^a.
Vec3 rotation_vector(const GeometryFrame& f, const LocalDisplacement& u);
// Tangential part w = theta x n0.
Vec3 rotated_normal_increment(const GeometryFrame& f, const LocalDisplacement& u);
// Columns d_1 theta, d_2 theta.
Mat32 rotation_gradient(const GeometryFrame& f, const LocalDisplacement& u);
// skew((grad v | theta x n0) [grad Theta]^{-1}); its axial vector is theta.
Mat3 rotation_tensor_increment(const GeometryFrame& f, const LocalDisplacement& u);

struct CurvatureTensors {
  Mat3 K;
  Mat3 KB;
  Mat3 KB2;
};
CurvatureTensors bending_curvature(const GeometryFrame& f, const Mat32& grad_theta);

struct LiftedStrains {
  Mat3 E;
  Mat3 EB_plus_CK;
  Mat3 EB2_plus_CKB;
};
LiftedStrains lifted_strains(const GeometryFrame& f, const Mat2& G, const Mat2& R);

// <n0, d_a v> + <theta x n0, a_a>
Vec2 transverse_shear(const GeometryFrame& f, const LocalDisplacement& u, const Vec3& theta);

// |skew(G L)| and |skew((R - 2 G L) L)|; zero when the symmetry constraints hold.
struct ConstraintResiduals {
  double skew_GL = 0.0;
  double skew_RL = 0.0;
};
ConstraintResiduals constraint_residuals(const GeometryFrame& f, const Mat2& G, const Mat2& R);

StrainState compute_strain_state(const GeometryFrame& f, const LocalDisplacement& u);

}  // namespace cosshell
