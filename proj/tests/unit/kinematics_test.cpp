#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cosshell/displacement.hpp"
#include "cosshell/kinematics.hpp"
#include "test_support.hpp"

namespace cosshell {
namespace {

TEST(Kinematics, RigidMotionHasZeroStrainAndRecoversRotation) {
  std::mt19937_64 rng(11);
  for (const auto& c : testing::analytic_charts()) {
    for (std::uint64_t s = 0; s < 5; ++s) {
      const RigidMotion rm = RigidMotion::random(100 + s);
      std::normal_distribution<double> g;
      const Vec3 a(g(rng), g(rng), g(rng)), b(g(rng), g(rng), g(rng));
      const RigidMotion m(a, b);
      const GeometryFrame f = evaluate_frame(c, testing::random_interior_point(c.domain(), rng));
      const StrainState st = compute_strain_state(f, m.evaluate(f));
      EXPECT_LT(st.G.norm(), 1e-12) << c.name();
      EXPECT_LT(st.R_koiter.norm(), 1e-12) << c.name();
      EXPECT_LT(st.K.norm(), 1e-12) << c.name();
      EXPECT_LT(st.shear.norm(), 1e-12) << c.name();
      EXPECT_LT((st.theta - b).norm(), 1e-12) << c.name();
      EXPECT_LT(compute_strain_state(f, rm.evaluate(f)).G.norm(), 1e-12) << c.name();
    }
  }
}

TEST(Kinematics, PlateBendingStrainIsTheHessian) {
  // v = (0, 0, w) with w = x1^2 x2 / 2 + x2^2: Hessian [[x2, x1], [x1, 2]].
  const SurfaceChart plane = SurfaceChart::catalog("plane", {});
  const GeometryFrame f = evaluate_frame(plane, {0.3, 0.6});
  LocalDisplacement u;
  const double x1 = 0.3, x2 = 0.6;
  u.v = Vec3(0, 0, 0.5 * x1 * x1 * x2 + x2 * x2);
  u.d[0] = Vec3(0, 0, x1 * x2);
  u.d[1] = Vec3(0, 0, 0.5 * x1 * x1 + 2 * x2);
  u.dd[0][0] = Vec3(0, 0, x2);
  u.dd[0][1] = u.dd[1][0] = Vec3(0, 0, x1);
  u.dd[1][1] = Vec3(0, 0, 2.0);
  const StrainState st = compute_strain_state(f, u);
  Mat2 hess;
  hess << x2, x1, x1, 2.0;
  EXPECT_LT((st.R_koiter - hess).norm(), 1e-14);
  EXPECT_LT(st.G.norm(), 1e-14);
  // Rotation vector (w_2, -w_1, 0); the normal rotates by theta x n0 = -grad w.
  EXPECT_LT((st.theta - Vec3(u.d[1](2), -u.d[0](2), 0)).norm(), 1e-14);
  EXPECT_LT((rotated_normal_increment(f, u) - Vec3(-u.d[0](2), -u.d[1](2), 0)).norm(), 1e-14);
}

class RandomFieldFixture : public ::testing::Test {
 protected:
  std::mt19937_64 rng{12};
};

TEST_F(RandomFieldFixture, CovariantFormsAgreeWithCartesianForms) {
  for (const auto& c : testing::analytic_charts()) {
    for (std::uint64_t s = 0; s < 5; ++s) {
      const TrigField field(s, 4, 1.0, 3.0);
      const GeometryFrame f = evaluate_frame(c, testing::random_interior_point(c.domain(), rng));
      const LocalDisplacement u = field.evaluate(f);
      EXPECT_LT((change_of_metric(f, u) - change_of_metric_covariant(f, u)).norm(), 1e-10) << c.name();
      EXPECT_LT((koiter_bending(f, u) - koiter_bending_covariant(f, u)).norm(), 1e-10) << c.name();
    }
  }
}

TEST_F(RandomFieldFixture, LiftedStrainsMatchAmbientProducts) {
  for (const auto& c : testing::analytic_charts()) {
    for (std::uint64_t s = 0; s < 5; ++s) {
      const TrigField field(20 + s, 4, 1.0, 3.0);
      const GeometryFrame f = evaluate_frame(c, testing::random_interior_point(c.domain(), rng));
      const StrainState st = compute_strain_state(f, field.evaluate(f));
      const Mat3 B = tensor_B(f), C = tensor_C(f);
      const double scale = 1.0 + st.E.norm() + st.K.norm();
      EXPECT_LT((st.E * B + C * st.K - st.EB_plus_CK).norm(), 1e-11 * scale) << c.name();
      EXPECT_LT((st.E * B * B + C * st.K * B - st.EB2_plus_CKB).norm(), 1e-11 * scale) << c.name();
      EXPECT_LT((st.KB - st.K * B).norm(), 1e-12 * scale) << c.name();
      EXPECT_LT((st.E - lift(f, st.G)).norm(), 1e-14 * scale) << c.name();
      EXPECT_LT((st.R_inf - (st.R_koiter - st.G * f.L)).norm(), 1e-14 * scale) << c.name();
    }
  }
}

TEST_F(RandomFieldFixture, RotationTensorHasAxialVectorTheta) {
  for (const auto& c : testing::analytic_charts()) {
    const TrigField field(31, 4, 1.0, 3.0);
    const GeometryFrame f = evaluate_frame(c, testing::random_interior_point(c.domain(), rng));
    const StrainState st = compute_strain_state(f, field.evaluate(f));
    EXPECT_LT((axl(st.A_theta) - st.theta).norm(), 1e-12) << c.name();
    EXPECT_LT((st.A_theta + st.A_theta.transpose()).norm(), 1e-14) << c.name();
    EXPECT_LT(st.shear.norm(), 1e-12) << c.name();
  }
}

TEST_F(RandomFieldFixture, RotationGradientMatchesFiniteDifferences) {
  for (const auto& c : testing::analytic_charts()) {
    const TrigField field(41, 4, 1.0, 3.0);
    const Vec2 p = testing::random_interior_point(c.domain(), rng);
    const GeometryFrame f = evaluate_frame(c, p);
    const Mat32 grad = rotation_gradient(f, field.evaluate(f));
    for (int a = 0; a < 2; ++a) {
      const double h = 1e-4 * c.domain().extent(a);
      Vec2 e = Vec2::Zero();
      e(a) = h;
      auto theta_at = [&](const Vec2& q) {
        const GeometryFrame g = evaluate_frame(c, q);
        return rotation_vector(g, field.evaluate(g));
      };
      const Vec3 fd = (theta_at(p + e) - theta_at(p - e)) / (2 * h);
      EXPECT_LT((fd - grad.col(a)).norm(), 1e-6 * (1 + grad.norm())) << c.name();
    }
  }
}

TEST_F(RandomFieldFixture, StrainStateIsLinear) {
  const SurfaceChart c = SurfaceChart::catalog("sphere", {1.0});
  const GeometryFrame f = evaluate_frame(c, testing::random_interior_point(c.domain(), rng));
  const LocalDisplacement u = TrigField(1, 3, 1.0, 2.0).evaluate(f);
  const LocalDisplacement w = TrigField(2, 3, 1.0, 2.0).evaluate(f);
  LocalDisplacement sum;
  sum.v = 2 * u.v - 3 * w.v;
  for (int a = 0; a < 2; ++a) {
    sum.d[a] = 2 * u.d[a] - 3 * w.d[a];
    for (int b = 0; b < 2; ++b) sum.dd[a][b] = 2 * u.dd[a][b] - 3 * w.dd[a][b];
  }
  StrainState expect = compute_strain_state(f, u);
  expect *= 2.0;
  StrainState tw = compute_strain_state(f, w);
  tw *= -3.0;
  expect += tw;
  const StrainState got = compute_strain_state(f, sum);
  EXPECT_LT((got.K - expect.K).norm(), 1e-12);
  EXPECT_LT((got.EB2_plus_CKB - expect.EB2_plus_CKB).norm(), 1e-12);
  EXPECT_LT((got.theta - expect.theta).norm(), 1e-12);
}

TEST(Kinematics, ConstraintResidualsVanishOnThePlaneAndSphere) {
  std::mt19937_64 rng(13);
  for (const char* name : {"plane", "sphere"}) {
    const SurfaceChart c = SurfaceChart::catalog(name, name[0] == 's' ? std::vector<double>{1.0} : std::vector<double>{});
    const GeometryFrame f = evaluate_frame(c, testing::random_interior_point(c.domain(), rng));
    const Mat2 G = sym(testing::random_matrix<Mat2>(rng));
    const Mat2 R = sym(testing::random_matrix<Mat2>(rng));
    // L is a multiple of the identity on both, so G L stays symmetric.
    const ConstraintResiduals r = constraint_residuals(f, G, R);
    EXPECT_LT(r.skew_GL, 1e-14) << name;
    EXPECT_LT(r.skew_RL, 1e-14) << name;
  }
}

}  // namespace
}  // namespace cosshell
