#include "cosshell/kinematics.hpp"

namespace cosshell {

StrainState& StrainState::operator+=(const StrainState& o) {
  G += o.G;
  R_koiter += o.R_koiter;
  R_inf += o.R_inf;
  theta += o.theta;
  grad_theta += o.grad_theta;
  A_theta += o.A_theta;
  E += o.E;
  EB_plus_CK += o.EB_plus_CK;
  EB2_plus_CKB += o.EB2_plus_CKB;
  K += o.K;
  KB += o.KB;
  KB2 += o.KB2;
  shear += o.shear;
  return *this;
}

StrainState& StrainState::operator*=(double s) {
  G *= s;
  R_koiter *= s;
  R_inf *= s;
  theta *= s;
  grad_theta *= s;
  A_theta *= s;
  E *= s;
  EB_plus_CK *= s;
  EB2_plus_CKB *= s;
  K *= s;
  KB *= s;
  KB2 *= s;
  shear *= s;
  return *this;
}

Mat2 change_of_metric(const GeometryFrame& f, const LocalDisplacement& u) {
  Mat2 m;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) m(a, b) = f.tangent(a).dot(u.d[b]);
  }
  return sym(m);
}

Mat2 koiter_bending(const GeometryFrame& f, const LocalDisplacement& u) {
  Mat2 r;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      Vec3 w = u.dd[a][b];
      for (int g = 0; g < 2; ++g) w -= f.gamma[g](a, b) * u.d[g];
      r(a, b) = f.n0.dot(w);
    }
  }
  return r;
}

namespace {

struct CovariantComponents {
  Vec2 v;              // v_a
  double v3;           // v_3
  Mat2 dv;             // dv(a, b) = d_b v_a
  Vec2 dv3;            // d_a v_3
  Mat2 ddv3;           // d_ab v_3
};

CovariantComponents covariant(const GeometryFrame& f, const LocalDisplacement& u) {
  CovariantComponents c;
  for (int a = 0; a < 2; ++a) {
    c.v(a) = u.v.dot(f.tangent(a));
    for (int b = 0; b < 2; ++b) c.dv(a, b) = u.d[b].dot(f.tangent(a)) + u.v.dot(f.dd_y0(a, b));
  }
  c.v3 = u.v.dot(f.n0);
  for (int a = 0; a < 2; ++a) {
    c.dv3(a) = u.d[a].dot(f.n0) + u.v.dot(f.d_n0[a]);
    for (int b = 0; b < 2; ++b) {
      c.ddv3(a, b) = u.dd[a][b].dot(f.n0) + u.d[a].dot(f.d_n0[b]) + u.d[b].dot(f.d_n0[a]) +
                     u.v.dot(f.dd_n0[a][b]);
    }
  }
  return c;
}

}  // namespace

Mat2 change_of_metric_covariant(const GeometryFrame& f, const LocalDisplacement& u) {
  const CovariantComponents c = covariant(f, u);
  Mat2 g;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      g(a, b) = 0.5 * (c.dv(a, b) + c.dv(b, a)) - f.II(a, b) * c.v3;
      for (int s = 0; s < 2; ++s) g(a, b) -= f.gamma[s](a, b) * c.v(s);
    }
  }
  return g;
}

Mat2 koiter_bending_covariant(const GeometryFrame& f, const LocalDisplacement& u) {
  const CovariantComponents c = covariant(f, u);
  const Mat2& Lm = f.L;  // Lm(s, a) = b^s_a
  // Covariant derivative of the tangential components: (a, b) -> d_a v_b - gamma^t_ab v_t.
  Mat2 cov;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      cov(a, b) = c.dv(b, a);
      for (int t = 0; t < 2; ++t) cov(a, b) -= f.gamma[t](a, b) * c.v(t);
    }
  }
  Mat2 r;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      double x = c.ddv3(a, b);
      for (int s = 0; s < 2; ++s) {
        x -= f.gamma[s](a, b) * c.dv3(s);
        x -= Lm(s, a) * f.II(s, b) * c.v3;
        x += Lm(s, a) * cov(b, s);
        x += Lm(s, b) * cov(a, s);
      }
      // (b^t_b)|a v_t
      for (int t = 0; t < 2; ++t) {
        double cd = f.d_L[a](t, b);
        for (int s = 0; s < 2; ++s) cd += f.gamma[t](a, s) * Lm(s, b) - f.gamma[s](a, b) * Lm(t, s);
        x += cd * c.v(t);
      }
      r(a, b) = x;
    }
  }
  return r;
}

namespace {

double normal_rotation(const GeometryFrame& f, const LocalDisplacement& u) {
  return (f.tangent(1).dot(u.d[0]) - f.tangent(0).dot(u.d[1])) / (2.0 * f.det_grad_theta);
}

}  // namespace

Vec3 rotated_normal_increment(const GeometryFrame& f, const LocalDisplacement& u) {
  return -(f.n0.dot(u.d[0]) * f.contra(0) + f.n0.dot(u.d[1]) * f.contra(1));
}

Vec3 rotation_vector(const GeometryFrame& f, const LocalDisplacement& u) {
  return normal_rotation(f, u) * f.n0 + f.n0.cross(rotated_normal_increment(f, u));
}

Mat32 rotation_gradient(const GeometryFrame& f, const LocalDisplacement& u) {
  const double s = f.det_grad_theta;
  const double tn = normal_rotation(f, u);
  const Vec3 w = rotated_normal_increment(f, u);
  Mat32 out;
  for (int b = 0; b < 2; ++b) {
    const double dnum = f.dd_y0(1, b).dot(u.d[0]) + f.tangent(1).dot(u.dd[0][b]) -
                        f.dd_y0(0, b).dot(u.d[1]) - f.tangent(0).dot(u.dd[1][b]);
    const double dtn = dnum / (2.0 * s) - tn * f.d_det[b] / s;
    Vec3 dw = Vec3::Zero();
    for (int a = 0; a < 2; ++a) {
      dw -= (f.d_n0[b].dot(u.d[a]) + f.n0.dot(u.dd[a][b])) * f.contra(a) +
            f.n0.dot(u.d[a]) * f.d_contra[b][a];
    }
    out.col(b) = dtn * f.n0 + tn * f.d_n0[b] + f.d_n0[b].cross(w) + f.n0.cross(dw);
  }
  return out;
}

Mat3 rotation_tensor_increment(const GeometryFrame& f, const LocalDisplacement& u) {
  Mat3 g;
  g.col(0) = u.d[0];
  g.col(1) = u.d[1];
  g.col(2) = rotated_normal_increment(f, u);
  return skew(Mat3(g * f.grad_theta_inv));
}

CurvatureTensors bending_curvature(const GeometryFrame& f, const Mat32& grad_theta) {
  Mat3 g = Mat3::Zero();
  g.leftCols<2>() = grad_theta;
  const Mat3 lf = flat(f.L);
  CurvatureTensors c;
  c.K = g * f.grad_theta_inv;
  c.KB = g * lf * f.grad_theta_inv;
  c.KB2 = g * lf * lf * f.grad_theta_inv;
  return c;
}

LiftedStrains lifted_strains(const GeometryFrame& f, const Mat2& G, const Mat2& R) {
  const Mat2 x = R - 2.0 * G * f.L;
  return {lift(f, G), -lift(f, x), -lift(f, Mat2(x * f.L))};
}

Vec2 transverse_shear(const GeometryFrame& f, const LocalDisplacement& u, const Vec3& theta) {
  const Vec3 tn = theta.cross(f.n0);
  return Vec2(f.n0.dot(u.d[0]) + tn.dot(f.tangent(0)), f.n0.dot(u.d[1]) + tn.dot(f.tangent(1)));
}

ConstraintResiduals constraint_residuals(const GeometryFrame& f, const Mat2& G, const Mat2& R) {
  const Mat2 gl = G * f.L;
  return {skew(gl).norm(), skew(Mat2((R - 2.0 * gl) * f.L)).norm()};
}

StrainState compute_strain_state(const GeometryFrame& f, const LocalDisplacement& u) {
  StrainState s;
  s.G = change_of_metric(f, u);
  s.R_koiter = koiter_bending(f, u);
  s.R_inf = s.R_koiter - s.G * f.L;
  s.theta = rotation_vector(f, u);
  s.A_theta = anti(s.theta);
  s.grad_theta = rotation_gradient(f, u);
  const LiftedStrains ls = lifted_strains(f, s.G, s.R_koiter);
  s.E = ls.E;
  s.EB_plus_CK = ls.EB_plus_CK;
  s.EB2_plus_CKB = ls.EB2_plus_CKB;
  const CurvatureTensors c = bending_curvature(f, s.grad_theta);
  s.K = c.K;
  s.KB = c.KB;
  s.KB2 = c.KB2;
  s.shear = transverse_shear(f, u, s.theta);
  return s;
}

}  // namespace cosshell
