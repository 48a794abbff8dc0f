#include "cosshell/nonlinear_oracle.hpp"

#include <cmath>
#include <limits>

#include "cosshell/error.hpp"

namespace cosshell {

Mat3 spd_sqrt(const Mat3& a, double tol) {
  const Eigen::SelfAdjointEigenSolver<Mat3> es(sym(a));
  if (es.info() != Eigen::Success) throw Error(ErrorCode::NotSPD, "eigendecomposition failed");
  const Vec3 ev = es.eigenvalues();
  if (!(ev(0) > tol * std::max(1.0, std::abs(ev(2))))) {
    throw Error(ErrorCode::NotSPD, "matrix is not positive definite");
  }
  const Mat3& q = es.eigenvectors();
  return q * ev.cwiseSqrt().asDiagonal() * q.transpose();
}

Mat3 polar_rotation(const Mat3& F) {
  const double scale = std::max(F.norm(), std::numeric_limits<double>::min());
  if (!(F.determinant() > 1e-14 * scale * scale * scale)) {
    throw Error(ErrorCode::SingularF, "deformation gradient is singular or orientation reversing");
  }
  const Eigen::JacobiSVD<Mat3> svd(F, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

DeformedSurface deformed_surface(const GeometryFrame& f, const LocalDisplacement& u, double t) {
  DeformedSurface m;
  for (int a = 0; a < 2; ++a) {
    m.grad_m.col(a) = f.tangent(a) + t * u.d[a];
    for (int b = 0; b < 2; ++b) m.dd_m[a][b] = f.dd_y0(a, b) + t * u.dd[a][b];
  }
  const Vec3 c = m.grad_m.col(0).cross(m.grad_m.col(1));
  const double norm = c.norm();
  if (!(norm > 0.0)) throw Error(ErrorCode::SingularF, "deformed tangents are parallel");
  m.n = c / norm;
  for (int b = 0; b < 2; ++b) {
    const Vec3 dc = m.dd_m[0][b].cross(m.grad_m.col(1)) + m.grad_m.col(0).cross(m.dd_m[1][b]);
    m.d_n[b] = (dc - m.n * m.n.dot(dc)) / norm;
  }
  m.I_m = m.grad_m.transpose() * m.grad_m;
  return m;
}

Mat3 polar_rotation_explicit(const GeometryFrame& f, const DeformedSurface& m) {
  Mat3 gm;
  gm.leftCols<2>() = m.grad_m;
  gm.col(2) = m.n;
  const Mat3 inv_hat = hat(Mat2(m.I_m.inverse()));
  return gm * f.grad_theta_inv * spd_sqrt(f.grad_theta * inv_hat * f.grad_theta.transpose());
}

namespace {

Mat3 deformation_gradient(const GeometryFrame& f, const DeformedSurface& m) {
  Mat3 gm;
  gm.leftCols<2>() = m.grad_m;
  gm.col(2) = m.n;
  return gm * f.grad_theta_inv;
}

Mat3 rotation_at(const SurfaceChart& chart, const DisplacementFunction& field, const Vec2& p, double t) {
  const GeometryFrame f = evaluate_frame(chart, p);
  return polar_rotation(deformation_gradient(f, deformed_surface(f, field.evaluate(f), t)));
}

}  // namespace

NonlinearStrains nonlinear_strains(const SurfaceChart& chart, const DisplacementFunction& field,
                                   const Vec2& p, double t, const OracleOptions& opt) {
  const GeometryFrame f = evaluate_frame(chart, p);
  const LocalDisplacement u = field.evaluate(f);
  const DeformedSurface m = deformed_surface(f, u, t);
  const Mat3 F = deformation_gradient(f, m);

  NonlinearStrains s;
  s.n = m.n;
  s.Q = polar_rotation(F);
  s.Q_explicit = polar_rotation_explicit(f, m);
  s.E = s.Q.transpose() * F - Mat3::Identity();
  // Lifted with the unit (3,3) slot both Gram tensors are definite, so the roots stay accurate.
  const Mat3 gram_m = f.grad_theta_inv.transpose() * hat(m.I_m) * f.grad_theta_inv;
  const Mat3 gram_0 = f.grad_theta_inv.transpose() * hat(f.I) * f.grad_theta_inv;
  s.E_two_roots = spd_sqrt(gram_m) - spd_sqrt(gram_0);

  const Mat32 qa = s.Q * f.grad_y0;
  s.G = qa.transpose() * m.grad_m - f.I;
  Mat32 grad_n;
  grad_n.col(0) = m.d_n[0];
  grad_n.col(1) = m.d_n[1];
  s.R = -qa.transpose() * grad_n - f.II;

  Mat3 axial = Mat3::Zero();
  for (int a = 0; a < 2; ++a) {
    const double delta = opt.rotation_step * chart.domain().extent(a);
    Vec2 e = Vec2::Zero();
    e(a) = delta;
    const Mat3 dq = (rotation_at(chart, field, p - 2.0 * e, t) - 8.0 * rotation_at(chart, field, p - e, t) +
                     8.0 * rotation_at(chart, field, p + e, t) - rotation_at(chart, field, p + 2.0 * e, t)) /
                    (12.0 * delta);
    axial.col(a) = axl(Mat3(s.Q.transpose() * dq));
  }
  s.K = axial * f.grad_theta_inv;
  return s;
}

double fitted_slope(const std::vector<double>& ts, const std::vector<double>& defects) {
  const std::size_t n = ts.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = std::log(ts[k]);
    const double y = std::log(std::max(defects[k], std::numeric_limits<double>::min()));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<SlopeTest> linearization_slope_tests(const SurfaceChart& chart,
                                                 const DisplacementFunction& field, const Vec2& p,
                                                 const std::vector<double>& ts,
                                                 const OracleOptions& opt) {
  const GeometryFrame f = evaluate_frame(chart, p);
  const LocalDisplacement u = field.evaluate(f);
  const StrainState lin = compute_strain_state(f, u);
  const Vec3 dn = rotated_normal_increment(f, u);

  const std::vector<std::string> names = {"E", "G", "R", "K", "normal", "Q"};
  std::vector<SlopeTest> out(names.size());
  for (std::size_t k = 0; k < names.size(); ++k) {
    out[k].measure = names[k];
    out[k].ts = ts;
  }
  double scale = 1.0;
  for (double t : ts) {
    const NonlinearStrains s = nonlinear_strains(chart, field, p, t, opt);
    const double d[] = {
        (s.E / t - lin.E).norm(),
        (s.G / t - lin.G).norm(),
        (s.R / t - lin.R_inf).norm(),
        (s.K / t - lin.K).norm(),
        ((s.n - f.n0) / t - dn).norm(),
        ((s.Q - Mat3::Identity()) / t - lin.A_theta).norm(),
    };
    for (std::size_t k = 0; k < names.size(); ++k) out[k].defects.push_back(d[k]);
  }
  scale = std::max({1.0, lin.E.norm(), lin.K.norm(), lin.R_inf.norm()});
  for (auto& test : out) {
    test.slope = fitted_slope(test.ts, test.defects);
    double dmax = 0.0;
    for (double d : test.defects) dmax = std::max(dmax, d);
    test.pass = test.slope >= 0.9 || dmax <= 1e-9 * scale;
  }
  return out;
}

double bending_identity_residual(const SurfaceChart& chart, const DisplacementFunction& field,
                                 const Vec2& p, double t, const OracleOptions& opt) {
  const GeometryFrame f = evaluate_frame(chart, p);
  const StrainState lin = compute_strain_state(f, field.evaluate(f));
  const Mat2 rp = nonlinear_strains(chart, field, p, t, opt).R;
  const Mat2 rm = nonlinear_strains(chart, field, p, -t, opt).R;
  return ((rp - rm) / (2.0 * t) - lin.R_inf).norm();
}

}  // namespace cosshell
