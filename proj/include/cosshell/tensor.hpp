#pragma once

#include <Eigen/Dense>
#include <array>

namespace cosshell {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat32 = Eigen::Matrix<double, 3, 2>;

template <class M>
M sym(const M& a) {
  return 0.5 * (a + a.transpose());
}

template <class M>
M skew(const M& a) {
  return 0.5 * (a - a.transpose());
}

template <class M>
M dev(const M& a) {
  return a - (a.trace() / static_cast<double>(a.rows())) * M::Identity();
}

// axl(anti(v)) = v with anti(v) x = v cross x.
inline Mat3 anti(const Vec3& v) {
  Mat3 a;
  a << 0.0, -v(2), v(1),
       v(2), 0.0, -v(0),
       -v(1), v(0), 0.0;
  return a;
}

// Reads only the skew part.
inline Vec3 axl(const Mat3& a) {
  const Mat3 s = skew(a);
  return Vec3(-s(1, 2), s(0, 2), -s(0, 1));
}

// 2x2 block in the upper left, zeros elsewhere.
inline Mat3 flat(const Mat2& m) {
  Mat3 out = Mat3::Zero();
  out.topLeftCorner<2, 2>() = m;
  return out;
}

// As flat, with 1 in the (3,3) slot.
inline Mat3 hat(const Mat2& m) {
  Mat3 out = flat(m);
  out(2, 2) = 1.0;
  return out;
}

// Columnwise cross product q x M.
inline Mat3 cross_columns(const Vec3& q, const Mat3& m) {
  Mat3 out;
  for (int c = 0; c < 3; ++c) out.col(c) = q.cross(m.col(c));
  return out;
}

// Frobenius inner product.
template <class M>
double inner(const M& a, const M& b) {
  return (a.array() * b.array()).sum();
}

}  // namespace cosshell
