#pragma once

#include <array>
#include <cmath>

namespace cosshell {

// Truncated bivariate Taylor polynomial of total degree N around a base point.
// Coefficient (i, j) multiplies dx1^i dx2^j. Arithmetic is exact up to degree N.
template <int N>
class Jet {
 public:
  static constexpr int kDegree = N;
  static constexpr int kSize = (N + 1) * (N + 2) / 2;

  constexpr Jet() = default;
  constexpr Jet(double constant) { c_[0] = constant; }  // NOLINT: implicit by design

  static Jet variable(double base, int dir) {
    Jet out(base);
    if (N >= 1) out.c_[index(dir == 0 ? 1 : 0, dir == 0 ? 0 : 1)] = 1.0;
    return out;
  }

  static constexpr int index(int i, int j) {
    const int d = i + j;
    return d * (d + 1) / 2 + j;
  }

  double value() const { return c_[0]; }
  double coeff(int i, int j) const { return (i + j <= N) ? c_[index(i, j)] : 0.0; }
  void set_coeff(int i, int j, double v) { c_[index(i, j)] = v; }

  // Partial derivative d^(i+j) / dx1^i dx2^j at the base point.
  double derivative(int i, int j) const { return coeff(i, j) * factorial(i) * factorial(j); }

  // Derivative jet; its top-degree coefficients are zero, not known.
  Jet partial(int dir) const {
    Jet out;
    for (int d = 1; d <= N; ++d) {
      for (int j = 0; j <= d; ++j) {
        const int i = d - j;
        const int k = dir == 0 ? i : j;
        if (k == 0) continue;
        const int ti = dir == 0 ? i - 1 : i;
        const int tj = dir == 0 ? j : j - 1;
        out.c_[index(ti, tj)] = k * c_[index(i, j)];
      }
    }
    return out;
  }

  Jet& operator+=(const Jet& o) {
    for (int k = 0; k < kSize; ++k) c_[k] += o.c_[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (int k = 0; k < kSize; ++k) c_[k] -= o.c_[k];
    return *this;
  }
  Jet& operator*=(double s) {
    for (double& x : c_) x *= s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator-(Jet a) { return a *= -1.0; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator/(Jet a, double s) { return a *= 1.0 / s; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet out;
    for (int da = 0; da <= N; ++da) {
      for (int ja = 0; ja <= da; ++ja) {
        const double ca = a.c_[index(da - ja, ja)];
        if (ca == 0.0) continue;
        for (int db = 0; db + da <= N; ++db) {
          for (int jb = 0; jb <= db; ++jb) {
            out.c_[index(da - ja + db - jb, ja + jb)] += ca * b.c_[index(db - jb, jb)];
          }
        }
      }
    }
    return out;
  }

  friend Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
  friend Jet operator/(double s, const Jet& b) { return s * reciprocal(b); }

  // f(a0 + r) = sum_k taylor[k] r^k; r is nilpotent of order N + 1.
  static Jet compose(const Jet& a, const std::array<double, N + 1>& taylor) {
    Jet r = a;
    r.c_[0] = 0.0;
    Jet out(taylor[0]);
    Jet power(1.0);
    for (int k = 1; k <= N; ++k) {
      power = power * r;
      out += taylor[k] * power;
    }
    return out;
  }

  friend Jet reciprocal(const Jet& a) {
    std::array<double, N + 1> t{};
    double p = 1.0 / a.c_[0];
    for (int k = 0; k <= N; ++k) {
      t[k] = p;
      p *= -1.0 / a.c_[0];
    }
    return compose(a, t);
  }

  friend Jet sqrt(const Jet& a) {
    std::array<double, N + 1> t{};
    const double a0 = a.c_[0];
    // d^k/dx^k sqrt(x) / k!
    double binom = 1.0;
    for (int k = 0; k <= N; ++k) {
      t[k] = binom * std::sqrt(a0) / std::pow(a0, k);
      binom *= (0.5 - k) / (k + 1);
    }
    return compose(a, t);
  }

  friend Jet sin(const Jet& a) {
    std::array<double, N + 1> t{};
    const double s = std::sin(a.c_[0]);
    const double c = std::cos(a.c_[0]);
    const double cycle[4] = {s, c, -s, -c};
    double fact = 1.0;
    for (int k = 0; k <= N; ++k) {
      if (k > 0) fact *= k;
      t[k] = cycle[k % 4] / fact;
    }
    return compose(a, t);
  }

  friend Jet cos(const Jet& a) {
    std::array<double, N + 1> t{};
    const double s = std::sin(a.c_[0]);
    const double c = std::cos(a.c_[0]);
    const double cycle[4] = {c, -s, -c, s};
    double fact = 1.0;
    for (int k = 0; k <= N; ++k) {
      if (k > 0) fact *= k;
      t[k] = cycle[k % 4] / fact;
    }
    return compose(a, t);
  }

 private:
  static constexpr double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
  }

  std::array<double, kSize> c_{};
};

template <class T>
struct Vec3T {
  T x, y, z;

  friend Vec3T operator+(const Vec3T& a, const Vec3T& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3T operator-(const Vec3T& a, const Vec3T& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3T operator*(const T& s, const Vec3T& a) { return {s * a.x, s * a.y, s * a.z}; }
  friend Vec3T operator/(const Vec3T& a, const T& s) { return {a.x / s, a.y / s, a.z / s}; }
  const T& operator[](int k) const { return k == 0 ? x : (k == 1 ? y : z); }
  T& operator[](int k) { return k == 0 ? x : (k == 1 ? y : z); }
};

template <class T>
T dot(const Vec3T<T>& a, const Vec3T<T>& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

template <class T>
Vec3T<T> cross(const Vec3T<T>& a, const Vec3T<T>& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

}  // namespace cosshell
