#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cosshell/jet.hpp"
#include "cosshell/tensor.hpp"

namespace cosshell {

// Closed rectangle [x1_min, x1_max] x [x2_min, x2_max] in chart coordinates.
struct Rect {
  double x1_min = 0.0;
  double x1_max = 1.0;
  double x2_min = 0.0;
  double x2_max = 1.0;

  double extent(int dir) const { return dir == 0 ? x1_max - x1_min : x2_max - x2_min; }
  double lower(int dir) const { return dir == 0 ? x1_min : x2_min; }
  double upper(int dir) const { return dir == 0 ? x1_max : x2_max; }
  bool contains(const Vec2& p, double tol = 0.0) const;
};

enum class DerivativeMode { ClosedForm, Numeric };

// Third-order Taylor jet of y0 at a point; component c is y0[c].
using SurfaceJet = std::array<Jet<3>, 3>;

// Grid samples of y0 interpolated by tensor-product natural cubic splines.
class TabulatedSurface {
 public:
  // xs1, xs2 strictly increasing; values[c][i * xs2.size() + j] = y0_c(xs1[i], xs2[j]).
  TabulatedSurface(std::vector<double> xs1, std::vector<double> xs2,
                   std::array<std::vector<double>, 3> values);

  // Reads rows "x1,x2,y0_1,y0_2,y0_3" forming a full tensor grid in any order.
  static TabulatedSurface from_csv(const std::string& path);

  Vec3 evaluate(double x1, double x2) const;
  Rect domain() const;

 private:
  std::vector<double> xs1_;
  std::vector<double> xs2_;
  std::array<std::vector<double>, 3> values_;
  std::array<std::vector<double>, 3> second_x1_;  // spline moments along x1 per row j
};

// Catalog charts are evaluated on double or on Jet<3> for exact derivatives.
struct PlaneChart {
  template <class T>
  Vec3T<T> map(const T& x1, const T& x2) const {
    return {x1, x2, T(0.0)};
  }
};

struct CylinderChart {
  double radius = 1.0;
  template <class T>
  Vec3T<T> map(const T& x1, const T& x2) const {
    using std::cos;
    using std::sin;
    return {radius * cos(x1), radius * sin(x1), x2};
  }
};

// x1 longitude, x2 latitude; domains must avoid the poles.
struct SphereChart {
  double radius = 1.0;
  template <class T>
  Vec3T<T> map(const T& x1, const T& x2) const {
    using std::cos;
    using std::sin;
    const T c2 = cos(x2);
    return {radius * cos(x1) * c2, radius * sin(x1) * c2, radius * sin(x2)};
  }
};

// Graph z = (k1 x1^2 + 2 k12 x1 x2 + k2 x2^2) / 2 + amp sin(w x1) sin(w x2).
struct GraphChart {
  double k1 = 0.0;
  double k2 = 0.0;
  double k12 = 0.0;
  double amp = 0.0;
  double wave = 1.0;
  template <class T>
  Vec3T<T> map(const T& x1, const T& x2) const {
    using std::sin;
    T z = 0.5 * (k1 * (x1 * x1) + 2.0 * k12 * (x1 * x2) + k2 * (x2 * x2));
    if (amp != 0.0) z = z + amp * (sin(wave * x1) * sin(wave * x2));
    return {x1, x2, z};
  }
};

class SurfaceChart {
 public:
  using Analytic = std::variant<PlaneChart, CylinderChart, SphereChart, GraphChart>;

  SurfaceChart(std::string name, Analytic chart, Rect domain);
  SurfaceChart(std::string name, TabulatedSurface table);

  // Names: plane, cylinder (radius), sphere (radius), paraboloid (k1, k2, k12), wavy (amp, wave).
  static SurfaceChart catalog(const std::string& name, const std::vector<double>& params,
                              const Rect* domain = nullptr);
  static std::vector<std::string> catalog_names();

  const std::string& name() const { return name_; }
  const Rect& domain() const { return domain_; }
  DerivativeMode mode() const { return mode_; }
  bool is_tabulated() const { return table_ != nullptr; }

  // Tabulated charts are always numeric.
  void set_mode(DerivativeMode mode);
  // Smallest admissible det I.
  double metric_floor() const { return metric_floor_; }
  void set_metric_floor(double c0) { metric_floor_ = c0; }
  // Finite-difference step as a fraction of the domain extent.
  double step_fraction() const { return step_fraction_; }
  void set_step_fraction(double f) { step_fraction_ = f; }

  Vec3 position(const Vec2& p) const;
  SurfaceJet jet(const Vec2& p) const;

 private:
  std::string name_;
  Analytic analytic_;
  std::shared_ptr<const TabulatedSurface> table_;
  Rect domain_;
  DerivativeMode mode_ = DerivativeMode::ClosedForm;
  double metric_floor_ = 1e-12;
  double step_fraction_ = 1e-3;
};

// Finite-difference Taylor jet up to `order` (1..3); higher coefficients are zero.
// Central stencils in the interior, second-order one-sided near the boundary.
SurfaceJet numeric_derivatives(const SurfaceChart& chart, const Vec2& p, int order,
                               double step_fraction);

struct GeometryFrame {
  Vec2 point = Vec2::Zero();
  Vec3 y0 = Vec3::Zero();
  Mat32 grad_y0 = Mat32::Zero();   // (a1 | a2)
  Vec3 n0 = Vec3::Zero();
  Mat3 grad_theta = Mat3::Zero();  // (a1 | a2 | n0)
  Mat3 grad_theta_inv = Mat3::Zero();
  double det_grad_theta = 0.0;     // sqrt(det I)
  Mat2 I = Mat2::Zero();
  Mat2 II = Mat2::Zero();
  Mat2 L = Mat2::Zero();           // I^{-1} II, entries b^a_b
  std::array<Mat2, 2> gamma{};     // gamma[g](a, b) = Christoffel symbol of the second kind
  double H = 0.0;
  double K = 0.0;
  Mat2 C = Mat2::Zero();           // sqrt(det I) [[0, 1], [-1, 0]]

  std::array<Mat32, 2> d_grad_y0{};                  // [b].col(a) = d_a d_b y0
  std::array<Vec3, 2> d_n0{};
  std::array<std::array<Vec3, 2>, 2> dd_n0{};
  std::array<std::array<Vec3, 2>, 2> d_contra{};     // [b][a] = d_b a^a
  std::array<double, 2> d_det{};                     // d_b sqrt(det I)
  std::array<Mat2, 2> d_L{};                         // d_b L
  std::array<std::array<std::array<Vec3, 2>, 2>, 2> ddd_y0{};  // [a][b][c] = d_abc y0

  Vec3 tangent(int a) const { return grad_y0.col(a); }
  Vec3 contra(int a) const { return grad_theta_inv.row(a).transpose(); }
  Vec3 dd_y0(int a, int b) const { return d_grad_y0[b].col(a); }
};

// Throws DegenerateMetric when det I < chart.metric_floor(), OutOfDomain outside the chart.
GeometryFrame evaluate_frame(const SurfaceChart& chart, const Vec2& p);
// Frame from a supplied jet; used for both derivative modes.
GeometryFrame frame_from_jet(const SurfaceJet& jet, const Vec2& p, double metric_floor);

struct LiftedTensors {
  Mat3 I_hat;
  Mat3 II_hat;
  Mat3 L_flat;
};
LiftedTensors lifted_tensors(const GeometryFrame& f);

// Ambient tensors built from the frame.
Mat3 tensor_A(const GeometryFrame& f);  // (grad y0 | 0) [grad Theta]^{-1}
Mat3 tensor_B(const GeometryFrame& f);  // -(grad n0 | 0) [grad Theta]^{-1}
Mat3 tensor_C(const GeometryFrame& f);  // det(grad Theta) [grad Theta]^{-T} J [grad Theta]^{-1}

// [grad Theta]^{-T} M^flat [grad Theta]^{-1}
Mat3 lift(const GeometryFrame& f, const Mat2& m);

std::array<double, 2> principal_curvatures(const GeometryFrame& f);
double max_abs_curvature(std::span<const GeometryFrame> frames);

// |d_a n0 + sum_b L(b, a) a_b| over both directions.
double weingarten_residual(const GeometryFrame& f);
// |d_a a_b - sum_g gamma[g](a, b) a_g - II(a, b) n0| over all index pairs.
double gauss_residual(const GeometryFrame& f);

}  // namespace cosshell
