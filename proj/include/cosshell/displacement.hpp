#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cosshell/kinematics.hpp"
#include "cosshell/surface_geometry.hpp"

namespace cosshell {

// Uniform node grid over a chart rectangle, nodes (i, j) with 0 <= i < n1, 0 <= j < n2.
class Grid {
 public:
  // Throws GridTooCoarse below 8 x 8 nodes.
  Grid(const Rect& domain, int n1, int n2);

  const Rect& domain() const { return domain_; }
  int n1() const { return n1_; }
  int n2() const { return n2_; }
  std::size_t size() const { return static_cast<std::size_t>(n1_) * static_cast<std::size_t>(n2_); }
  double spacing(int dir) const { return dir == 0 ? h1_ : h2_; }
  std::size_t node(int i, int j) const { return static_cast<std::size_t>(i) * n2_ + j; }
  Vec2 point(int i, int j) const;
  bool on_boundary(int i, int j) const { return i == 0 || j == 0 || i == n1_ - 1 || j == n2_ - 1; }
  // Trapezoid weight in chart measure.
  double weight(int i, int j) const;

 private:
  Rect domain_;
  int n1_;
  int n2_;
  double h1_;
  double h2_;
};

std::vector<GeometryFrame> evaluate_frames(const SurfaceChart& chart, const Grid& grid);

enum class BoundaryTreatment {
  // Boundary values are zero; ghosts mirror v tangentially odd and normally even about n0.
  // Second derivatives on boundary nodes are then only consistent for the normal part.
  Clamped,
  // Second-order one-sided stencils at the boundary; diagnostics only.
  OneSided,
};

// Derivative slot: 0 value, 1 d1, 2 d2, 3 d11, 4 d12, 5 d22.
struct StencilEntry {
  std::size_t node;
  int slot;
  Mat3 coeff;
};

// Linear maps from node values to pointwise derivatives at every node.
class StencilOperator {
 public:
  StencilOperator(const Grid& grid, const std::vector<GeometryFrame>& frames, BoundaryTreatment bc);

  const std::vector<StencilEntry>& at(std::size_t node) const { return entries_[node]; }
  BoundaryTreatment treatment() const { return bc_; }

  LocalDisplacement apply(std::size_t node, const std::vector<Vec3>& values) const;

 private:
  std::vector<std::vector<StencilEntry>> entries_;
  BoundaryTreatment bc_;
};

// Node values of a displacement on a grid.
class DisplacementField {
 public:
  explicit DisplacementField(const Grid& grid);
  DisplacementField(const Grid& grid, std::vector<Vec3> values);

  const Grid& grid() const { return grid_; }
  const std::vector<Vec3>& values() const { return values_; }
  std::vector<Vec3>& values() { return values_; }
  const Vec3& at(int i, int j) const { return values_[grid_.node(i, j)]; }
  Vec3& at(int i, int j) { return values_[grid_.node(i, j)]; }

  LocalDisplacement local(const StencilOperator& stencil, int i, int j) const;

  // Header "i,j,x1,x2,v1,v2,v3".
  std::string to_csv() const;
  static DisplacementField from_csv(const std::string& path, const Grid& grid);

 private:
  Grid grid_;
  std::vector<Vec3> values_;
};

// Displacement known in closed form, evaluated with exact chart derivatives.
class DisplacementFunction {
 public:
  virtual ~DisplacementFunction() = default;
  virtual LocalDisplacement evaluate(const GeometryFrame& f) const = 0;
};

// v = a + b x y0.
class RigidMotion final : public DisplacementFunction {
 public:
  RigidMotion(const Vec3& translation, const Vec3& rotation) : a_(translation), b_(rotation) {}
  static RigidMotion random(std::uint64_t seed);
  LocalDisplacement evaluate(const GeometryFrame& f) const override;

 private:
  Vec3 a_;
  Vec3 b_;
};

// v = c0 + sum_a c1[a] x_a + (1/2) sum_ab c2[a][b] x_a x_b, chart coordinates.
class QuadraticField final : public DisplacementFunction {
 public:
  QuadraticField(const Vec3& c0, const std::array<Vec3, 2>& c1, const std::array<std::array<Vec3, 2>, 2>& c2);
  LocalDisplacement evaluate(const GeometryFrame& f) const override;

 private:
  Vec3 c0_;
  std::array<Vec3, 2> c1_;
  std::array<std::array<Vec3, 2>, 2> c2_;
};

// Sum of plane waves amp_k sin(k . x + phase_k) with random data; smooth and generic.
class TrigField final : public DisplacementFunction {
 public:
  TrigField(std::uint64_t seed, int modes, double amplitude, double max_wavenumber);
  LocalDisplacement evaluate(const GeometryFrame& f) const override;

 private:
  struct Mode {
    Vec2 k;
    Vec3 amp;
    double phase;
  };
  std::vector<Mode> modes_;
};

// s(x) g(x) with s = sin^2(pi t1) sin^2(pi t2) in normalized coordinates t; satisfies the
// clamped conditions on the rectangle for any smooth g. Here g is a TrigField.
class ClampedField final : public DisplacementFunction {
 public:
  ClampedField(const Rect& domain, std::uint64_t seed, int modes, double amplitude);
  LocalDisplacement evaluate(const GeometryFrame& f) const override;

 private:
  Rect domain_;
  TrigField inner_;
};

DisplacementField sample(const DisplacementFunction& fn, const Grid& grid,
                         const std::vector<GeometryFrame>& frames);

}  // namespace cosshell
