#include "cosshell/displacement.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "cosshell/csv.hpp"
#include "cosshell/error.hpp"

namespace cosshell {

Grid::Grid(const Rect& domain, int n1, int n2) : domain_(domain), n1_(n1), n2_(n2) {
  if (n1 < 8 || n2 < 8) {
    throw Error(ErrorCode::GridTooCoarse, "grid must have at least 8 x 8 nodes");
  }
  h1_ = domain.extent(0) / (n1 - 1);
  h2_ = domain.extent(1) / (n2 - 1);
}

Vec2 Grid::point(int i, int j) const {
  // Pin the last node to the exact upper bound.
  const double x1 = i == n1_ - 1 ? domain_.x1_max : domain_.x1_min + i * h1_;
  const double x2 = j == n2_ - 1 ? domain_.x2_max : domain_.x2_min + j * h2_;
  return Vec2(x1, x2);
}

double Grid::weight(int i, int j) const {
  double w = h1_ * h2_;
  if (i == 0 || i == n1_ - 1) w *= 0.5;
  if (j == 0 || j == n2_ - 1) w *= 0.5;
  return w;
}

std::vector<GeometryFrame> evaluate_frames(const SurfaceChart& chart, const Grid& grid) {
  std::vector<GeometryFrame> frames;
  frames.reserve(grid.size());
  for (int i = 0; i < grid.n1(); ++i) {
    for (int j = 0; j < grid.n2(); ++j) frames.push_back(evaluate_frame(chart, grid.point(i, j)));
  }
  return frames;
}

namespace {

struct Weight1d {
  int offset;
  double w;
};

std::vector<Weight1d> operator_1d(int order, int i, int n, double h, BoundaryTreatment bc) {
  const bool interior = i > 0 && i < n - 1;
  if (order == 0) return {{0, 1.0}};
  if (bc == BoundaryTreatment::Clamped || interior) {
    if (order == 1) return {{-1, -0.5 / h}, {1, 0.5 / h}};
    return {{-1, 1.0 / (h * h)}, {0, -2.0 / (h * h)}, {1, 1.0 / (h * h)}};
  }
  const int s = i == 0 ? 1 : -1;
  if (order == 1) return {{0, -1.5 * s / h}, {s, 2.0 * s / h}, {2 * s, -0.5 * s / h}};
  return {{0, 2.0 / (h * h)}, {s, -5.0 / (h * h)}, {2 * s, 4.0 / (h * h)}, {3 * s, -1.0 / (h * h)}};
}

using Resolved = std::vector<std::pair<std::size_t, Mat3>>;

// Node (i, j) possibly outside the grid, expressed through grid node values.
Resolved resolve(const Grid& g, const std::vector<GeometryFrame>& frames, int i, int j) {
  const int n1 = g.n1();
  const int n2 = g.n2();
  auto reflect = [&](int bi, int bj, Resolved inner) {
    const Vec3& n = frames[g.node(bi, bj)].n0;
    const Mat3 r = -Mat3::Identity() + 2.0 * n * n.transpose();
    for (auto& t : inner) t.second = r * t.second;
    return inner;
  };
  if (i < 0) return reflect(0, std::clamp(j, 0, n2 - 1), resolve(g, frames, -i, j));
  if (i > n1 - 1) return reflect(n1 - 1, std::clamp(j, 0, n2 - 1), resolve(g, frames, 2 * (n1 - 1) - i, j));
  if (j < 0) return reflect(i, 0, resolve(g, frames, i, -j));
  if (j > n2 - 1) return reflect(i, n2 - 1, resolve(g, frames, i, 2 * (n2 - 1) - j));
  return {{g.node(i, j), Mat3::Identity()}};
}

}  // namespace

StencilOperator::StencilOperator(const Grid& grid, const std::vector<GeometryFrame>& frames,
                                 BoundaryTreatment bc)
    : entries_(grid.size()), bc_(bc) {
  static constexpr int kOrders[6][2] = {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
  for (int i = 0; i < grid.n1(); ++i) {
    for (int j = 0; j < grid.n2(); ++j) {
      auto& list = entries_[grid.node(i, j)];
      for (int slot = 0; slot < 6; ++slot) {
        const auto w1 = operator_1d(kOrders[slot][0], i, grid.n1(), grid.spacing(0), bc);
        const auto w2 = operator_1d(kOrders[slot][1], j, grid.n2(), grid.spacing(1), bc);
        std::map<std::size_t, Mat3> acc;
        for (const auto& a : w1) {
          for (const auto& b : w2) {
            for (const auto& [node, map] : resolve(grid, frames, i + a.offset, j + b.offset)) {
              auto it = acc.try_emplace(node, Mat3::Zero()).first;
              it->second += a.w * b.w * map;
            }
          }
        }
        for (const auto& [node, coeff] : acc) list.push_back({node, slot, coeff});
      }
    }
  }
}

LocalDisplacement StencilOperator::apply(std::size_t node, const std::vector<Vec3>& values) const {
  std::array<Vec3, 6> slots;
  slots.fill(Vec3::Zero());
  for (const auto& e : entries_[node]) slots[e.slot] += e.coeff * values[e.node];
  LocalDisplacement u;
  u.v = slots[0];
  u.d = {slots[1], slots[2]};
  u.dd = {{{slots[3], slots[4]}, {slots[4], slots[5]}}};
  return u;
}

DisplacementField::DisplacementField(const Grid& grid)
    : grid_(grid), values_(grid.size(), Vec3::Zero()) {}

DisplacementField::DisplacementField(const Grid& grid, std::vector<Vec3> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw Error(ErrorCode::InvalidConfig, "field size does not match grid");
}

LocalDisplacement DisplacementField::local(const StencilOperator& stencil, int i, int j) const {
  return stencil.apply(grid_.node(i, j), values_);
}

std::string DisplacementField::to_csv() const {
  std::string out = "i,j,x1,x2,v1,v2,v3\n";
  for (int i = 0; i < grid_.n1(); ++i) {
    for (int j = 0; j < grid_.n2(); ++j) {
      const Vec2 p = grid_.point(i, j);
      const Vec3& v = at(i, j);
      out += csv_line(std::vector<std::string>{std::to_string(i), std::to_string(j), format_number(p(0)),
                                               format_number(p(1)), format_number(v(0)),
                                               format_number(v(1)), format_number(v(2))});
    }
  }
  return out;
}

DisplacementField DisplacementField::from_csv(const std::string& path, const Grid& grid) {
  const CsvTable t = read_csv(path);
  const std::size_t ci = t.column("i"), cj = t.column("j");
  const std::size_t c1 = t.column("v1"), c2 = t.column("v2"), c3 = t.column("v3");
  DisplacementField f(grid);
  std::vector<bool> seen(grid.size(), false);
  for (const auto& row : t.rows) {
    const int i = static_cast<int>(row[ci]);
    const int j = static_cast<int>(row[cj]);
    if (i < 0 || j < 0 || i >= grid.n1() || j >= grid.n2()) {
      throw Error(ErrorCode::InvalidConfig, "node index outside grid in " + path);
    }
    f.at(i, j) = Vec3(row[c1], row[c2], row[c3]);
    seen[grid.node(i, j)] = true;
  }
  for (bool s : seen) {
    if (!s) throw Error(ErrorCode::InvalidConfig, "missing nodes in " + path);
  }
  return f;
}

RigidMotion RigidMotion::random(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec3 a, b;
  for (int k = 0; k < 3; ++k) a(k) = u(rng);
  for (int k = 0; k < 3; ++k) b(k) = u(rng);
  return RigidMotion(a, b);
}

LocalDisplacement RigidMotion::evaluate(const GeometryFrame& f) const {
  LocalDisplacement u;
  u.v = a_ + b_.cross(f.y0);
  for (int a = 0; a < 2; ++a) {
    u.d[a] = b_.cross(f.tangent(a));
    for (int b = 0; b < 2; ++b) u.dd[a][b] = b_.cross(f.dd_y0(a, b));
  }
  return u;
}

QuadraticField::QuadraticField(const Vec3& c0, const std::array<Vec3, 2>& c1,
                               const std::array<std::array<Vec3, 2>, 2>& c2)
    : c0_(c0), c1_(c1), c2_(c2) {
  c2_[0][1] = c2_[1][0] = 0.5 * (c2[0][1] + c2[1][0]);
}

LocalDisplacement QuadraticField::evaluate(const GeometryFrame& f) const {
  const Vec2& x = f.point;
  LocalDisplacement u;
  u.v = c0_;
  for (int a = 0; a < 2; ++a) {
    u.v += c1_[a] * x(a);
    u.d[a] = c1_[a];
    for (int b = 0; b < 2; ++b) {
      u.v += 0.5 * c2_[a][b] * x(a) * x(b);
      u.d[a] += c2_[a][b] * x(b);
      u.dd[a][b] = c2_[a][b];
    }
  }
  return u;
}

TrigField::TrigField(std::uint64_t seed, int modes, double amplitude, double max_wavenumber) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int m = 0; m < modes; ++m) {
    Mode md;
    md.k = Vec2(u(rng), u(rng)) * max_wavenumber;
    md.amp = Vec3(u(rng), u(rng), u(rng)) * amplitude;
    md.phase = M_PI * u(rng);
    modes_.push_back(md);
  }
}

LocalDisplacement TrigField::evaluate(const GeometryFrame& f) const {
  LocalDisplacement u;
  for (const auto& m : modes_) {
    const double arg = m.k.dot(f.point) + m.phase;
    const double s = std::sin(arg);
    const double c = std::cos(arg);
    u.v += s * m.amp;
    for (int a = 0; a < 2; ++a) {
      u.d[a] += c * m.k(a) * m.amp;
      for (int b = 0; b < 2; ++b) u.dd[a][b] -= s * m.k(a) * m.k(b) * m.amp;
    }
  }
  return u;
}

ClampedField::ClampedField(const Rect& domain, std::uint64_t seed, int modes, double amplitude)
    : domain_(domain), inner_(seed, modes, amplitude, 3.0) {}

LocalDisplacement ClampedField::evaluate(const GeometryFrame& f) const {
  std::array<double, 2> s0{}, s1{}, s2{};
  for (int a = 0; a < 2; ++a) {
    const double ext = domain_.extent(a);
    const double t = M_PI * (f.point(a) - domain_.lower(a)) / ext;
    const double sn = std::sin(t);
    s0[a] = sn * sn;
    s1[a] = M_PI * std::sin(2.0 * t) / ext;
    s2[a] = 2.0 * M_PI * M_PI * std::cos(2.0 * t) / (ext * ext);
  }
  const double s = s0[0] * s0[1];
  const std::array<double, 2> ds = {s1[0] * s0[1], s0[0] * s1[1]};
  const std::array<std::array<double, 2>, 2> dds = {
      std::array<double, 2>{s2[0] * s0[1], s1[0] * s1[1]},
      std::array<double, 2>{s1[0] * s1[1], s0[0] * s2[1]}};
  const LocalDisplacement g = inner_.evaluate(f);
  LocalDisplacement u;
  u.v = s * g.v;
  for (int a = 0; a < 2; ++a) {
    u.d[a] = ds[a] * g.v + s * g.d[a];
    for (int b = 0; b < 2; ++b) {
      u.dd[a][b] = dds[a][b] * g.v + ds[a] * g.d[b] + ds[b] * g.d[a] + s * g.dd[a][b];
    }
  }
  return u;
}

DisplacementField sample(const DisplacementFunction& fn, const Grid& grid,
                         const std::vector<GeometryFrame>& frames) {
  DisplacementField out(grid);
  for (std::size_t k = 0; k < grid.size(); ++k) out.values()[k] = fn.evaluate(frames[k]).v;
  return out;
}

}  // namespace cosshell
