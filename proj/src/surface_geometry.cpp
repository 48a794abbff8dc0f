#include "cosshell/surface_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "cosshell/csv.hpp"
#include "cosshell/error.hpp"

namespace cosshell {

namespace {

using J3 = Jet<3>;

// Natural cubic spline second-derivative moments.
std::vector<double> spline_moments(const std::vector<double>& xs, const double* ys, std::size_t stride) {
  const std::size_t n = xs.size();
  std::vector<double> m(n, 0.0);
  if (n < 3) return m;
  std::vector<double> diag(n, 0.0), rhs(n, 0.0), upper(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = xs[i] - xs[i - 1];
    const double h1 = xs[i + 1] - xs[i];
    diag[i] = (h0 + h1) / 3.0;
    upper[i] = h1 / 6.0;
    rhs[i] = (ys[(i + 1) * stride] - ys[i * stride]) / h1 - (ys[i * stride] - ys[(i - 1) * stride]) / h0;
  }
  // Thomas algorithm on rows 1..n-2.
  for (std::size_t i = 2; i + 1 < n; ++i) {
    const double lower = (xs[i] - xs[i - 1]) / 6.0;
    const double w = lower / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  for (std::size_t i = n - 2; i >= 1; --i) {
    m[i] = (rhs[i] - (i + 2 < n ? upper[i] * m[i + 1] : 0.0)) / diag[i];
    if (i == 1) break;
  }
  return m;
}

double spline_eval(const std::vector<double>& xs, const double* ys, const double* m,
                   std::size_t stride, double x) {
  const std::size_t n = xs.size();
  std::size_t k = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
  k = std::clamp<std::size_t>(k, 1, n - 1);
  const double x0 = xs[k - 1];
  const double x1 = xs[k];
  const double h = x1 - x0;
  const double a = (x1 - x) / h;
  const double b = (x - x0) / h;
  return a * ys[(k - 1) * stride] + b * ys[k * stride] +
         ((a * a * a - a) * m[(k - 1) * stride] + (b * b * b - b) * m[k * stride]) * h * h / 6.0;
}

struct Offset {
  int k;
  double w;
};

// One-dimensional stencil for the derivative of order `order` at x in [lo, hi].
std::vector<Offset> stencil_1d(int order, double x, double lo, double hi, double h) {
  const double tol = 1e-12 * (hi - lo);
  const bool left_ok = x - 2.0 * h >= lo - tol;
  const bool right_ok = x + 2.0 * h <= hi + tol;
  std::vector<Offset> s;
  const double hk = std::pow(h, order);
  auto one_sided = [&](std::vector<Offset> fwd, bool forward) {
    for (auto& o : fwd) {
      if (!forward) {
        o.k = -o.k;
        if (order % 2 == 1) o.w = -o.w;
      }
      o.w /= hk;
    }
    return fwd;
  };
  switch (order) {
    case 0:
      return {{0, 1.0}};
    case 1:
      if (left_ok && right_ok) {
        s = {{-2, 1.0 / 12}, {-1, -8.0 / 12}, {1, 8.0 / 12}, {2, -1.0 / 12}};
        for (auto& o : s) o.w /= hk;
        return s;
      }
      return one_sided({{0, -1.5}, {1, 2.0}, {2, -0.5}}, right_ok);
    case 2:
      if (left_ok && right_ok) {
        s = {{-2, -1.0 / 12}, {-1, 16.0 / 12}, {0, -30.0 / 12}, {1, 16.0 / 12}, {2, -1.0 / 12}};
        for (auto& o : s) o.w /= hk;
        return s;
      }
      return one_sided({{0, 2.0}, {1, -5.0}, {2, 4.0}, {3, -1.0}}, right_ok);
    case 3:
      if (left_ok && right_ok) {
        s = {{-2, -0.5}, {-1, 1.0}, {1, -1.0}, {2, 0.5}};
        for (auto& o : s) o.w /= hk;
        return s;
      }
      return one_sided({{0, -2.5}, {1, 9.0}, {2, -12.0}, {3, 7.0}, {4, -1.5}}, right_ok);
    default:
      throw Error(ErrorCode::InvalidConfig, "derivative order above 3 is not supported");
  }
}

template <class Chart>
SurfaceJet analytic_jet(const Chart& chart, const Vec2& p) {
  const auto y = chart.map(J3::variable(p(0), 0), J3::variable(p(1), 1));
  return {y.x, y.y, y.z};
}

Vec3T<J3> component_jets(const SurfaceJet& s) { return {s[0], s[1], s[2]}; }

Vec3 value_of(const Vec3T<J3>& v) { return Vec3(v.x.value(), v.y.value(), v.z.value()); }

Vec3T<J3> partial_of(const Vec3T<J3>& v, int dir) {
  return {v.x.partial(dir), v.y.partial(dir), v.z.partial(dir)};
}

Vec3 derivative_of(const Vec3T<J3>& v, int i, int j) {
  return Vec3(v.x.derivative(i, j), v.y.derivative(i, j), v.z.derivative(i, j));
}

}  // namespace

bool Rect::contains(const Vec2& p, double tol) const {
  return p(0) >= x1_min - tol && p(0) <= x1_max + tol && p(1) >= x2_min - tol &&
         p(1) <= x2_max + tol;
}

TabulatedSurface::TabulatedSurface(std::vector<double> xs1, std::vector<double> xs2,
                                   std::array<std::vector<double>, 3> values)
    : xs1_(std::move(xs1)), xs2_(std::move(xs2)), values_(std::move(values)) {
  if (xs1_.size() < 4 || xs2_.size() < 4) {
    throw Error(ErrorCode::InvalidConfig, "tabulated chart needs at least 4x4 samples");
  }
  for (std::size_t i = 1; i < xs1_.size(); ++i) {
    if (!(xs1_[i] > xs1_[i - 1])) throw Error(ErrorCode::InvalidConfig, "x1 samples not increasing");
  }
  for (std::size_t j = 1; j < xs2_.size(); ++j) {
    if (!(xs2_[j] > xs2_[j - 1])) throw Error(ErrorCode::InvalidConfig, "x2 samples not increasing");
  }
  const std::size_t n1 = xs1_.size();
  const std::size_t n2 = xs2_.size();
  for (int c = 0; c < 3; ++c) {
    if (values_[c].size() != n1 * n2) throw Error(ErrorCode::InvalidConfig, "tabulated chart size mismatch");
    second_x1_[c].assign(n1 * n2, 0.0);
    for (std::size_t j = 0; j < n2; ++j) {
      const auto m = spline_moments(xs1_, values_[c].data() + j, n2);
      for (std::size_t i = 0; i < n1; ++i) second_x1_[c][i * n2 + j] = m[i];
    }
  }
}

TabulatedSurface TabulatedSurface::from_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  const std::vector<std::string> need = {"x1", "x2", "y0_1", "y0_2", "y0_3"};
  std::array<std::size_t, 5> col{};
  for (std::size_t k = 0; k < need.size(); ++k) col[k] = table.column(need[k]);
  std::map<std::pair<double, double>, Vec3> samples;
  std::vector<double> xs1, xs2;
  for (const auto& row : table.rows) {
    const double x1 = row[col[0]];
    const double x2 = row[col[1]];
    samples[{x1, x2}] = Vec3(row[col[2]], row[col[3]], row[col[4]]);
    xs1.push_back(x1);
    xs2.push_back(x2);
  }
  std::sort(xs1.begin(), xs1.end());
  xs1.erase(std::unique(xs1.begin(), xs1.end()), xs1.end());
  std::sort(xs2.begin(), xs2.end());
  xs2.erase(std::unique(xs2.begin(), xs2.end()), xs2.end());
  if (samples.size() != xs1.size() * xs2.size()) {
    throw Error(ErrorCode::InvalidConfig, "tabulated chart " + path + " is not a full tensor grid");
  }
  std::array<std::vector<double>, 3> values;
  for (auto& v : values) v.resize(samples.size());
  for (std::size_t i = 0; i < xs1.size(); ++i) {
    for (std::size_t j = 0; j < xs2.size(); ++j) {
      const Vec3& y = samples.at({xs1[i], xs2[j]});
      for (int c = 0; c < 3; ++c) values[c][i * xs2.size() + j] = y(c);
    }
  }
  return TabulatedSurface(std::move(xs1), std::move(xs2), std::move(values));
}

Vec3 TabulatedSurface::evaluate(double x1, double x2) const {
  const std::size_t n2 = xs2_.size();
  Vec3 out;
  std::vector<double> column(n2);
  for (int c = 0; c < 3; ++c) {
    for (std::size_t j = 0; j < n2; ++j) {
      column[j] = spline_eval(xs1_, values_[c].data() + j, second_x1_[c].data() + j, n2, x1);
    }
    const auto m2 = spline_moments(xs2_, column.data(), 1);
    out(c) = spline_eval(xs2_, column.data(), m2.data(), 1, x2);
  }
  return out;
}

Rect TabulatedSurface::domain() const {
  return Rect{xs1_.front(), xs1_.back(), xs2_.front(), xs2_.back()};
}

SurfaceChart::SurfaceChart(std::string name, Analytic chart, Rect domain)
    : name_(std::move(name)), analytic_(chart), domain_(domain) {
  if (!(domain_.extent(0) > 0.0) || !(domain_.extent(1) > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "chart domain must have positive extent");
  }
}

SurfaceChart::SurfaceChart(std::string name, TabulatedSurface table)
    : name_(std::move(name)),
      analytic_(PlaneChart{}),
      table_(std::make_shared<const TabulatedSurface>(std::move(table))),
      domain_(table_->domain()),
      mode_(DerivativeMode::Numeric) {}

SurfaceChart SurfaceChart::catalog(const std::string& name, const std::vector<double>& params,
                                   const Rect* domain) {
  auto param = [&](std::size_t k, double fallback) { return k < params.size() ? params[k] : fallback; };
  auto pick = [&](Rect fallback) { return domain ? *domain : fallback; };
  if (name == "plane") return SurfaceChart(name, PlaneChart{}, pick({0.0, 1.0, 0.0, 1.0}));
  if (name == "cylinder") {
    const double r = param(0, 1.0);
    if (!(r > 0.0)) throw Error(ErrorCode::InvalidConfig, "cylinder radius must be positive");
    return SurfaceChart(name, CylinderChart{r}, pick({0.0, 1.0, 0.0, 1.0}));
  }
  if (name == "sphere") {
    const double r = param(0, 1.0);
    if (!(r > 0.0)) throw Error(ErrorCode::InvalidConfig, "sphere radius must be positive");
    const Rect d = pick({0.0, 1.0, -0.5, 0.5});
    if (std::abs(d.x2_min) >= 0.5 * M_PI || std::abs(d.x2_max) >= 0.5 * M_PI) {
      throw Error(ErrorCode::InvalidConfig, "sphere patch must avoid the poles");
    }
    return SurfaceChart(name, SphereChart{r}, d);
  }
  if (name == "paraboloid") {
    return SurfaceChart(name, GraphChart{param(0, 1.0), param(1, 0.5), param(2, 0.0), 0.0, 1.0},
                        pick({-0.5, 0.5, -0.5, 0.5}));
  }
  if (name == "wavy") {
    return SurfaceChart(name, GraphChart{0.0, 0.0, 0.0, param(0, 0.1), param(1, M_PI)},
                        pick({0.0, 1.0, 0.0, 1.0}));
  }
  throw Error(ErrorCode::InvalidConfig, "unknown chart '" + name + "'");
}

std::vector<std::string> SurfaceChart::catalog_names() {
  return {"plane", "cylinder", "sphere", "paraboloid", "wavy"};
}

void SurfaceChart::set_mode(DerivativeMode mode) {
  if (table_ && mode == DerivativeMode::ClosedForm) {
    throw Error(ErrorCode::InvalidConfig, "tabulated charts support numeric derivatives only");
  }
  mode_ = mode;
}

Vec3 SurfaceChart::position(const Vec2& p) const {
  if (table_) return table_->evaluate(p(0), p(1));
  return std::visit(
      [&](const auto& c) {
        const auto y = c.map(p(0), p(1));
        return Vec3(y.x, y.y, y.z);
      },
      analytic_);
}

SurfaceJet SurfaceChart::jet(const Vec2& p) const {
  if (mode_ == DerivativeMode::Numeric) return numeric_derivatives(*this, p, 3, step_fraction_);
  return std::visit([&](const auto& c) { return analytic_jet(c, p); }, analytic_);
}

SurfaceJet numeric_derivatives(const SurfaceChart& chart, const Vec2& p, int order,
                               double step_fraction) {
  if (order < 1 || order > 3) throw Error(ErrorCode::InvalidConfig, "numeric derivative order must be 1..3");
  if (!(step_fraction >= 1e-10)) {
    throw Error(ErrorCode::StepUnderflow, "finite-difference step below 1e-10 of the domain extent");
  }
  const Rect& d = chart.domain();
  if (!d.contains(p, 1e-12 * std::max(d.extent(0), d.extent(1)))) {
    throw Error(ErrorCode::OutOfDomain, "point outside chart domain");
  }
  std::map<std::pair<long, long>, Vec3> cache;
  SurfaceJet out;
  for (int total = 0; total <= order; ++total) {
    // Third derivatives use a wider step to contain cancellation error.
    const double scale = total == 3 ? 10.0 : 1.0;
    const double h1 = step_fraction * scale * d.extent(0);
    const double h2 = step_fraction * scale * d.extent(1);
    for (int j = 0; j <= total; ++j) {
      const int i = total - j;
      const auto s1 = stencil_1d(i, p(0), d.x1_min, d.x1_max, h1);
      const auto s2 = stencil_1d(j, p(1), d.x2_min, d.x2_max, h2);
      Vec3 acc = Vec3::Zero();
      for (const auto& a : s1) {
        for (const auto& b : s2) {
          const long key1 = static_cast<long>(a.k) * static_cast<long>(scale);
          const long key2 = static_cast<long>(b.k) * static_cast<long>(scale);
          auto it = cache.find({key1, key2});
          if (it == cache.end()) {
            const Vec2 q(p(0) + a.k * h1, p(1) + b.k * h2);
            it = cache.emplace(std::make_pair(key1, key2), chart.position(q)).first;
          }
          acc += a.w * b.w * it->second;
        }
      }
      double fact = 1.0;
      for (int k = 2; k <= i; ++k) fact *= k;
      for (int k = 2; k <= j; ++k) fact *= k;
      for (int c = 0; c < 3; ++c) out[c].set_coeff(i, j, acc(c) / fact);
    }
  }
  return out;
}

GeometryFrame evaluate_frame(const SurfaceChart& chart, const Vec2& p) {
  const Rect& d = chart.domain();
  if (!d.contains(p, 1e-12 * std::max(d.extent(0), d.extent(1)))) {
    throw Error(ErrorCode::OutOfDomain, "point outside chart domain");
  }
  return frame_from_jet(chart.jet(p), p, chart.metric_floor());
}

GeometryFrame frame_from_jet(const SurfaceJet& jet, const Vec2& p, double metric_floor) {
  GeometryFrame f;
  f.point = p;
  const Vec3T<J3> y = component_jets(jet);
  const std::array<Vec3T<J3>, 2> a = {partial_of(y, 0), partial_of(y, 1)};

  // Valid orders: a to 2, n0 and contravariant basis to 2, I to 2, II and L to 1.
  const Vec3T<J3> c = cross(a[0], a[1]);
  const J3 det_i = dot(c, c);
  if (!(det_i.value() >= metric_floor) || !(det_i.value() > 0.0)) {
    throw Error(ErrorCode::DegenerateMetric, "det I below the metric floor");
  }
  const J3 s = sqrt(det_i);
  const J3 inv_s = reciprocal(s);
  const Vec3T<J3> n = inv_s * c;
  const std::array<Vec3T<J3>, 2> up = {inv_s * cross(a[1], n), inv_s * cross(n, a[0])};

  std::array<std::array<J3, 2>, 2> ij, iij;
  for (int al = 0; al < 2; ++al) {
    for (int be = 0; be < 2; ++be) {
      ij[al][be] = dot(a[al], a[be]);
      iij[al][be] = dot(partial_of(a[be], al), n);
    }
  }
  const J3 det_ij = ij[0][0] * ij[1][1] - ij[0][1] * ij[1][0];
  const J3 inv_det = reciprocal(det_ij);
  const std::array<std::array<J3, 2>, 2> inv_i = {
      std::array<J3, 2>{inv_det * ij[1][1], -(inv_det * ij[0][1])},
      std::array<J3, 2>{-(inv_det * ij[1][0]), inv_det * ij[0][0]}};
  std::array<std::array<J3, 2>, 2> lj;
  for (int al = 0; al < 2; ++al) {
    for (int be = 0; be < 2; ++be) lj[al][be] = inv_i[al][0] * iij[0][be] + inv_i[al][1] * iij[1][be];
  }

  f.y0 = value_of(y);
  for (int al = 0; al < 2; ++al) f.grad_y0.col(al) = value_of(a[al]);
  f.n0 = value_of(n);
  f.det_grad_theta = s.value();
  f.grad_theta.leftCols<2>() = f.grad_y0;
  f.grad_theta.col(2) = f.n0;
  for (int al = 0; al < 2; ++al) f.grad_theta_inv.row(al) = value_of(up[al]).transpose();
  f.grad_theta_inv.row(2) = f.n0.transpose();

  const int e[2][2] = {{1, 0}, {0, 1}};
  for (int al = 0; al < 2; ++al) {
    for (int be = 0; be < 2; ++be) {
      f.I(al, be) = ij[al][be].value();
      f.II(al, be) = iij[al][be].value();
      f.L(al, be) = lj[al][be].value();
      f.d_grad_y0[be].col(al) = derivative_of(y, e[al][0] + e[be][0], e[al][1] + e[be][1]);
      for (int ga = 0; ga < 2; ++ga) {
        f.ddd_y0[al][be][ga] =
            derivative_of(y, e[al][0] + e[be][0] + e[ga][0], e[al][1] + e[be][1] + e[ga][1]);
      }
    }
  }
  for (int be = 0; be < 2; ++be) {
    f.d_n0[be] = derivative_of(n, e[be][0], e[be][1]);
    f.d_det[be] = s.derivative(e[be][0], e[be][1]);
    for (int al = 0; al < 2; ++al) {
      f.dd_n0[al][be] = derivative_of(n, e[al][0] + e[be][0], e[al][1] + e[be][1]);
      f.d_contra[be][al] = derivative_of(up[al], e[be][0], e[be][1]);
    }
    for (int r = 0; r < 2; ++r) {
      for (int q = 0; q < 2; ++q) f.d_L[be](r, q) = lj[r][q].derivative(e[be][0], e[be][1]);
    }
  }
  for (int ga = 0; ga < 2; ++ga) {
    for (int al = 0; al < 2; ++al) {
      for (int be = 0; be < 2; ++be) f.gamma[ga](al, be) = f.contra(ga).dot(f.dd_y0(al, be));
    }
  }
  f.H = 0.5 * f.L.trace();
  f.K = f.L.determinant();
  f.C << 0.0, f.det_grad_theta, -f.det_grad_theta, 0.0;
  return f;
}

LiftedTensors lifted_tensors(const GeometryFrame& f) {
  Mat3 grad_n = Mat3::Zero();
  grad_n.col(0) = f.d_n0[0];
  grad_n.col(1) = f.d_n0[1];
  grad_n.col(2) = f.n0;
  LiftedTensors t;
  t.I_hat = f.grad_theta.transpose() * f.grad_theta;
  t.II_hat = -f.grad_theta.transpose() * grad_n;
  t.L_flat = flat(f.L);
  return t;
}

Mat3 tensor_A(const GeometryFrame& f) {
  Mat3 g = Mat3::Zero();
  g.leftCols<2>() = f.grad_y0;
  return g * f.grad_theta_inv;
}

Mat3 tensor_B(const GeometryFrame& f) {
  Mat3 g = Mat3::Zero();
  g.col(0) = f.d_n0[0];
  g.col(1) = f.d_n0[1];
  return -g * f.grad_theta_inv;
}

Mat3 tensor_C(const GeometryFrame& f) {
  Mat3 j = Mat3::Zero();
  j(0, 1) = 1.0;
  j(1, 0) = -1.0;
  return f.det_grad_theta * f.grad_theta_inv.transpose() * j * f.grad_theta_inv;
}

Mat3 lift(const GeometryFrame& f, const Mat2& m) {
  return f.grad_theta_inv.transpose() * flat(m) * f.grad_theta_inv;
}

std::array<double, 2> principal_curvatures(const GeometryFrame& f) {
  const double disc = std::sqrt(std::max(f.H * f.H - f.K, 0.0));
  return {f.H - disc, f.H + disc};
}

double max_abs_curvature(std::span<const GeometryFrame> frames) {
  double kmax = 0.0;
  for (const auto& f : frames) {
    const auto k = principal_curvatures(f);
    kmax = std::max({kmax, std::abs(k[0]), std::abs(k[1])});
  }
  return kmax;
}

double weingarten_residual(const GeometryFrame& f) {
  double r = 0.0;
  for (int al = 0; al < 2; ++al) {
    Vec3 v = f.d_n0[al];
    for (int be = 0; be < 2; ++be) v += f.L(be, al) * f.tangent(be);
    r = std::max(r, v.norm());
  }
  return r;
}

double gauss_residual(const GeometryFrame& f) {
  double r = 0.0;
  for (int al = 0; al < 2; ++al) {
    for (int be = 0; be < 2; ++be) {
      Vec3 v = f.dd_y0(al, be) - f.II(al, be) * f.n0;
      for (int ga = 0; ga < 2; ++ga) v -= f.gamma[ga](al, be) * f.tangent(ga);
      r = std::max(r, v.norm());
    }
  }
  return r;
}

}  // namespace cosshell
