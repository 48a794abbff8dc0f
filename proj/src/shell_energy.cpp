#include "cosshell/shell_energy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cosshell/csv.hpp"
#include "cosshell/error.hpp"

namespace cosshell {

void MaterialParams::validate() const {
  if (!(mu > 0.0)) throw Error(ErrorCode::InvalidMaterial, "material violates mu>0");
  if (!(2.0 * lambda + mu > 0.0)) throw Error(ErrorCode::InvalidMaterial, "material violates 2*lambda+mu>0");
  if (!(Lc >= 0.0)) throw Error(ErrorCode::InvalidMaterial, "material violates Lc>=0");
  if (!(b1 >= 0.0 && b2 >= 0.0 && b3 >= 0.0)) {
    throw Error(ErrorCode::InvalidMaterial, "material violates b1,b2,b3>=0");
  }
}

std::string to_string(ModelKind m) {
  switch (m) {
    case ModelKind::Koiter: return "koiter";
    case ModelKind::CosseratH3: return "cosserat-h3";
    case ModelKind::CosseratH5: return "cosserat-h5";
    case ModelKind::ModifiedH3: return "modified-h3";
    case ModelKind::ModifiedH5: return "modified-h5";
  }
  return "unknown";
}

ModelKind parse_model(const std::string& name) {
  for (ModelKind m : {ModelKind::Koiter, ModelKind::CosseratH3, ModelKind::CosseratH5,
                      ModelKind::ModifiedH3, ModelKind::ModifiedH5}) {
    if (to_string(m) == name) return m;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown model '" + name + "'");
}

void ModelConfig::validate() const {
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidConfig, "thickness h must be positive");
  material.validate();
}

EnergyBreakdown& EnergyBreakdown::operator+=(const EnergyBreakdown& o) {
  membrane += o.membrane;
  bending += o.bending;
  coupling_H += o.coupling_H;
  coupling_L += o.coupling_L;
  mp_h5 += o.mp_h5;
  curv_h += o.curv_h;
  curv_h3 += o.curv_h3;
  curv_h5 += o.curv_h5;
  load_work += o.load_work;
  return *this;
}

EnergyBreakdown EnergyBreakdown::scaled(double s) const {
  EnergyBreakdown e = *this;
  e.membrane *= s;
  e.bending *= s;
  e.coupling_H *= s;
  e.coupling_L *= s;
  e.mp_h5 *= s;
  e.curv_h *= s;
  e.curv_h3 *= s;
  e.curv_h5 *= s;
  e.load_work *= s;
  return e;
}

std::string EnergyBreakdown::csv_header() {
  return "membrane,bending,coupling_H,coupling_L,mp_h5,curv_h,curv_h3,curv_h5,internal,load_work,total\n";
}

std::string EnergyBreakdown::csv_row() const {
  return csv_line(std::vector<double>{membrane, bending, coupling_H, coupling_L, mp_h5, curv_h, curv_h3,
                                      curv_h5, internal(), load_work, total()});
}

std::string EnergyBreakdown::describe() const {
  std::ostringstream os;
  auto line = [&](const char* name, double v) { os << "  " << name << " = " << format_number(v) << "\n"; };
  line("membrane", membrane);
  line("bending", bending);
  line("coupling_H", coupling_H);
  line("coupling_L", coupling_L);
  line("mp_h5", mp_h5);
  line("curv_h", curv_h);
  line("curv_h3", curv_h3);
  line("curv_h5", curv_h5);
  line("internal", internal());
  line("load_work", load_work);
  line("total", total());
  return os.str();
}

namespace {

double shell_trace_coeff(const MaterialParams& m) { return m.lambda * m.mu / (m.lambda + 2.0 * m.mu); }

}  // namespace

double w_shell(const Mat3& S, const MaterialParams& m) {
  const double tr = S.trace();
  return m.mu * S.squaredNorm() + shell_trace_coeff(m) * tr * tr;
}

double w_shell_pair(const Mat3& S, const Mat3& T, const MaterialParams& m) {
  return m.mu * inner(S, T) + shell_trace_coeff(m) * S.trace() * T.trace();
}

double w_mp(const Mat3& S, const MaterialParams& m) {
  const double tr = S.trace();
  return m.mu * S.squaredNorm() + 0.5 * m.lambda * tr * tr;
}

double w_curv(const Mat3& X, const MaterialParams& m) {
  const double tr = X.trace();
  return m.mu * m.Lc * m.Lc *
         (m.b1 * dev(sym(X)).squaredNorm() + m.b2 * skew(X).squaredNorm() + m.b3 * tr * tr);
}

double koiter_energy_density(const GeometryFrame& f, const Mat2& G, const Mat2& R, double h,
                             const MaterialParams& m) {
  return h * w_shell(lift(f, G), m) + h * h * h / 12.0 * w_shell(lift(f, R), m);
}

EnergyBreakdown cosserat_energy_density(const GeometryFrame& f, const StrainState& s,
                                        const ModelConfig& cfg) {
  const MaterialParams& m = cfg.material;
  const double h = cfg.h;
  const double h3 = h * h * h;
  const double h5 = h3 * h * h;
  const bool modified = cfg.model == ModelKind::ModifiedH3 || cfg.model == ModelKind::ModifiedH5;
  const bool fifth = cfg.model == ModelKind::CosseratH5 || cfg.model == ModelKind::ModifiedH5;
  const double K = f.K;

  const Mat3& E = s.E;
  const Mat3 X2 = modified ? sym(s.EB_plus_CK) : s.EB_plus_CK;
  const Mat3 X3 = modified ? sym(s.EB2_plus_CKB) : s.EB2_plus_CKB;

  EnergyBreakdown e;
  if (cfg.leading_order_only) {
    e.membrane = h * w_shell(E, m);
    e.curv_h = h * w_curv(s.K, m);
    return e;
  }
  e.membrane = (h + K * h3 / 12.0) * w_shell(E, m);
  e.coupling_H = -(h3 / 3.0) * f.H * w_shell_pair(E, X2, m);
  e.coupling_L = (h3 / 6.0) * w_shell_pair(E, X3, m);
  e.curv_h = (h - K * h3 / 12.0) * w_curv(s.K, m);
  if (fifth) {
    e.bending = (h3 / 12.0 - K * h5 / 80.0) * w_shell(X2, m);
    e.mp_h5 = (h5 / 80.0) * w_mp(X3, m);
    e.curv_h3 = (h3 / 12.0 - K * h5 / 80.0) * w_curv(s.KB, m);
    e.curv_h5 = (h5 / 80.0) * w_curv(s.KB2, m);
  } else {
    e.bending = (h3 / 12.0) * w_shell(X2, m);
    e.curv_h3 = (h3 / 12.0) * w_curv(s.KB, m);
  }
  return e;
}

EnergyBreakdown energy_density(const GeometryFrame& f, const StrainState& s, const ModelConfig& cfg) {
  if (cfg.model != ModelKind::Koiter) return cosserat_energy_density(f, s, cfg);
  EnergyBreakdown e;
  const double h = cfg.h;
  e.membrane = h * w_shell(s.E, cfg.material);
  if (!cfg.leading_order_only) e.bending = h * h * h / 12.0 * w_shell(lift(f, s.R_koiter), cfg.material);
  return e;
}

namespace {

// Orthonormal basis of symmetric 3x3 matrices.
std::array<Mat3, 6> sym_basis() {
  std::array<Mat3, 6> b;
  int k = 0;
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      Mat3 e = Mat3::Zero();
      if (i == j) {
        e(i, i) = 1.0;
      } else {
        e(i, j) = e(j, i) = 1.0 / std::sqrt(2.0);
      }
      b[k++] = e;
    }
  }
  return b;
}

template <int N, class Basis, class Form>
Eigen::Matrix<double, N, 1> form_eigenvalues(const Basis& basis, Form form) {
  Eigen::Matrix<double, N, N> a;
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      a(i, j) = 0.25 * (form(basis[i] + basis[j]) - form(basis[i] - basis[j]));
    }
  }
  return Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, N, N>>(a).eigenvalues();
}

}  // namespace

FormBounds quadratic_form_bounds(const MaterialParams& m) {
  std::array<Mat3, 9> full;
  for (int k = 0; k < 9; ++k) {
    full[k] = Mat3::Zero();
    full[k](k / 3, k % 3) = 1.0;
  }
  const auto e1 = form_eigenvalues<6>(sym_basis(), [&](const Mat3& s) { return w_shell(s, m); });
  const auto e2 = form_eigenvalues<9>(full, [&](const Mat3& x) { return w_curv(x, m); });
  return {e1.minCoeff(), e1.maxCoeff(), e2.minCoeff(), e2.maxCoeff()};
}

FormBounds quadratic_form_bounds_closed(const MaterialParams& m) {
  const double a = m.mu;
  const double b = m.mu + 3.0 * shell_trace_coeff(m);
  const double s = m.mu * m.Lc * m.Lc;
  return {std::min(a, b), std::max(a, b), s * std::min({m.b1, m.b2, 3.0 * m.b3}),
          s * std::max({m.b1, m.b2, 3.0 * m.b3})};
}

double alpha_star() { return std::sqrt(2.0 / 3.0 * (29.0 - std::sqrt(761.0))); }

ThicknessReportH5 thickness_check_h5(double kappa_max, double h) {
  ThicknessReportH5 r;
  r.kappa_max = kappa_max;
  r.h_kappa = h * kappa_max;
  r.coercive = r.h_kappa < alpha_star();
  r.kinematic = r.h_kappa < 2.0;
  return r;
}

ThicknessReportH5 thickness_check_h5(std::span<const GeometryFrame> frames, double h) {
  return thickness_check_h5(max_abs_curvature(frames), h);
}

ThicknessReportH3 thickness_check_h3(double kappa_max, double h, const MaterialParams& m) {
  const FormBounds fb = quadratic_form_bounds(m);
  ThicknessReportH3 r;
  r.kappa_max = kappa_max;
  r.h_kappa = h * kappa_max;
  // Condition (i) admits any alpha > h kappa; its right side decreases in alpha on (0, 2),
  // so the supremum over admissible alpha is the limit alpha -> h kappa.
  if (r.h_kappa == 0.0) {
    r.cond_i = true;
  } else if (r.h_kappa < 2.0) {
    const double a2 = r.h_kappa * r.h_kappa;
    const double bound = (5.0 - 2.0 * std::sqrt(6.0)) * (a2 - 12.0) * (a2 - 12.0) / (4.0 * a2) * fb.c2 / fb.C1;
    r.cond_i = h * h < bound;
  }
  r.a_min = std::max(1.0 + std::sqrt(2.0) / 2.0, 0.5 * (1.0 + std::sqrt(1.0 + 3.0 * fb.C1 / fb.c1)));
  r.cond_ii = r.h_kappa * r.a_min < 1.0;
  return r;
}

ThicknessReportH3 thickness_check_h3(std::span<const GeometryFrame> frames, double h,
                                     const MaterialParams& m) {
  return thickness_check_h3(max_abs_curvature(frames), h, m);
}

MetricBendingEstimate metric_bending_estimate(const GeometryFrame& f, const Mat2& G, const Mat2& R) {
  const Mat2 gl2 = 2.0 * G * f.L;
  const double l2 = (2.0 * f.L).squaredNorm();
  MetricBendingEstimate e;
  e.c = l2 == 0.0 ? 1.0 : 0.5 * std::min(1.0, 1.0 / l2);
  e.lhs = G.squaredNorm() + (R - gl2).squaredNorm();
  e.rhs = e.c * (G.squaredNorm() + R.squaredNorm());
  e.rhs_intermediate = e.c * (G.squaredNorm() + gl2.squaredNorm() + (R - gl2).squaredNorm());
  return e;
}

}  // namespace cosshell
