#pragma once

#include <span>
#include <string>

#include "cosshell/kinematics.hpp"
#include "cosshell/surface_geometry.hpp"

namespace cosshell {

struct MaterialParams {
  double mu = 1.0;
  double lambda = 1.0;
  double Lc = 1.0;  // internal length
  double b1 = 1.0;
  double b2 = 1.0;
  double b3 = 1.0;

  // Throws InvalidMaterial unless mu > 0, 2 lambda + mu > 0, Lc >= 0 and b_i >= 0.
  // Lc = 0 and b_i = 0 are allowed so the plate reduction and degenerate probes can run.
  void validate() const;
  double poisson_ratio() const { return lambda / (2.0 * (lambda + mu)); }
};

enum class ModelKind {
  Koiter,
  CosseratH3,    // conditional, O(h^3)
  CosseratH5,    // conditional, O(h^5)
  ModifiedH3,    // symmetrized, O(h^3)
  ModifiedH5,    // symmetrized, O(h^5)
};

std::string to_string(ModelKind m);
// Accepts koiter, cosserat-h3, cosserat-h5, modified-h3, modified-h5.
ModelKind parse_model(const std::string& name);

struct ModelConfig {
  ModelKind model = ModelKind::ModifiedH5;
  double h = 0.1;
  MaterialParams material;
  // Diagnostic probe: keep only the O(h) terms.
  bool leading_order_only = false;

  void validate() const;
};

// Per unit chart area, before the sqrt(det I) weight.
struct EnergyBreakdown {
  double membrane = 0.0;    // (h + K h^3/12) W_shell(E)
  double bending = 0.0;     // W_shell of the bending-like strain
  double coupling_H = 0.0;  // mean-curvature coupling
  double coupling_L = 0.0;  // Weingarten coupling
  double mp_h5 = 0.0;       // (h^5/80) W_mp
  double curv_h = 0.0;      // curvature terms by order in h
  double curv_h3 = 0.0;
  double curv_h5 = 0.0;
  double load_work = 0.0;

  double internal() const {
    return membrane + bending + coupling_H + coupling_L + mp_h5 + curv_h + curv_h3 + curv_h5;
  }
  double total() const { return internal() - load_work; }

  EnergyBreakdown& operator+=(const EnergyBreakdown& o);
  EnergyBreakdown scaled(double s) const;

  static std::string csv_header();
  std::string csv_row() const;
  std::string describe() const;
};

// mu |S|^2 + lambda mu / (lambda + 2 mu) tr(S)^2
double w_shell(const Mat3& S, const MaterialParams& m);
double w_shell_pair(const Mat3& S, const Mat3& T, const MaterialParams& m);
// mu |S|^2 + (lambda / 2) tr(S)^2
double w_mp(const Mat3& S, const MaterialParams& m);
// mu Lc^2 (b1 |dev sym X|^2 + b2 |skew X|^2 + b3 tr(X)^2)
double w_curv(const Mat3& X, const MaterialParams& m);

double koiter_energy_density(const GeometryFrame& f, const Mat2& G, const Mat2& R, double h,
                             const MaterialParams& m);
EnergyBreakdown cosserat_energy_density(const GeometryFrame& f, const StrainState& s,
                                        const ModelConfig& cfg);
// Dispatches on cfg.model.
EnergyBreakdown energy_density(const GeometryFrame& f, const StrainState& s, const ModelConfig& cfg);

// Extremal Rayleigh quotients of the quadratic forms, from their matrices.
struct FormBounds {
  double c1 = 0.0;  // min W_shell(S) / |S|^2 over symmetric S
  double C1 = 0.0;  // max of the same
  double c2 = 0.0;  // min W_curv(X) / |X|^2 over all X
  double C2 = 0.0;
};
FormBounds quadratic_form_bounds(const MaterialParams& m);
// Closed forms of the same constants.
FormBounds quadratic_form_bounds_closed(const MaterialParams& m);

// Constant alpha* = sqrt(2/3 (29 - sqrt 761)).
double alpha_star();

struct ThicknessReportH5 {
  double kappa_max = 0.0;
  double h_kappa = 0.0;
  bool coercive = false;   // h kappa < alpha*
  bool kinematic = false;  // h kappa < 2
  bool pass() const { return coercive && kinematic; }
};
ThicknessReportH5 thickness_check_h5(double kappa_max, double h);
ThicknessReportH5 thickness_check_h5(std::span<const GeometryFrame> frames, double h);

struct ThicknessReportH3 {
  double kappa_max = 0.0;
  double h_kappa = 0.0;
  bool cond_i = false;   // optimal-alpha form of the first sufficient condition
  bool cond_ii = false;  // h kappa < 1 / a_min
  double a_min = 0.0;
  bool pass() const { return cond_i || cond_ii; }
};
ThicknessReportH3 thickness_check_h3(double kappa_max, double h, const MaterialParams& m);
ThicknessReportH3 thickness_check_h3(std::span<const GeometryFrame> frames, double h,
                                     const MaterialParams& m);

// |G|^2 + |R - 2 G L|^2 >= c (|G|^2 + |R|^2) with c = min{1, 1/|2L|^2} / 2.
struct MetricBendingEstimate {
  double lhs = 0.0;
  double rhs = 0.0;  // c (|G|^2 + |R|^2)
  double c = 0.0;
  // c (|G|^2 + |2 G L|^2 + |R - 2 G L|^2), the intermediate bound.
  double rhs_intermediate = 0.0;
  bool holds() const { return lhs >= rhs * (1.0 - 1e-12); }
};
MetricBendingEstimate metric_bending_estimate(const GeometryFrame& f, const Mat2& G, const Mat2& R);

}  // namespace cosshell
