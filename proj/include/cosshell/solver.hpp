#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cosshell/displacement.hpp"
#include "cosshell/shell_energy.hpp"
#include "cosshell/surface_geometry.hpp"

namespace cosshell {

using Vector = Eigen::VectorXd;

// Dead load per unit midsurface area, sampled at the grid nodes.
struct DeadLoad {
  std::vector<Vec3> nodal;

  static DeadLoad uniform(const Grid& grid, const Vec3& f);
  // p n0 at each node.
  static DeadLoad normal_pressure(const std::vector<GeometryFrame>& frames, double p);
  // f sin(pi t1) sin(pi t2) in normalized chart coordinates.
  static DeadLoad manufactured(const Grid& grid, const Vec3& f);
  // Header "i,j,f1,f2,f3"; every node present.
  static DeadLoad from_csv(const std::string& path, const Grid& grid);
};

struct ConstraintSummary {
  double skew_GL_max = 0.0;
  double skew_GL_mean = 0.0;
  double skew_RL_max = 0.0;
  double skew_RL_mean = 0.0;
  double strain_scale = 0.0;  // max of |G| + |R_koiter| over nodes
  double relative_max() const {
    return strain_scale > 0.0 ? std::max(skew_GL_max, skew_RL_max) / strain_scale : 0.0;
  }
};

struct CoercivityReport {
  ThicknessReportH5 h5;
  ThicknessReportH3 h3;
  FormBounds forms;
};

// Finite-difference discretization of the selected functional with clamped boundary.
// Unknowns are the Cartesian components at interior nodes, ordered (i, j, component).
class DiscreteProblem {
 public:
  DiscreteProblem(const SurfaceChart& chart, const ModelConfig& cfg, const Grid& grid, const DeadLoad& load);

  std::size_t dof_count() const { return dof_count_; }
  const Grid& grid() const { return grid_; }
  const ModelConfig& config() const { return cfg_; }
  const std::vector<GeometryFrame>& frames() const { return frames_; }
  const StencilOperator& stencil() const { return stencil_; }
  const CoercivityReport& coercivity() const { return coercivity_; }
  const Vector& rhs() const { return rhs_; }
  const Vector& diagonal() const { return diagonal_; }

  // out = A u; u^T A u is twice the internal energy.
  void apply(const Vector& u, Vector& out) const;
  Vector apply(const Vector& u) const;

  DisplacementField to_field(const Vector& u) const;
  // Interior node values; boundary values are ignored.
  Vector to_dofs(const DisplacementField& field) const;

  // Internal energy terms and load work of a clamped field, evaluated by the strain pipeline.
  EnergyBreakdown energy(const DisplacementField& field) const;
  ConstraintSummary constraints(const DisplacementField& field) const;

 private:
  struct NodeBlock {
    std::vector<std::size_t> dofs;  // first dof of each participating node
    Eigen::MatrixXd stiffness;      // 3 dofs.size() square
  };

  Grid grid_;
  ModelConfig cfg_;
  std::vector<GeometryFrame> frames_;
  StencilOperator stencil_;
  std::vector<long> dof_of_node_;  // -1 on the boundary
  std::size_t dof_count_ = 0;
  std::vector<NodeBlock> blocks_;
  std::vector<double> weights_;    // trapezoid weight times sqrt(det I)
  Vector rhs_;
  Vector diagonal_;
  std::vector<Vec3> load_;
  CoercivityReport coercivity_;
};

DiscreteProblem assemble(const SurfaceChart& chart, const ModelConfig& cfg, const Grid& grid,
                         const DeadLoad& load);

// Symmetric 15x15 matrix Q with density(d) = d^T Q d, d = (d1 v, d2 v, d11 v, d12 v, d22 v).
Eigen::Matrix<double, 15, 15> density_matrix(const GeometryFrame& f, const ModelConfig& cfg);

struct CgResult {
  Vector x;
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

// Jacobi-preconditioned conjugate gradients; residual measured as |b - A x| / |b|.
CgResult conjugate_gradient(const std::function<void(const Vector&, Vector&)>& apply, const Vector& b,
                            const Vector& diagonal, double tol, int max_iter, const Vector* x0 = nullptr);

struct SolveResult {
  DisplacementField v;
  Vector dofs;
  int iterations = 0;
  double relative_residual = 0.0;
  EnergyBreakdown energy;
  ConstraintSummary constraints;
  CoercivityReport coercivity;
};

// max_iter <= 0 selects 20 times the dof count. Throws NoConvergence.
SolveResult solve_cg(const DiscreteProblem& problem, double tol = 1e-10, int max_iter = 0,
                     const Vector* x0 = nullptr);

struct EigenEstimate {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  // False when inner solves failed and the value is a plain Ritz bound from above.
  bool shift_invert = true;
};

// Smallest eigenvalue of A by Lanczos on A^{-1} with CG inner solves.
EigenEstimate min_eigen_estimate(const DiscreteProblem& problem, int iters = 30);

}  // namespace cosshell
