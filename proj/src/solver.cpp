#include "cosshell/solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "cosshell/csv.hpp"
#include "cosshell/error.hpp"

namespace cosshell {

DeadLoad DeadLoad::uniform(const Grid& grid, const Vec3& f) { return {std::vector<Vec3>(grid.size(), f)}; }

DeadLoad DeadLoad::normal_pressure(const std::vector<GeometryFrame>& frames, double p) {
  DeadLoad d;
  d.nodal.reserve(frames.size());
  for (const auto& f : frames) d.nodal.push_back(p * f.n0);
  return d;
}

DeadLoad DeadLoad::manufactured(const Grid& grid, const Vec3& f) {
  DeadLoad d;
  d.nodal.reserve(grid.size());
  const Rect& r = grid.domain();
  for (int i = 0; i < grid.n1(); ++i) {
    for (int j = 0; j < grid.n2(); ++j) {
      const Vec2 p = grid.point(i, j);
      const double s = std::sin(M_PI * (p(0) - r.x1_min) / r.extent(0)) *
                       std::sin(M_PI * (p(1) - r.x2_min) / r.extent(1));
      d.nodal.push_back(s * f);
    }
  }
  return d;
}

DeadLoad DeadLoad::from_csv(const std::string& path, const Grid& grid) {
  const CsvTable t = read_csv(path);
  const std::size_t ci = t.column("i"), cj = t.column("j");
  const std::size_t c1 = t.column("f1"), c2 = t.column("f2"), c3 = t.column("f3");
  DeadLoad d{std::vector<Vec3>(grid.size(), Vec3::Zero())};
  std::vector<bool> seen(grid.size(), false);
  for (const auto& row : t.rows) {
    const int i = static_cast<int>(row[ci]);
    const int j = static_cast<int>(row[cj]);
    if (i < 0 || j < 0 || i >= grid.n1() || j >= grid.n2()) {
      throw Error(ErrorCode::InvalidConfig, "load node outside grid in " + path);
    }
    d.nodal[grid.node(i, j)] = Vec3(row[c1], row[c2], row[c3]);
    seen[grid.node(i, j)] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw Error(ErrorCode::InvalidConfig, "load table " + path + " does not cover the grid");
  }
  return d;
}

Eigen::Matrix<double, 15, 15> density_matrix(const GeometryFrame& f, const ModelConfig& cfg) {
  std::array<StrainState, 15> basis;
  for (int k = 0; k < 15; ++k) {
    LocalDisplacement u;
    const int slot = k / 3;
    const Vec3 e = Vec3::Unit(k % 3);
    switch (slot) {
      case 0: u.d[0] = e; break;
      case 1: u.d[1] = e; break;
      case 2: u.dd[0][0] = e; break;
      case 3: u.dd[0][1] = u.dd[1][0] = e; break;
      default: u.dd[1][1] = e; break;
    }
    basis[k] = compute_strain_state(f, u);
  }
  auto density = [&](const StrainState& s) { return energy_density(f, s, cfg).internal(); };
  Eigen::Matrix<double, 15, 15> q;
  for (int i = 0; i < 15; ++i) q(i, i) = density(basis[i]);
  for (int i = 0; i < 15; ++i) {
    for (int j = i + 1; j < 15; ++j) {
      StrainState s = basis[i];
      s += basis[j];
      q(i, j) = q(j, i) = 0.5 * (density(s) - q(i, i) - q(j, j));
    }
  }
  return q;
}

DiscreteProblem::DiscreteProblem(const SurfaceChart& chart, const ModelConfig& cfg, const Grid& grid,
                                 const DeadLoad& load)
    : grid_(grid),
      cfg_(cfg),
      frames_(evaluate_frames(chart, grid)),
      stencil_(grid_, frames_, BoundaryTreatment::Clamped),
      dof_of_node_(grid.size(), -1) {
  cfg_.validate();
  if (load.nodal.size() != grid.size()) throw Error(ErrorCode::InvalidConfig, "load does not match grid");
  load_ = load.nodal;

  coercivity_.h5 = thickness_check_h5(frames_, cfg_.h);
  coercivity_.h3 = thickness_check_h3(frames_, cfg_.h, cfg_.material);
  coercivity_.forms = quadratic_form_bounds(cfg_.material);

  for (int i = 0; i < grid.n1(); ++i) {
    for (int j = 0; j < grid.n2(); ++j) {
      if (!grid.on_boundary(i, j)) {
        dof_of_node_[grid.node(i, j)] = static_cast<long>(dof_count_);
        dof_count_ += 3;
      }
    }
  }

  rhs_ = Vector::Zero(static_cast<Eigen::Index>(dof_count_));
  diagonal_ = Vector::Zero(static_cast<Eigen::Index>(dof_count_));
  weights_.resize(grid.size());
  blocks_.resize(grid.size());
  for (int i = 0; i < grid.n1(); ++i) {
    for (int j = 0; j < grid.n2(); ++j) {
      const std::size_t n = grid.node(i, j);
      const double w = grid.weight(i, j) * frames_[n].det_grad_theta;
      weights_[n] = w;
      if (dof_of_node_[n] >= 0) {
        rhs_.segment<3>(dof_of_node_[n]) = w * load_[n];
      }

      NodeBlock& blk = blocks_[n];
      std::map<std::size_t, int> local;  // dof base -> local index
      for (const auto& e : stencil_.at(n)) {
        if (e.slot == 0 || dof_of_node_[e.node] < 0) continue;
        local.emplace(static_cast<std::size_t>(dof_of_node_[e.node]), 0);
      }
      int k = 0;
      for (auto& [dof, idx] : local) {
        idx = k++;
        blk.dofs.push_back(dof);
      }
      Eigen::MatrixXd d = Eigen::MatrixXd::Zero(15, 3 * k);
      for (const auto& e : stencil_.at(n)) {
        if (e.slot == 0 || dof_of_node_[e.node] < 0) continue;
        const int col = 3 * local.at(static_cast<std::size_t>(dof_of_node_[e.node]));
        d.block<3, 3>(3 * (e.slot - 1), col) += e.coeff;
      }
      const Eigen::Matrix<double, 15, 15> q = density_matrix(frames_[n], cfg_);
      blk.stiffness = 2.0 * w * d.transpose() * q * d;
      blk.stiffness = sym(blk.stiffness);
      for (int a = 0; a < k; ++a) {
        for (int c = 0; c < 3; ++c) diagonal_(blk.dofs[a] + c) += blk.stiffness(3 * a + c, 3 * a + c);
      }
    }
  }
}

void DiscreteProblem::apply(const Vector& u, Vector& out) const {
  out.setZero(static_cast<Eigen::Index>(dof_count_));
  Vector local, result;
  for (const NodeBlock& blk : blocks_) {
    const auto m = static_cast<Eigen::Index>(blk.dofs.size());
    if (m == 0) continue;
    local.resize(3 * m);
    for (Eigen::Index a = 0; a < m; ++a) local.segment<3>(3 * a) = u.segment<3>(blk.dofs[a]);
    result.noalias() = blk.stiffness * local;
    for (Eigen::Index a = 0; a < m; ++a) out.segment<3>(blk.dofs[a]) += result.segment<3>(3 * a);
  }
}

Vector DiscreteProblem::apply(const Vector& u) const {
  Vector out;
  apply(u, out);
  return out;
}

DisplacementField DiscreteProblem::to_field(const Vector& u) const {
  DisplacementField f(grid_);
  for (std::size_t n = 0; n < grid_.size(); ++n) {
    if (dof_of_node_[n] >= 0) f.values()[n] = u.segment<3>(dof_of_node_[n]);
  }
  return f;
}

Vector DiscreteProblem::to_dofs(const DisplacementField& field) const {
  Vector u(static_cast<Eigen::Index>(dof_count_));
  for (std::size_t n = 0; n < grid_.size(); ++n) {
    if (dof_of_node_[n] >= 0) u.segment<3>(dof_of_node_[n]) = field.values()[n];
  }
  return u;
}

EnergyBreakdown DiscreteProblem::energy(const DisplacementField& field) const {
  EnergyBreakdown total;
  for (std::size_t n = 0; n < grid_.size(); ++n) {
    const LocalDisplacement u = stencil_.apply(n, field.values());
    EnergyBreakdown e = energy_density(frames_[n], compute_strain_state(frames_[n], u), cfg_).scaled(weights_[n]);
    e.load_work = weights_[n] * load_[n].dot(field.values()[n]);
    total += e;
  }
  return total;
}

ConstraintSummary DiscreteProblem::constraints(const DisplacementField& field) const {
  ConstraintSummary s;
  for (std::size_t n = 0; n < grid_.size(); ++n) {
    const LocalDisplacement u = stencil_.apply(n, field.values());
    const Mat2 g = change_of_metric(frames_[n], u);
    const Mat2 r_k = koiter_bending(frames_[n], u);
    const ConstraintResiduals r = constraint_residuals(frames_[n], g, r_k);
    s.strain_scale = std::max(s.strain_scale, g.norm() + r_k.norm());
    s.skew_GL_max = std::max(s.skew_GL_max, r.skew_GL);
    s.skew_RL_max = std::max(s.skew_RL_max, r.skew_RL);
    s.skew_GL_mean += r.skew_GL;
    s.skew_RL_mean += r.skew_RL;
  }
  s.skew_GL_mean /= static_cast<double>(grid_.size());
  s.skew_RL_mean /= static_cast<double>(grid_.size());
  return s;
}

DiscreteProblem assemble(const SurfaceChart& chart, const ModelConfig& cfg, const Grid& grid,
                         const DeadLoad& load) {
  return DiscreteProblem(chart, cfg, grid, load);
}

CgResult conjugate_gradient(const std::function<void(const Vector&, Vector&)>& apply, const Vector& b,
                            const Vector& diagonal, double tol, int max_iter, const Vector* x0) {
  CgResult res;
  const double bnorm = b.norm();
  res.x = x0 ? *x0 : Vector::Zero(b.size());
  if (bnorm == 0.0) {
    res.x.setZero();
    res.converged = true;
    return res;
  }
  const Vector inv_diag = diagonal.unaryExpr([](double d) { return d > 0.0 ? 1.0 / d : 1.0; });
  Vector r(b.size()), ap(b.size());
  apply(res.x, ap);
  r = b - ap;
  Vector z = inv_diag.cwiseProduct(r);
  Vector p = z;
  double rz = r.dot(z);
  res.relative_residual = r.norm() / bnorm;
  while (res.iterations < max_iter) {
    if (res.relative_residual <= tol) {
      // Confirm with the true residual; restart from it when the recursion has drifted.
      apply(res.x, ap);
      r = b - ap;
      res.relative_residual = r.norm() / bnorm;
      if (res.relative_residual <= tol) break;
      z = inv_diag.cwiseProduct(r);
      p = z;
      rz = r.dot(z);
    }
    apply(p, ap);
    const double pap = p.dot(ap);
    if (!(pap > 0.0)) break;  // breakdown: operator not positive on p
    const double alpha = rz / pap;
    res.x += alpha * p;
    r -= alpha * ap;
    ++res.iterations;
    // Refresh the recursive residual periodically to avoid drift.
    if (res.iterations % 200 == 0) {
      apply(res.x, ap);
      r = b - ap;
    }
    res.relative_residual = r.norm() / bnorm;
    z = inv_diag.cwiseProduct(r);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  // Report the true residual.
  apply(res.x, ap);
  res.relative_residual = (b - ap).norm() / bnorm;
  res.converged = res.relative_residual <= tol;
  return res;
}

namespace {

std::string coercivity_summary(const CoercivityReport& c) {
  std::ostringstream os;
  os << "h*max|kappa| = " << format_number(c.h5.h_kappa) << ", O(h5) check "
     << (c.h5.pass() ? "PASS" : "FAIL") << ", O(h3) check " << (c.h3.pass() ? "PASS" : "FAIL");
  return os.str();
}

}  // namespace

SolveResult solve_cg(const DiscreteProblem& problem, double tol, int max_iter, const Vector* x0) {
  if (max_iter <= 0) max_iter = static_cast<int>(20 * problem.dof_count());
  const CgResult cg = conjugate_gradient([&](const Vector& u, Vector& out) { problem.apply(u, out); },
                                         problem.rhs(), problem.diagonal(), tol, max_iter, x0);
  if (!cg.converged) {
    throw Error(ErrorCode::NoConvergence,
                "conjugate gradients stopped at relative residual " + format_number(cg.relative_residual) +
                    " after " + std::to_string(cg.iterations) + " iterations; " +
                    coercivity_summary(problem.coercivity()));
  }
  SolveResult s{problem.to_field(cg.x), cg.x, cg.iterations, cg.relative_residual, {}, {}, problem.coercivity()};
  s.energy = problem.energy(s.v);
  s.constraints = problem.constraints(s.v);
  return s;
}

namespace {

// Largest eigenvalue of the Lanczos tridiagonal matrix.
double ritz_extreme(const std::vector<double>& alpha, const std::vector<double>& beta, bool largest) {
  const auto m = static_cast<Eigen::Index>(alpha.size());
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    t(k, k) = alpha[k];
    if (k + 1 < m) t(k, k + 1) = t(k + 1, k) = beta[k];
  }
  const Vector ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(t, Eigen::EigenvaluesOnly).eigenvalues();
  return largest ? ev.maxCoeff() : ev.minCoeff();
}

struct LanczosRun {
  double extreme = 0.0;
  int steps = 0;
  bool converged = false;
  bool failed = false;
};

LanczosRun lanczos(const std::function<bool(const Vector&, Vector&)>& op, Eigen::Index n, int iters,
                   bool largest) {
  std::mt19937_64 rng(20240611);
  std::normal_distribution<double> g;
  Vector q(n);
  for (Eigen::Index k = 0; k < n; ++k) q(k) = g(rng);
  q.normalize();
  std::vector<Vector> basis{q};
  std::vector<double> alpha, beta;
  LanczosRun run;
  double prev = 0.0;
  Vector w(n);
  for (int k = 0; k < iters && k < n; ++k) {
    if (!op(basis.back(), w)) {
      run.failed = true;
      break;
    }
    alpha.push_back(basis.back().dot(w));
    // Full reorthogonalization, twice.
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vector& b : basis) w -= b.dot(w) * b;
    }
    run.extreme = ritz_extreme(alpha, beta, largest);
    run.steps = k + 1;
    if (k > 0 && std::abs(run.extreme - prev) <= 1e-6 * std::abs(run.extreme)) {
      run.converged = true;
      break;
    }
    prev = run.extreme;
    const double bnorm = w.norm();
    if (bnorm <= 1e-14 * std::abs(run.extreme)) {
      run.converged = true;  // invariant subspace found
      break;
    }
    beta.push_back(bnorm);
    basis.push_back(w / bnorm);
  }
  return run;
}

}  // namespace

EigenEstimate min_eigen_estimate(const DiscreteProblem& problem, int iters) {
  const auto n = static_cast<Eigen::Index>(problem.dof_count());
  const int inner_max = static_cast<int>(20 * problem.dof_count());
  // The Cosserat operators stagnate near 1e-10 in double precision; 1e-9 keeps the
  // eigenvalue accurate to far more digits than the sign test needs.
  constexpr double kInnerTol = 1e-9;
  auto inverse = [&](const Vector& x, Vector& y) {
    const CgResult cg = conjugate_gradient([&](const Vector& u, Vector& out) { problem.apply(u, out); }, x,
                                           problem.diagonal(), kInnerTol, inner_max);
    y = cg.x;
    return cg.converged;
  };
  EigenEstimate est;
  const LanczosRun inv = lanczos(inverse, n, iters, true);
  if (!inv.failed && inv.extreme > 0.0) {
    est.value = 1.0 / inv.extreme;
    est.iterations = inv.steps;
    est.converged = inv.converged;
    return est;
  }
  // Inner solves failed: fall back to a Ritz value of A itself, an upper bound on lambda_min.
  auto direct = [&](const Vector& x, Vector& y) {
    problem.apply(x, y);
    return true;
  };
  const LanczosRun dir = lanczos(direct, n, std::max(iters, 200), false);
  est.value = dir.extreme;
  est.iterations = dir.steps;
  est.converged = false;
  est.shift_invert = false;
  return est;
}

}  // namespace cosshell
