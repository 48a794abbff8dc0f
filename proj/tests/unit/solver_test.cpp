#include <cmath>
#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "cosshell/csv.hpp"
#include "cosshell/error.hpp"
#include "cosshell/solver.hpp"
#include "test_support.hpp"

namespace cosshell {
namespace {

Vector random_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vector v(static_cast<Eigen::Index>(n));
  for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = g(rng);
  return v;
}

DiscreteProblem make_problem(const SurfaceChart& c, ModelKind kind, int n, double pressure = 1.0, double h = 0.1) {
  const Grid grid(c.domain(), n, n);
  ModelConfig cfg;
  cfg.model = kind;
  cfg.h = h;
  return DiscreteProblem(c, cfg, grid, DeadLoad::normal_pressure(evaluate_frames(c, grid), pressure));
}

TEST(Grid, RejectsCoarseGrids) {
  try {
    Grid g(Rect{}, 7, 9);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GridTooCoarse);
  }
}

TEST(Stencils, ExactForQuadraticFields) {
  const SurfaceChart c = SurfaceChart::catalog("plane", {});
  const Grid grid(c.domain(), 9, 11);
  const auto frames = evaluate_frames(c, grid);
  const QuadraticField q(Vec3(1, 2, 3), {Vec3(0.5, -1, 2), Vec3(1, 1, -1)},
                         {{{Vec3(1, 0, 2), Vec3(-1, 3, 0.5)}, {Vec3(-1, 3, 0.5), Vec3(2, -2, 1)}}});
  const DisplacementField field = sample(q, grid, frames);
  const StencilOperator one_sided(grid, frames, BoundaryTreatment::OneSided);
  for (int i = 0; i < grid.n1(); ++i) {
    for (int j = 0; j < grid.n2(); ++j) {
      const LocalDisplacement exact = q.evaluate(frames[grid.node(i, j)]);
      const LocalDisplacement fd = field.local(one_sided, i, j);
      for (int a = 0; a < 2; ++a) {
        EXPECT_NEAR((fd.d[a] - exact.d[a]).norm(), 0.0, 1e-10);
        for (int b = 0; b < 2; ++b) EXPECT_NEAR((fd.dd[a][b] - exact.dd[a][b]).norm(), 0.0, 1e-8);
      }
    }
  }
}

TEST(Stencils, ClampedGhostsConvergeForClampedFields) {
  // Interior nodes never touch a ghost and are second order. On boundary nodes the mirror is
  // first order for the normal part and says nothing about tangential normal curvature.
  const SurfaceChart c = SurfaceChart::catalog("cylinder", {2.0});
  const ClampedField field(c.domain(), 5, 3, 1.0);
  double prev_interior = 0.0, prev_normal = 0.0;
  for (int n : {17, 33, 65}) {
    const Grid grid(c.domain(), n, n);
    const auto frames = evaluate_frames(c, grid);
    const StencilOperator st(grid, frames, BoundaryTreatment::Clamped);
    const DisplacementField s = sample(field, grid, frames);
    double interior = 0.0, normal = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const GeometryFrame& f = frames[grid.node(i, j)];
        const LocalDisplacement ex = field.evaluate(f);
        const LocalDisplacement fd = s.local(st, i, j);
        for (int a = 0; a < 2; ++a) {
          for (int b = 0; b < 2; ++b) {
            const Vec3 e = fd.dd[a][b] - ex.dd[a][b];
            if (grid.on_boundary(i, j)) {
              normal = std::max(normal, std::abs(f.n0.dot(e)));
            } else {
              interior = std::max(interior, e.norm());
            }
          }
        }
        EXPECT_LT((fd.v - ex.v).norm(), 1e-12);
      }
    }
    if (prev_interior > 0.0) {
      EXPECT_GT(prev_interior / interior, 3.0) << n;
      EXPECT_GT(prev_normal / normal, 1.6) << n;
    }
    prev_interior = interior;
    prev_normal = normal;
  }
}

TEST(DisplacementField, CsvRoundTrip) {
  const SurfaceChart c = SurfaceChart::catalog("sphere", {1.0});
  const Grid grid(c.domain(), 9, 9);
  const DisplacementField f = sample(TrigField(4, 3, 1.0, 2.0), grid, evaluate_frames(c, grid));
  const auto dir = std::filesystem::temp_directory_path() / "cosshell_field_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "v.csv").string();
  write_text_file(path, f.to_csv());
  const DisplacementField g = DisplacementField::from_csv(path, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) EXPECT_EQ(f.values()[k], g.values()[k]);
}

TEST(DiscreteProblem, OperatorIsSymmetric) {
  std::mt19937_64 rng(31);
  for (ModelKind k : {ModelKind::Koiter, ModelKind::CosseratH5, ModelKind::ModifiedH5}) {
    const DiscreteProblem p = make_problem(SurfaceChart::catalog("cylinder", {2.0}), k, 11);
    for (int t = 0; t < 5; ++t) {
      const Vector u = random_vector(p.dof_count(), rng), w = random_vector(p.dof_count(), rng);
      const double a = w.dot(p.apply(u)), b = u.dot(p.apply(w));
      EXPECT_NEAR(a, b, 1e-12 * (std::abs(a) + std::abs(b))) << to_string(k);
    }
  }
}

TEST(DiscreteProblem, QuadraticFormIsTwiceTheEnergy) {
  std::mt19937_64 rng(32);
  for (const auto& c : testing::analytic_charts()) {
    for (ModelKind k : {ModelKind::Koiter, ModelKind::CosseratH3, ModelKind::CosseratH5, ModelKind::ModifiedH3,
                        ModelKind::ModifiedH5}) {
      const DiscreteProblem p = make_problem(c, k, 9);
      for (int t = 0; t < 4; ++t) {
        const Vector u = random_vector(p.dof_count(), rng);
        const double b = u.dot(p.apply(u));
        const double e = p.energy(p.to_field(u)).internal();
        EXPECT_NEAR(b, 2 * e, 1e-10 * std::abs(b)) << c.name() << " " << to_string(k);
      }
    }
  }
}

TEST(DiscreteProblem, TwentyRandomFieldsOnTheCylinder) {
  std::mt19937_64 rng(33);
  const DiscreteProblem p = make_problem(SurfaceChart::catalog("cylinder", {2.0}), ModelKind::ModifiedH5, 17);
  for (int t = 0; t < 20; ++t) {
    const Vector u = random_vector(p.dof_count(), rng);
    const double b = u.dot(p.apply(u));
    EXPECT_NEAR(b, 2 * p.energy(p.to_field(u)).internal(), 1e-10 * b);
  }
}

TEST(Solve, ZeroLoadGivesZeroSolution) {
  const DiscreteProblem p = make_problem(SurfaceChart::catalog("sphere", {1.0}), ModelKind::ModifiedH5, 9, 0.0);
  EXPECT_DOUBLE_EQ(p.rhs().norm(), 0.0);
  const SolveResult r = solve_cg(p);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_DOUBLE_EQ(r.dofs.norm(), 0.0);
  EXPECT_DOUBLE_EQ(r.energy.internal(), 0.0);
}

TEST(Solve, PlateNormalLoadDecouplesMembrane) {
  const DiscreteProblem p = make_problem(SurfaceChart::catalog("plane", {}), ModelKind::Koiter, 17);
  const SolveResult r = solve_cg(p, 1e-12);
  double in_plane = 0.0, normal = 0.0;
  for (const Vec3& v : r.v.values()) {
    in_plane = std::max(in_plane, std::max(std::abs(v(0)), std::abs(v(1))));
    normal = std::max(normal, std::abs(v(2)));
  }
  EXPECT_GT(normal, 0.0);
  EXPECT_LT(in_plane, 1e-10 * normal);
}

TEST(Solve, GalerkinOrthogonality) {
  std::mt19937_64 rng(34);
  const double tol = 1e-10;
  const DiscreteProblem p = make_problem(SurfaceChart::catalog("cylinder", {2.0}), ModelKind::Koiter, 17);
  const SolveResult r = solve_cg(p, tol);
  EXPECT_LE(r.relative_residual, tol);
  for (int t = 0; t < 20; ++t) {
    const Vector w = random_vector(p.dof_count(), rng);
    EXPECT_LE(std::abs(w.dot(p.apply(r.dofs)) - w.dot(p.rhs())), tol * w.norm());
  }
}

TEST(Solve, FlatPlateCosseratWithoutInternalLengthMatchesKoiter) {
  const SurfaceChart plane = SurfaceChart::catalog("plane", {});
  const Grid grid(plane.domain(), 17, 17);
  const DeadLoad load = DeadLoad::normal_pressure(evaluate_frames(plane, grid), 1.0);
  ModelConfig koiter, cosserat;
  koiter.model = ModelKind::Koiter;
  cosserat.model = ModelKind::ModifiedH5;
  cosserat.material.Lc = 0.0;
  const SolveResult a = solve_cg(DiscreteProblem(plane, koiter, grid, load));
  const SolveResult b = solve_cg(DiscreteProblem(plane, cosserat, grid, load));
  EXPECT_NEAR(a.energy.internal(), b.energy.internal(), 1e-8 * a.energy.internal());
  EXPECT_LT((a.dofs - b.dofs).norm(), 1e-8 * a.dofs.norm());
}

TEST(Solve, PlateEnergyDecreasesWithThickness) {
  const SurfaceChart plane = SurfaceChart::catalog("plane", {});
  double prev = 1e300;
  for (double h : {0.01, 0.02, 0.04}) {
    const SolveResult r = solve_cg(make_problem(plane, ModelKind::Koiter, 17, 1.0, h));
    EXPECT_LT(r.energy.internal(), prev) << h;
    prev = r.energy.internal();
  }
}

TEST(Solve, RepeatedSolvesAreBitwiseIdentical) {
  const DiscreteProblem p = make_problem(SurfaceChart::catalog("cylinder", {2.0}), ModelKind::ModifiedH5, 11);
  const SolveResult a = solve_cg(p), b = solve_cg(p);
  EXPECT_EQ(a.v.to_csv(), b.v.to_csv());
  EXPECT_EQ(a.energy.csv_row(), b.energy.csv_row());
}

TEST(Solve, ReportsNoConvergence) {
  const DiscreteProblem p = make_problem(SurfaceChart::catalog("cylinder", {2.0}), ModelKind::ModifiedH5, 11);
  try {
    solve_cg(p, 1e-10, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoConvergence);
    EXPECT_NE(std::string(e.what()).find("O(h5) check"), std::string::npos);
  }
}

TEST(Solve, ConjugateGradientsSolveASmallSpdSystem) {
  Eigen::MatrixXd A(3, 3);
  A << 4, 1, 0, 1, 3, 1, 0, 1, 2;
  const Vector b = Vector::Ones(3);
  const CgResult r = conjugate_gradient([&](const Vector& x, Vector& y) { y = A * x; }, b, A.diagonal(), 1e-14, 50);
  EXPECT_TRUE(r.converged);
  EXPECT_LT((A * r.x - b).norm(), 1e-13);
}

TEST(EigenEstimate, PositiveOnThePlateAndSmallerForTheDegenerateProbe) {
  const SurfaceChart plane = SurfaceChart::catalog("plane", {});
  const Grid grid(plane.domain(), 11, 11);
  const DeadLoad load = DeadLoad::normal_pressure(evaluate_frames(plane, grid), 1.0);
  ModelConfig k;
  k.model = ModelKind::Koiter;
  const EigenEstimate plate = min_eigen_estimate(DiscreteProblem(plane, k, grid, load));
  EXPECT_GT(plate.value, 0.0);
  EXPECT_TRUE(plate.shift_invert);

  // Compare against the full symmetric eigensolve of the assembled matrix.
  const DiscreteProblem p(plane, k, grid, load);
  Eigen::MatrixXd A(p.dof_count(), p.dof_count());
  for (std::size_t c = 0; c < p.dof_count(); ++c) A.col(c) = p.apply(Vector::Unit(p.dof_count(), c));
  const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A).eigenvalues()(0);
  EXPECT_NEAR(plate.value, lmin, 1e-6 * lmin);

  ModelConfig full, degenerate;
  full.model = degenerate.model = ModelKind::ModifiedH5;
  degenerate.material.b1 = degenerate.material.b2 = degenerate.material.b3 = 0.0;
  degenerate.leading_order_only = true;
  const EigenEstimate a = min_eigen_estimate(DiscreteProblem(plane, full, grid, load));
  const EigenEstimate b = min_eigen_estimate(DiscreteProblem(plane, degenerate, grid, load));
  EXPECT_GT(a.value, 0.0);
  EXPECT_LT(b.value, a.value);
}

TEST(DeadLoad, CsvLoadMatchesUniform) {
  const SurfaceChart c = SurfaceChart::catalog("plane", {});
  const Grid grid(c.domain(), 9, 9);
  std::string text = "i,j,f1,f2,f3\n";
  for (int i = 0; i < 9; ++i) {
    for (int j = 0; j < 9; ++j) text += csv_line(std::vector<double>{double(i), double(j), 0.0, 0.5, 1.0});
  }
  const auto dir = std::filesystem::temp_directory_path() / "cosshell_load_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "load.csv").string();
  write_text_file(path, text);
  const DeadLoad a = DeadLoad::from_csv(path, grid);
  const DeadLoad b = DeadLoad::uniform(grid, Vec3(0, 0.5, 1));
  ASSERT_EQ(a.nodal.size(), b.nodal.size());
  for (std::size_t k = 0; k < a.nodal.size(); ++k) EXPECT_EQ(a.nodal[k], b.nodal[k]);
}

}  // namespace
}  // namespace cosshell
