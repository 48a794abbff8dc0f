// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "cosshell/commands.hpp"
#include "cosshell/csv.hpp"
#include "cosshell/nonlinear_oracle.hpp"
#include "cosshell/solver.hpp"

namespace {

using namespace cosshell;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "cosshell_acceptance" / name;
  std::filesystem::remove_all(dir);
  return dir;
}

std::vector<SurfaceChart> oracle_charts() {
  return {SurfaceChart::catalog("plane", {}), SurfaceChart::catalog("cylinder", {2.0}),
          SurfaceChart::catalog("sphere", {1.0})};
}

std::vector<SurfaceChart> all_catalog_charts() {
  std::vector<SurfaceChart> out;
  for (const std::string& n : SurfaceChart::catalog_names()) out.push_back(SurfaceChart::catalog(n, {}));
  return out;
}

const ModelKind kAllModels[] = {ModelKind::Koiter, ModelKind::CosseratH3, ModelKind::CosseratH5,
                                ModelKind::ModifiedH3, ModelKind::ModifiedH5};

Mat2 random_sym2(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Mat2 m;
  m << g(rng), g(rng), 0, g(rng);
  m(1, 0) = m(0, 1);
  return m;
}

Outcome threshold_constant() {
  const auto t0 = std::chrono::steady_clock::now();
  const ThicknessReportH5 r = thickness_check_h5(0.5, 1.0);
  const double a = alpha_star();
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  const std::string shown = fmt("%.5g", a);
  return {shown == "0.97083" && r.pass() && ms < 1.0, "alpha* = " + shown + ", " + fmt("%.3f", ms) + " ms"};
}

Outcome linearization_oracle() {
  int tests = 0, failures = 0;
  double min_slope = 1e300, max_identity = 0.0;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.2, 0.8);
  for (const SurfaceChart& c : oracle_charts()) {
    const Rect& d = c.domain();
    for (std::uint64_t k = 0; k < 5; ++k) {
      const TrigField field(1000 + k, 4, 1.0, 2.0);
      const Vec2 p(d.x1_min + u(rng) * d.extent(0), d.x2_min + u(rng) * d.extent(1));
      for (const SlopeTest& t : linearization_slope_tests(c, field, p)) {
        if (t.measure == "Q") continue;
        ++tests;
        if (!t.pass) ++failures;
        min_slope = std::min(min_slope, t.slope);
      }
      const double r = bending_identity_residual(c, field, p, 1e-4);
      max_identity = std::max(max_identity, r);
      if (r > 1e-6) ++failures;
    }
  }
  return {failures == 0, std::to_string(tests) + " slope tests, min slope " + fmt("%.4f", min_slope) +
                             ", max identity residual " + fmt("%.3e", max_identity)};
}

Outcome identity_suite() {
  double worst_g = 0.0, worst_r = 0.0;
  for (const SurfaceChart& c : all_catalog_charts()) {
    const Grid grid(c.domain(), 33, 33);
    const auto frames = evaluate_frames(c, grid);
    const TrigField field(7, 4, 1.0, 3.0);
    for (int i = 1; i + 1 < grid.n1(); ++i) {
      for (int j = 1; j + 1 < grid.n2(); ++j) {
        const GeometryFrame& f = frames[grid.node(i, j)];
        const LocalDisplacement u = field.evaluate(f);
        const StrainState s = compute_strain_state(f, u);
        worst_g = std::max(worst_g, (s.G - change_of_metric_covariant(f, u)).norm());
        worst_r = std::max(worst_r, (s.R_koiter - koiter_bending_covariant(f, u)).norm());
      }
    }
  }
  return {worst_g <= 1e-10 && worst_r <= 1e-10,
          "max |G - G_cov| = " + fmt("%.3e", worst_g) + ", max |R - R_cov| = " + fmt("%.3e", worst_r)};
}

Outcome rigid_motion_annihilation() {
  double worst = 0.0;
  for (const SurfaceChart& c : all_catalog_charts()) {
    const Grid grid(c.domain(), 17, 17);
    const auto frames = evaluate_frames(c, grid);
    for (std::uint64_t s = 0; s < 10; ++s) {
      const RigidMotion rm = RigidMotion::random(s);
      double norm2 = 0.0;
      std::vector<StrainState> strains;
      for (const GeometryFrame& f : frames) {
        const LocalDisplacement u = rm.evaluate(f);
        norm2 += u.v.squaredNorm() + u.d[0].squaredNorm() + u.d[1].squaredNorm();
        strains.push_back(compute_strain_state(f, u));
      }
      for (ModelKind k : kAllModels) {
        ModelConfig cfg;
        cfg.model = k;
        double e = 0.0;
        for (int i = 0; i < grid.n1(); ++i) {
          for (int j = 0; j < grid.n2(); ++j) {
            const std::size_t n = grid.node(i, j);
            e += grid.weight(i, j) * frames[n].det_grad_theta * energy_density(frames[n], strains[n], cfg).internal();
          }
        }
        worst = std::max(worst, std::abs(e) / norm2);
      }
    }
  }
  return {worst <= 1e-9, "max energy / field norm^2 = " + fmt("%.3e", worst)};
}

Outcome flat_plate_reduction() {
  const SurfaceChart plane = SurfaceChart::catalog("plane", {});
  const Grid grid(plane.domain(), 33, 33);
  const DeadLoad load = DeadLoad::normal_pressure(evaluate_frames(plane, grid), 1.0);
  ModelConfig koiter, cosserat;
  koiter.model = ModelKind::Koiter;
  cosserat.model = ModelKind::ModifiedH5;
  cosserat.material.Lc = 0.0;
  const DiscreteProblem pk(plane, koiter, grid, load);
  const SolveResult a = solve_cg(pk);
  const SolveResult b = solve_cg(DiscreteProblem(plane, cosserat, grid, load));
  const Vector diff = a.dofs - b.dofs;
  const double rel = std::sqrt(diff.dot(pk.apply(diff)) / a.dofs.dot(pk.apply(a.dofs)));
  return {rel <= 1e-8, "relative energy-norm difference " + fmt("%.3e", rel)};
}

Outcome discrete_well_posedness() {
  const SurfaceChart cyl = SurfaceChart::catalog("cylinder", {2.0});
  const Grid grid(cyl.domain(), 33, 33);
  const DeadLoad load = DeadLoad::normal_pressure(evaluate_frames(cyl, grid), 1.0);
  bool ok = true;
  std::string detail;
  for (ModelKind k : {ModelKind::ModifiedH3, ModelKind::ModifiedH5}) {
    ModelConfig cfg;
    cfg.model = k;
    cfg.h = 0.1;
    const DiscreteProblem p(cyl, cfg, grid, load);
    const bool thickness = k == ModelKind::ModifiedH5 ? p.coercivity().h5.pass() : p.coercivity().h3.pass();
    const EigenEstimate e = min_eigen_estimate(p);
    const SolveResult r0 = solve_cg(p, 1e-10);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    Vector x0(static_cast<Eigen::Index>(p.dof_count()));
    for (Eigen::Index i = 0; i < x0.size(); ++i) x0(i) = g(rng);
    const SolveResult r1 = solve_cg(p, 1e-10, 0, &x0);
    const double agree = (r0.dofs - r1.dofs).norm() / r0.dofs.norm();
    const int cap = static_cast<int>(20 * p.dof_count());
    const bool this_ok = thickness && e.value > 0.0 && r0.relative_residual <= 1e-10 && r0.iterations <= cap &&
                         r1.iterations <= cap && agree <= 1e-8;
    ok = ok && this_ok;
    detail += std::string(detail.empty() ? "" : "; ") + to_string(k) + ": lambda_min " + fmt("%.3e", e.value) + ", cg " + std::to_string(r0.iterations) + "/" +
              std::to_string(r1.iterations) + " its, agreement " + fmt("%.2e", agree);
  }
  return {ok, detail};
}

Outcome metric_bending_estimates() {
  int violations = 0, samples = 0;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  double worst = 1e300;
  std::string where;
  for (const SurfaceChart& c : oracle_charts()) {
    const Rect& d = c.domain();
    const int before = violations;
    for (int k = 0; k < 1000; ++k) {
      const GeometryFrame f = evaluate_frame(c, {d.x1_min + u(rng) * d.extent(0), d.x2_min + u(rng) * d.extent(1)});
      const MetricBendingEstimate e = metric_bending_estimate(f, random_sym2(rng), random_sym2(rng));
      ++samples;
      if (!e.holds()) ++violations;
      worst = std::min(worst, e.lhs / e.rhs * e.c);
    }
    if (violations > before) where += " " + c.name() + ":" + std::to_string(violations - before);
  }
  return {violations == 0, std::to_string(violations) + " violations in " + std::to_string(samples) + " samples" +
                               (where.empty() ? "" : " (" + where.substr(1) + ")") +
                               ", smallest lhs/(|G|^2+|R|^2) " + fmt("%.4f", worst)};
}

Outcome form_bounds() {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.1, 3.0);
  double slack = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const MaterialParams m{u(rng), u(rng) - 0.05, u(rng), u(rng), u(rng), u(rng)};
    const FormBounds b = quadratic_form_bounds(m);
    Mat3 X;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) X(i, j) = g(rng);
    }
    const Mat3 S = sym(X);
    const double ns = S.squaredNorm(), nx = X.squaredNorm();
    slack = std::max({slack, (b.c1 * ns - w_shell(S, m)) / ns, (w_shell(S, m) - b.C1 * ns) / ns,
                      (b.c2 * nx - w_curv(X, m)) / nx, (w_curv(X, m) - b.C2 * nx) / nx});
  }
  const FormBounds iso = quadratic_form_bounds(MaterialParams{1.0, 0.0, 1.0, 1.0, 1.0, 1.0});
  const double iso_err = std::max(std::abs(iso.c1 - 1.0), std::abs(iso.C1 - 1.0));
  return {slack <= 1e-10 && iso_err <= 1e-12,
          "max bracket violation " + fmt("%.3e", std::max(slack, 0.0)) + ", |c1-1|,|C1-1| <= " + fmt("%.1e", iso_err)};
}

RunConfig convergence_config() {
  RunConfig cfg;
  cfg.merge_text(
      "chart.name = plane\nmodel.list = koiter,modified-h5\nload.type = manufactured\nload.vector = 0,0,1\n"
      "grid.sweep = 16,32,64\n",
      "acceptance");
  return cfg;
}

Outcome convergence_orders() {
  const auto dir = scratch("convergence");
  std::ostringstream log, err;
  if (run_command("convergence", convergence_config(), dir.string(), log, err) != kExitOk) return {false, err.str()};
  std::stringstream ss(read_file(dir / "orders.csv"));
  std::string line;
  std::getline(ss, line);
  bool ok = true;
  int rows = 0;
  std::string detail;
  while (std::getline(ss, line)) {
    const std::string model = line.substr(0, line.find(','));
    const double p = std::stod(line.substr(line.rfind(',') + 1));
    ok = ok && p >= 1.8;
    ++rows;
    detail += std::string(detail.empty() ? "" : "; ") + model + " order " + fmt("%.3f", p);
  }
  return {ok && rows == 2, detail};
}

Outcome determinism() {
  std::vector<std::pair<std::string, RunConfig>> runs;
  RunConfig solve;
  solve.merge_text("chart.name = cylinder\nchart.params = 2\nmodel.name = modified-h5\ngrid.n1 = 17\ngrid.n2 = 17\n",
                   "acceptance");
  runs.emplace_back("solve", solve);
  RunConfig compare;
  compare.merge_text("model.list = koiter,modified-h5\nmaterial.Lc = 0\nsolver.eigen = false\n", "acceptance");
  runs.emplace_back("compare", compare);
  runs.emplace_back("convergence", convergence_config());
  runs.emplace_back("oracle", RunConfig());
  int files = 0;
  for (const auto& [command, cfg] : runs) {
    const auto a = scratch(command + "_a"), b = scratch(command + "_b");
    std::ostringstream log, err;
    if (run_command(command, cfg, a.string(), log, err) != kExitOk) return {false, command + ": " + err.str()};
    if (run_command(command, cfg, b.string(), log, err) != kExitOk) return {false, command + ": " + err.str()};
    for (const auto& entry : std::filesystem::directory_iterator(a)) {
      if (entry.path().extension() != ".csv") continue;
      ++files;
      if (read_file(entry.path()) != read_file(b / entry.path().filename())) {
        return {false, command + "/" + entry.path().filename().string() + " differs"};
      }
    }
  }
  return {true, std::to_string(files) + " CSV files byte-identical across repeated runs"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"coercivity threshold constant", threshold_constant},
      {"linearization oracle suite", linearization_oracle},
      {"strain identity suite", identity_suite},
      {"rigid-motion annihilation", rigid_motion_annihilation},
      {"flat-plate reduction", flat_plate_reduction},
      {"discrete well-posedness", discrete_well_posedness},
      {"metric/bending constructive inequality", metric_bending_estimates},
      {"quadratic-form bounds", form_bounds},
      {"grid convergence", convergence_orders},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::printf("criterion %zu %s: %s (%s; %.2f s)\n", k + 1, criteria[k].first, o.pass ? "PASS" : "FAIL",
                o.detail.c_str(), s);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
