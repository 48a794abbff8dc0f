#include "cosshell/commands.hpp"

#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include "cosshell/csv.hpp"
#include "cosshell/error.hpp"
#include "cosshell/nonlinear_oracle.hpp"
#include "cosshell/solver.hpp"

namespace cosshell {

namespace {

const char* verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

std::string join_path(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

void prepare_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create output directory " + dir);
}

std::string report_header(const std::string& command, const RunConfig& cfg) {
  return "# cosshell report\ncommand: " + command + "\n\n## configuration\n" + cfg.dump() + "\n";
}

std::string thickness_block(const CoercivityReport& c) {
  std::ostringstream os;
  os << "## thickness checks\n";
  os << "max|kappa| = " << format_number(c.h5.kappa_max) << "\n";
  os << "h*max|kappa| = " << format_number(c.h5.h_kappa) << "\n";
  os << "alpha* = " << format_number(alpha_star()) << "\n";
  os << "thickness check (O(h5)): " << verdict(c.h5.pass()) << "\n";
  os << "kinematic bound (h*max|kappa| < 2): " << verdict(c.h5.kinematic) << "\n";
  os << "thickness check (O(h3)) condition i: " << verdict(c.h3.cond_i) << "\n";
  os << "thickness check (O(h3)) condition ii: " << verdict(c.h3.cond_ii) << "\n";
  os << "thickness check (O(h3)): " << verdict(c.h3.pass()) << "\n";
  os << "form constants: c1+ = " << format_number(c.forms.c1) << ", C1+ = " << format_number(c.forms.C1)
     << ", c2+ = " << format_number(c.forms.c2) << "\n\n";
  return os.str();
}

CoercivityReport coercivity_of(const std::vector<GeometryFrame>& frames, const ModelConfig& m) {
  CoercivityReport c;
  c.h5 = thickness_check_h5(frames, m.h);
  c.h3 = thickness_check_h3(frames, m.h, m.material);
  c.forms = quadratic_form_bounds(m.material);
  return c;
}

bool conditional(ModelKind k) { return k == ModelKind::CosseratH3 || k == ModelKind::CosseratH5; }

std::string constraint_block(const ConstraintSummary& s, ModelKind kind, double threshold) {
  std::ostringstream os;
  os << "## constraint residuals\n";
  os << "skew(GL) max = " << format_number(s.skew_GL_max) << ", mean = " << format_number(s.skew_GL_mean) << "\n";
  os << "skew((R-2GL)L) max = " << format_number(s.skew_RL_max) << ", mean = " << format_number(s.skew_RL_mean)
     << "\n";
  os << "relative max = " << format_number(s.relative_max()) << "\n";
  if (conditional(kind) && s.relative_max() > threshold) {
    os << "warning: VariantMismatch: symmetry constraints violated beyond " << format_number(threshold)
       << "; the conditional model is evaluated without enforcing them\n";
  }
  os << "\n";
  return os.str();
}

struct Solved {
  DiscreteProblem problem;
  SolveResult result;
};

Solved solve_model(const RunConfig& cfg, const SurfaceChart& chart, const Grid& grid, ModelKind kind,
                   const Vector* x0 = nullptr) {
  const ModelConfig m = cfg.model(kind);
  const auto frames = evaluate_frames(chart, grid);
  DiscreteProblem problem(chart, m, grid, cfg.load(grid, frames));
  SolveResult r = solve_cg(problem, cfg.get_double("solver.tol"), cfg.get_int("solver.max_iter"), x0);
  return {std::move(problem), std::move(r)};
}

}  // namespace

double richardson_order(double e_coarse, double e_mid, double e_fine, double ratio) {
  return std::log(std::abs((e_coarse - e_mid) / (e_mid - e_fine))) / std::log(ratio);
}

int run_check(const RunConfig& cfg, const std::string& out_dir, std::ostream& log) {
  const SurfaceChart chart = cfg.chart();
  const Grid grid = cfg.grid();
  const ModelConfig m = cfg.model(cfg.model_kind());
  const auto frames = evaluate_frames(chart, grid);
  const CoercivityReport c = coercivity_of(frames, m);
  const FormBounds closed = quadratic_form_bounds_closed(m.material);

  std::ostringstream os;
  os << report_header("check", cfg) << thickness_block(c);
  os << "## material\n";
  os << "poisson ratio (reported only) = " << format_number(m.material.poisson_ratio()) << "\n";
  os << "closed-form constants: c1+ = " << format_number(closed.c1) << ", C1+ = " << format_number(closed.C1)
     << ", c2+ = " << format_number(closed.c2) << "\n";
  prepare_dir(out_dir);
  write_text_file(join_path(out_dir, "report.txt"), os.str());
  log << "thickness check (O(h5)): " << verdict(c.h5.pass()) << "\n";
  log << "thickness check (O(h3)): " << verdict(c.h3.pass()) << "\n";
  return kExitOk;
}

int run_solve(const RunConfig& cfg, const std::string& out_dir, std::ostream& log) {
  const SurfaceChart chart = cfg.chart();
  const Grid grid = cfg.grid();
  const ModelKind kind = cfg.model_kind();
  Solved s = solve_model(cfg, chart, grid, kind);

  std::ostringstream os;
  os << report_header("solve", cfg) << thickness_block(s.result.coercivity);
  os << "## solve\n";
  os << "model = " << to_string(kind) << "\n";
  os << "dofs = " << s.problem.dof_count() << "\n";
  os << "iterations = " << s.result.iterations << "\n";
  os << "relative residual = " << format_number(s.result.relative_residual) << "\n";
  const std::string eig = cfg.get("solver.eigen");
  if (eig == "true") {
    const EigenEstimate e = min_eigen_estimate(s.problem, cfg.get_int("solver.eigen_iters"));
    os << "min eigenvalue estimate = " << format_number(e.value) << " (" << (e.converged ? "converged" : "not converged")
       << (e.shift_invert ? "" : ", Ritz upper bound") << ")\n";
    os << "discrete coercivity: " << verdict(e.value > 0.0) << "\n";
  } else if (eig != "false") {
    throw Error(ErrorCode::InvalidConfig, "solver.eigen must be true or false");
  }
  os << "\n## energy\n" << s.result.energy.describe() << "\n";
  os << constraint_block(s.result.constraints, kind, cfg.get_double("report.constraint_threshold"));

  prepare_dir(out_dir);
  write_text_file(join_path(out_dir, "solution.csv"), s.result.v.to_csv());
  write_text_file(join_path(out_dir, "energy.csv"), EnergyBreakdown::csv_header() + s.result.energy.csv_row());
  write_text_file(join_path(out_dir, "report.txt"), os.str());
  log << "solved " << to_string(kind) << " in " << s.result.iterations << " iterations, internal energy "
      << format_number(s.result.energy.internal()) << "\n";
  return kExitOk;
}

int run_compare(const RunConfig& cfg, const std::string& out_dir, std::ostream& log) {
  const SurfaceChart chart = cfg.chart();
  const Grid grid = cfg.grid();
  const auto kinds = cfg.model_list();
  if (kinds.size() < 2) throw Error(ErrorCode::InvalidConfig, "compare needs at least two models");

  std::vector<Solved> runs;
  for (ModelKind k : kinds) runs.push_back(solve_model(cfg, chart, grid, k));

  std::string table = "model,iterations," + EnergyBreakdown::csv_header();
  for (std::size_t k = 0; k < runs.size(); ++k) {
    table += to_string(kinds[k]) + "," + std::to_string(runs[k].result.iterations) + "," +
             runs[k].result.energy.csv_row();
  }
  std::string pairs = "model_a,model_b,l2_relative,energy_relative\n";
  for (std::size_t a = 0; a < runs.size(); ++a) {
    for (std::size_t b = a + 1; b < runs.size(); ++b) {
      const Vector& ua = runs[a].result.dofs;
      const Vector diff = ua - runs[b].result.dofs;
      const double un = ua.norm();
      const double ea = std::sqrt(std::max(ua.dot(runs[a].problem.apply(ua)), 0.0));
      const double ed = std::sqrt(std::max(diff.dot(runs[a].problem.apply(diff)), 0.0));
      pairs += csv_line(std::vector<std::string>{to_string(kinds[a]), to_string(kinds[b]),
                                                 format_number(un > 0 ? diff.norm() / un : diff.norm()),
                                                 format_number(ea > 0 ? ed / ea : ed)});
    }
  }
  std::ostringstream os;
  os << report_header("compare", cfg) << thickness_block(runs.front().result.coercivity);
  for (std::size_t k = 0; k < runs.size(); ++k) {
    os << "## " << to_string(kinds[k]) << "\n" << runs[k].result.energy.describe() << "\n";
    os << constraint_block(runs[k].result.constraints, kinds[k], cfg.get_double("report.constraint_threshold"));
  }
  prepare_dir(out_dir);
  write_text_file(join_path(out_dir, "compare.csv"), table);
  write_text_file(join_path(out_dir, "compare_pairs.csv"), pairs);
  write_text_file(join_path(out_dir, "report.txt"), os.str());
  log << pairs;
  return kExitOk;
}

int run_convergence(const RunConfig& cfg, const std::string& out_dir, std::ostream& log) {
  const SurfaceChart chart = cfg.chart();
  const auto kinds = cfg.model_list();
  const std::vector<double> sweep = cfg.get_doubles("grid.sweep");
  if (sweep.size() < 3) throw Error(ErrorCode::InvalidConfig, "grid.sweep needs at least three sizes");
  std::vector<int> cells;
  for (double c : sweep) {
    if (c != std::floor(c) || c < 7) throw Error(ErrorCode::InvalidConfig, "grid.sweep entries are cell counts >= 7");
    cells.push_back(static_cast<int>(c));
  }
  const double ratio = static_cast<double>(cells[1]) / cells[0];
  for (std::size_t k = 1; k < cells.size(); ++k) {
    if (cells[k] != cells[k - 1] * static_cast<int>(ratio) || ratio != std::floor(ratio) || ratio < 2) {
      throw Error(ErrorCode::InvalidConfig, "grid.sweep must be nested with a constant integer ratio");
    }
  }

  std::string table = "model,cells,iterations,internal,total\n";
  std::string orders = "model,cells_coarse,cells_mid,cells_fine,order\n";
  std::ostringstream os;
  os << report_header("convergence", cfg);
  bool ok = true;
  for (ModelKind kind : kinds) {
    std::vector<double> energies;
    for (int c : cells) {
      const Grid grid(chart.domain(), c + 1, c + 1);
      const Solved s = solve_model(cfg, chart, grid, kind);
      energies.push_back(s.result.energy.internal());
      table += csv_line(std::vector<std::string>{to_string(kind), std::to_string(c),
                                                 std::to_string(s.result.iterations),
                                                 format_number(s.result.energy.internal()),
                                                 format_number(s.result.energy.total())});
    }
    os << "## " << to_string(kind) << "\n";
    for (std::size_t k = 0; k + 2 < energies.size(); ++k) {
      const double p = richardson_order(energies[k], energies[k + 1], energies[k + 2], ratio);
      orders += csv_line(std::vector<std::string>{to_string(kind), std::to_string(cells[k]),
                                                  std::to_string(cells[k + 1]), std::to_string(cells[k + 2]),
                                                  format_number(p)});
      os << "order (" << cells[k] << "," << cells[k + 1] << "," << cells[k + 2] << ") = " << format_number(p) << "\n";
      if (!(p >= 1.8)) ok = false;
    }
    os << "\n";
  }

  // Stencil error of the bending measure for a clamped analytic field; shrinks under refinement.
  std::string identity = "cells,max_error_R_inf,max_error_G\n";
  const ClampedField field(chart.domain(), cfg.seed(), 3, 0.1);
  for (int c : cells) {
    const Grid grid(chart.domain(), c + 1, c + 1);
    const auto frames = evaluate_frames(chart, grid);
    const StencilOperator st(grid, frames, BoundaryTreatment::Clamped);
    const DisplacementField sampled = sample(field, grid, frames);
    double er = 0.0, eg = 0.0;
    for (int i = 1; i + 1 < grid.n1(); ++i) {
      for (int j = 1; j + 1 < grid.n2(); ++j) {
        const GeometryFrame& f = frames[grid.node(i, j)];
        const LocalDisplacement exact = field.evaluate(f);
        const LocalDisplacement fd = sampled.local(st, i, j);
        const Mat2 g_fd = change_of_metric(f, fd);
        const Mat2 g_ex = change_of_metric(f, exact);
        er = std::max(er, ((koiter_bending(f, fd) - g_fd * f.L) - (koiter_bending(f, exact) - g_ex * f.L)).norm());
        eg = std::max(eg, (g_fd - g_ex).norm());
      }
    }
    identity += csv_line(std::vector<std::string>{std::to_string(c), format_number(er), format_number(eg)});
  }

  prepare_dir(out_dir);
  write_text_file(join_path(out_dir, "convergence.csv"), table);
  write_text_file(join_path(out_dir, "orders.csv"), orders);
  write_text_file(join_path(out_dir, "identity.csv"), identity);
  os << "observed order >= 1.8: " << verdict(ok) << "\n";
  write_text_file(join_path(out_dir, "report.txt"), os.str());
  log << orders;
  return kExitOk;
}

int run_oracle(const RunConfig& cfg, const std::string& out_dir, std::ostream& log) {
  const int nfields = cfg.get_int("oracle.fields");
  if (nfields < 1) throw Error(ErrorCode::InvalidConfig, "oracle.fields must be positive");
  std::string table = "chart,field,measure,t,defect,slope,pass\n";
  std::string ident = "chart,field,x1,x2,residual\n";
  bool ok = true;
  std::mt19937_64 rng(cfg.seed());
  std::uniform_real_distribution<double> unit(0.2, 0.8);
  for (const std::string& spec : cfg.get_strings("oracle.charts")) {
    const auto colon = spec.find(':');
    const std::string name = spec.substr(0, colon);
    std::vector<double> params;
    if (colon != std::string::npos) params.push_back(std::stod(spec.substr(colon + 1)));
    const SurfaceChart chart = SurfaceChart::catalog(name, params);
    const Rect& d = chart.domain();
    for (int k = 0; k < nfields; ++k) {
      const TrigField field(cfg.seed() * 1000 + static_cast<std::uint64_t>(k), 4, 1.0, 2.0);
      const Vec2 p(d.x1_min + unit(rng) * d.extent(0), d.x2_min + unit(rng) * d.extent(1));
      for (const SlopeTest& t : linearization_slope_tests(chart, field, p)) {
        ok = ok && t.pass;
        for (std::size_t q = 0; q < t.ts.size(); ++q) {
          table += csv_line(std::vector<std::string>{spec, std::to_string(k), t.measure, format_number(t.ts[q]),
                                                     format_number(t.defects[q]), format_number(t.slope),
                                                     verdict(t.pass)});
        }
      }
      const double r = bending_identity_residual(chart, field, p);
      ok = ok && r <= 1e-6;
      ident += csv_line(std::vector<std::string>{spec, std::to_string(k), format_number(p(0)),
                                                 format_number(p(1)), format_number(r)});
    }
  }
  prepare_dir(out_dir);
  write_text_file(join_path(out_dir, "oracle.csv"), table);
  write_text_file(join_path(out_dir, "identity.csv"), ident);
  write_text_file(join_path(out_dir, "report.txt"),
                  report_header("oracle", cfg) + "linearization oracle: " + verdict(ok) + "\n");
  log << "linearization oracle: " << verdict(ok) << "\n";
  return ok ? kExitOk : kExitNumerical;
}

int run_command(const std::string& name, const RunConfig& cfg, const std::string& out_dir, std::ostream& log,
                std::ostream& err) {
  try {
    if (name == "check") return run_check(cfg, out_dir, log);
    if (name == "solve") return run_solve(cfg, out_dir, log);
    if (name == "compare") return run_compare(cfg, out_dir, log);
    if (name == "convergence") return run_convergence(cfg, out_dir, log);
    if (name == "oracle") return run_oracle(cfg, out_dir, log);
    throw Error(ErrorCode::InvalidConfig, "unknown command '" + name + "'");
  } catch (const Error& e) {
    err << "error: code=" << to_string(e.code()) << " message=" << e.what() << "\n";
    return e.is_config_error() ? kExitConfig : kExitNumerical;
  }
}

}  // namespace cosshell
