#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cosshell/commands.hpp"
#include "cosshell/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Linear constrained Cosserat shell models: checks, solves, comparisons, convergence studies"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir = "out";
  long long seed = -1;
  app.add_option("--config", config_path, "flat 'section.key = value' config file");
  app.add_option("--set", overrides, "override, section.key=value (repeatable)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "seed for random test fields");

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"solve", "solve the selected model and write solution.csv, energy.csv, report.txt"},
      {"compare", "solve every model in model.list and compare the solutions"},
      {"convergence", "Richardson study over grid.sweep"},
      {"check", "thickness and form-bound checks without solving"},
      {"oracle", "linearization slope tests against the nonlinear strain measures"},
  };
  app.fallthrough();  // inherited by subcommands, so global flags may follow the command name
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return cosshell::kExitConfig;
  }

  cosshell::RunConfig cfg;
  try {
    if (!config_path.empty()) cfg.merge_file(config_path);
    for (const auto& s : overrides) cfg.set_override(s);
    if (seed >= 0) cfg.set("run.seed", std::to_string(seed));
  } catch (const cosshell::Error& e) {
    std::cerr << "error: code=" << cosshell::to_string(e.code()) << " message=" << e.what() << "\n";
    return cosshell::kExitConfig;
  }
  const std::string name = app.get_subcommands().front()->get_name();
  return cosshell::run_command(name, cfg, out_dir, std::cout, std::cerr);
}
