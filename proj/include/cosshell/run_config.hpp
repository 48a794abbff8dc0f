#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cosshell/displacement.hpp"
#include "cosshell/shell_energy.hpp"
#include "cosshell/solver.hpp"
#include "cosshell/surface_geometry.hpp"

namespace cosshell {

// Flat "section.key = value" configuration. Every key has a default; unknown keys are rejected.
class RunConfig {
 public:
  RunConfig();

  // Lines "section.key = value"; '#' starts a comment.
  void merge_text(const std::string& text, const std::string& origin);
  void merge_file(const std::string& path);
  // "section.key=value"
  void set_override(const std::string& assignment);
  void set(const std::string& key, const std::string& value);

  const std::string& get(const std::string& key) const;
  double get_double(const std::string& key) const;
  int get_int(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<std::string> get_strings(const std::string& key) const;

  // Sorted "key = value" lines.
  std::string dump() const;

  // Typed views; throw InvalidConfig or InvalidMaterial.
  SurfaceChart chart() const;
  MaterialParams material() const;
  ModelConfig model(ModelKind kind) const;
  ModelKind model_kind() const;
  std::vector<ModelKind> model_list() const;
  Grid grid(int n1, int n2) const;
  Grid grid() const;
  DeadLoad load(const Grid& grid, const std::vector<GeometryFrame>& frames) const;
  std::uint64_t seed() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace cosshell
