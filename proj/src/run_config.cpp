#include "cosshell/run_config.hpp"

#include <fstream>
#include <optional>
#include <sstream>

#include "cosshell/error.hpp"

namespace cosshell {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidConfig, "key " + key + " expects a number, got '" + text + "'");
  }
}

}  // namespace

RunConfig::RunConfig() {
  values_ = {
      {"chart.name", "plane"},
      {"chart.params", ""},
      {"chart.domain", ""},
      {"chart.csv", ""},
      {"chart.derivatives", "closed-form"},
      {"chart.step", "1e-3"},
      {"chart.metric_floor", "1e-12"},
      {"model.name", "modified-h5"},
      {"model.list", "koiter,modified-h5"},
      {"model.h", "0.1"},
      {"model.leading_order_only", "false"},
      {"material.mu", "1"},
      {"material.lambda", "1"},
      {"material.Lc", "1"},
      {"material.b1", "1"},
      {"material.b2", "1"},
      {"material.b3", "1"},
      {"load.type", "normal"},
      {"load.vector", "0,0,1"},
      {"load.pressure", "1"},
      {"load.csv", ""},
      {"grid.n1", "33"},
      {"grid.n2", "33"},
      {"grid.sweep", "16,32,64"},
      {"solver.tol", "1e-10"},
      {"solver.max_iter", "0"},
      {"solver.eigen", "true"},
      {"solver.eigen_iters", "30"},
      {"report.constraint_threshold", "1e-6"},
      {"oracle.charts", "plane,cylinder:2,sphere:1"},
      {"oracle.fields", "5"},
      {"run.seed", "1"},
  };
}

void RunConfig::merge_text(const std::string& text, const std::string& origin) {
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::InvalidConfig, origin + ":" + std::to_string(lineno) + ": expected key = value");
    }
    set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void RunConfig::merge_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  merge_text(ss.str(), path);
}

void RunConfig::set_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw Error(ErrorCode::InvalidConfig, "override '" + assignment + "' lacks '='");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void RunConfig::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error(ErrorCode::InvalidConfig, "unknown config key '" + key + "'");
  it->second = value;
}

const std::string& RunConfig::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error(ErrorCode::InvalidConfig, "unknown config key '" + key + "'");
  return it->second;
}

double RunConfig::get_double(const std::string& key) const { return to_double(key, get(key)); }

int RunConfig::get_int(const std::string& key) const {
  const double v = get_double(key);
  if (v != static_cast<double>(static_cast<int>(v))) {
    throw Error(ErrorCode::InvalidConfig, "key " + key + " expects an integer");
  }
  return static_cast<int>(v);
}

std::vector<double> RunConfig::get_doubles(const std::string& key) const {
  std::vector<double> out;
  for (const auto& s : split_list(get(key))) out.push_back(to_double(key, s));
  return out;
}

std::vector<std::string> RunConfig::get_strings(const std::string& key) const { return split_list(get(key)); }

std::string RunConfig::dump() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

SurfaceChart RunConfig::chart() const {
  const std::string name = get("chart.name");
  std::optional<SurfaceChart> chart;
  if (name == "tabulated") {
    const std::string path = get("chart.csv");
    if (path.empty()) throw Error(ErrorCode::InvalidConfig, "tabulated chart needs chart.csv");
    chart.emplace("tabulated", TabulatedSurface::from_csv(path));
  } else {
    const std::vector<double> d = get_doubles("chart.domain");
    Rect rect;
    if (!d.empty() && d.size() != 4) throw Error(ErrorCode::InvalidConfig, "chart.domain needs 4 numbers");
    if (d.size() == 4) rect = Rect{d[0], d[1], d[2], d[3]};
    chart.emplace(SurfaceChart::catalog(name, get_doubles("chart.params"), d.empty() ? nullptr : &rect));
    const std::string mode = get("chart.derivatives");
    if (mode == "numeric") {
      chart->set_mode(DerivativeMode::Numeric);
    } else if (mode != "closed-form") {
      throw Error(ErrorCode::InvalidConfig, "chart.derivatives must be closed-form or numeric");
    }
  }
  chart->set_step_fraction(get_double("chart.step"));
  chart->set_metric_floor(get_double("chart.metric_floor"));
  return *chart;
}

MaterialParams RunConfig::material() const {
  MaterialParams m{get_double("material.mu"), get_double("material.lambda"), get_double("material.Lc"),
                   get_double("material.b1"), get_double("material.b2"), get_double("material.b3")};
  m.validate();
  return m;
}

ModelConfig RunConfig::model(ModelKind kind) const {
  ModelConfig c;
  c.model = kind;
  c.h = get_double("model.h");
  c.material = material();
  const std::string lo = get("model.leading_order_only");
  if (lo != "true" && lo != "false") throw Error(ErrorCode::InvalidConfig, "model.leading_order_only must be true or false");
  c.leading_order_only = lo == "true";
  c.validate();
  return c;
}

ModelKind RunConfig::model_kind() const { return parse_model(get("model.name")); }

std::vector<ModelKind> RunConfig::model_list() const {
  std::vector<ModelKind> out;
  for (const auto& s : get_strings("model.list")) out.push_back(parse_model(s));
  if (out.empty()) throw Error(ErrorCode::InvalidConfig, "model.list is empty");
  return out;
}

Grid RunConfig::grid(int n1, int n2) const { return Grid(chart().domain(), n1, n2); }

Grid RunConfig::grid() const { return grid(get_int("grid.n1"), get_int("grid.n2")); }

DeadLoad RunConfig::load(const Grid& grid, const std::vector<GeometryFrame>& frames) const {
  const std::string type = get("load.type");
  auto vec = [&] {
    const auto v = get_doubles("load.vector");
    if (v.size() != 3) throw Error(ErrorCode::InvalidConfig, "load.vector needs 3 numbers");
    return Vec3(v[0], v[1], v[2]);
  };
  if (type == "none") return DeadLoad::uniform(grid, Vec3::Zero());
  if (type == "uniform") return DeadLoad::uniform(grid, vec());
  if (type == "normal") return DeadLoad::normal_pressure(frames, get_double("load.pressure"));
  if (type == "manufactured") return DeadLoad::manufactured(grid, vec());
  if (type == "csv") return DeadLoad::from_csv(get("load.csv"), grid);
  throw Error(ErrorCode::InvalidConfig, "load.type must be none, uniform, normal, manufactured or csv");
}

std::uint64_t RunConfig::seed() const {
  const double s = get_double("run.seed");
  if (s < 0) throw Error(ErrorCode::InvalidConfig, "run.seed must be nonnegative");
  return static_cast<std::uint64_t>(s);
}

}  // namespace cosshell
