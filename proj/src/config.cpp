#include "karst/config.hpp"

#include <set>
#include <stdexcept>

#include "json.hpp"

namespace karst {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw std::invalid_argument("config: " + path + ": " + what);
}

void reject_unknown(const json& obj, const std::string& path, const std::set<std::string>& known) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!known.count(it.key())) bad(path + "." + it.key(), "unknown key");
}

double get_num(const json& obj, const std::string& path, const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) bad(path + "." + key, "expected a number");
  return obj[key].get<double>();
}

int get_int(const json& obj, const std::string& path, const std::string& key, int fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer()) bad(path + "." + key, "expected an integer");
  return obj[key].get<int>();
}

bool get_bool(const json& obj, const std::string& path, const std::string& key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_boolean()) bad(path + "." + key, "expected a boolean");
  return obj[key].get<bool>();
}

std::string get_str(const json& obj, const std::string& path, const std::string& key,
                    const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_string()) bad(path + "." + key, "expected a string");
  return obj[key].get<std::string>();
}

void apply_override(json& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw std::invalid_argument("config: override needs key=value: " + assignment);
  const std::string path = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);

  json* node = &root;
  size_t start = 0;
  while (true) {
    const size_t dot = path.find('.', start);
    const std::string key = path.substr(start, dot - start);
    if (key.empty()) throw std::invalid_argument("config: bad override path: " + path);
    if (dot == std::string::npos) {
      json parsed = json::parse(value, nullptr, false);
      (*node)[key] = parsed.is_discarded() ? json(value) : parsed;
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

}  // namespace

Mesh RunConfig::build_mesh() const {
  Mesh m = build_graded_mesh(geometry, nx, ny,
                             grading == 1.0 ? Grading::uniform() : Grading::geometric(grading));
  if (triangles) m = split_to_triangles(m);
  return m;
}

ManufacturedCase RunConfig::manufactured_case() const {
  switch (problem_kind) {
    case ProblemKind::Layered:
      return make_layered_case(geometry, conductivity, conduit_conductivity, exchange,
                               interface_value);
    case ProblemKind::SmoothDecoupled:
      return make_smooth_decoupled_case(geometry, conductivity, conduit_conductivity);
    case ProblemKind::Direct:
      throw std::logic_error("config: direct problems have no exact solution");
  }
  throw std::logic_error("config: unreachable");
}

ProblemData RunConfig::problem_data() const {
  if (problem_kind != ProblemKind::Direct) return manufactured_case().data;
  ProblemData d;
  d.conductivity = conductivity;
  d.conduit_conductivity = conduit_conductivity;
  d.exchange = exchange;
  const double fm = matrix_source_const, fc = conduit_source_const;
  d.source_matrix = [fm](double, double) { return fm; };
  d.source_conduit = [fc](double) { return fc; };
  d.validate();
  return d;
}

RunConfig default_config() { return RunConfig{}; }

RunConfig parse_config(const std::string& json_text, const std::vector<std::string>& overrides) {
  json root = json::parse(json_text);
  if (!root.is_object()) throw std::invalid_argument("config: expected a JSON object");
  for (const auto& o : overrides) apply_override(root, o);

  reject_unknown(root, "$",
                 {"geometry", "mesh", "family", "problem", "estimator", "solver", "adapt", "study",
                  "output", "seed"});

  RunConfig cfg;
  if (root.contains("geometry")) {
    const json& g = root["geometry"];
    reject_unknown(g, "geometry", {"length", "half_height"});
    cfg.geometry.length = get_num(g, "geometry", "length", 1.0);
    cfg.geometry.half_height = get_num(g, "geometry", "half_height", 1.0);
    if (cfg.geometry.length <= 0.0) bad("geometry.length", "must be positive");
    if (cfg.geometry.half_height <= 0.0) bad("geometry.half_height", "must be positive");
  }
  if (root.contains("mesh")) {
    const json& m = root["mesh"];
    reject_unknown(m, "mesh", {"nx", "ny", "grading", "triangles"});
    cfg.nx = get_int(m, "mesh", "nx", cfg.nx);
    cfg.ny = get_int(m, "mesh", "ny", cfg.ny);
    cfg.grading = get_num(m, "mesh", "grading", cfg.grading);
    cfg.triangles = get_bool(m, "mesh", "triangles", cfg.triangles);
    if (cfg.nx < 1 || cfg.ny < 1) bad("mesh", "nx and ny must be >= 1");
    if (!(cfg.grading > 0.0) || cfg.grading > 1.0) bad("mesh.grading", "must be in (0,1]");
  }
  if (root.contains("family")) {
    if (!root["family"].is_string()) bad("family", "expected a string");
    cfg.family = family_from_string(root["family"].get<std::string>());
  }
  if (root.contains("problem")) {
    const json& p = root["problem"];
    reject_unknown(p, "problem",
                   {"case", "conductivity", "conduit_conductivity", "exchange", "interface_value",
                    "matrix_source", "conduit_source", "permeability", "viscosity", "gravity",
                    "conduit_width"});
    const std::string kind = get_str(p, "problem", "case", "smooth-decoupled");
    if (kind == "layered")
      cfg.problem_kind = RunConfig::ProblemKind::Layered;
    else if (kind == "smooth-decoupled")
      cfg.problem_kind = RunConfig::ProblemKind::SmoothDecoupled;
    else if (kind == "direct")
      cfg.problem_kind = RunConfig::ProblemKind::Direct;
    else
      bad("problem.case", "expected layered | smooth-decoupled | direct");
    cfg.conductivity = get_num(p, "problem", "conductivity", cfg.conductivity);
    cfg.conduit_conductivity =
        get_num(p, "problem", "conduit_conductivity", cfg.conduit_conductivity);
    // Physical inputs, if given, derive both conductivities.
    if (p.contains("permeability") || p.contains("viscosity") || p.contains("gravity") ||
        p.contains("conduit_width")) {
      for (const char* key : {"permeability", "viscosity", "gravity", "conduit_width"})
        if (!p.contains(key)) bad(std::string("problem.") + key, "all physical inputs are needed");
      const ProblemData derived = ProblemData::from_physical(
          get_num(p, "problem", "permeability", 0.0), get_num(p, "problem", "viscosity", 0.0),
          get_num(p, "problem", "gravity", 0.0), get_num(p, "problem", "conduit_width", 0.0), 0.0);
      cfg.conductivity = derived.conductivity;
      cfg.conduit_conductivity = derived.conduit_conductivity;
    }
    cfg.exchange = get_num(p, "problem", "exchange", cfg.exchange);
    cfg.interface_value = get_num(p, "problem", "interface_value", cfg.interface_value);
    cfg.matrix_source_const = get_num(p, "problem", "matrix_source", 0.0);
    cfg.conduit_source_const = get_num(p, "problem", "conduit_source", 0.0);
    if (cfg.conductivity <= 0.0) bad("problem.conductivity", "must be positive");
    if (cfg.conduit_conductivity <= 0.0) bad("problem.conduit_conductivity", "must be positive");
    if (cfg.exchange < 0.0) bad("problem.exchange", "must be >= 0");
    if (cfg.problem_kind == RunConfig::ProblemKind::SmoothDecoupled && cfg.exchange != 0.0)
      bad("problem.exchange", "smooth-decoupled case requires exchange = 0");
  }
  if (root.contains("estimator")) {
    const json& e = root["estimator"];
    reject_unknown(e, "estimator", {"isotropic"});
    cfg.isotropic_estimator = get_bool(e, "estimator", "isotropic", false);
  }
  if (root.contains("solver")) {
    const json& s = root["solver"];
    reject_unknown(s, "solver", {"method", "tolerance", "max_iterations", "jacobi", "export_matrix"});
    const std::string method = get_str(s, "solver", "method", "cg");
    if (method == "cg")
      cfg.solver.method = SolverConfig::Method::ConjugateGradient;
    else if (method == "direct")
      cfg.solver.method = SolverConfig::Method::DenseDirect;
    else
      bad("solver.method", "expected cg | direct");
    cfg.solver.rel_tol = get_num(s, "solver", "tolerance", cfg.solver.rel_tol);
    cfg.solver.max_iterations = get_int(s, "solver", "max_iterations", cfg.solver.max_iterations);
    cfg.solver.jacobi = get_bool(s, "solver", "jacobi", cfg.solver.jacobi);
    cfg.export_matrix = get_str(s, "solver", "export_matrix", "");
    cfg.solver.validate();
  }
  if (root.contains("adapt")) {
    const json& a = root["adapt"];
    reject_unknown(a, "adapt", {"max_levels", "marking_fraction"});
    cfg.adapt_max_levels = get_int(a, "adapt", "max_levels", cfg.adapt_max_levels);
    cfg.marking_fraction = get_num(a, "adapt", "marking_fraction", cfg.marking_fraction);
    if (cfg.adapt_max_levels < 1) bad("adapt.max_levels", "must be >= 1");
    if (!(cfg.marking_fraction > 0.0) || cfg.marking_fraction > 1.0)
      bad("adapt.marking_fraction", "must be in (0,1]");
  }
  if (root.contains("study")) {
    const json& st = root["study"];
    reject_unknown(st, "study", {"levels"});
    cfg.study_levels = get_int(st, "study", "levels", cfg.study_levels);
    if (cfg.study_levels < 2) bad("study.levels", "need at least two levels");
  }
  if (root.contains("output")) {
    if (!root["output"].is_string()) bad("output", "expected a string");
    cfg.output_dir = root["output"].get<std::string>();
  }
  if (root.contains("seed")) {
    if (!root["seed"].is_number_integer()) bad("seed", "expected an integer");
    cfg.seed = root["seed"].get<std::uint64_t>();
  }

  // Family/mesh shape consistency.
  const bool tri_family = ReferenceElement::get(cfg.family).shape == CellShape::Triangle;
  if (tri_family != cfg.triangles)
    bad("family", std::string("family ") + family_to_string(cfg.family) +
                      (tri_family ? " needs mesh.triangles = true" : " needs mesh.triangles = false"));
  return cfg;
}

}  // namespace karst
