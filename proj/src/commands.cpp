#include "karst/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "json.hpp"
#include "karst/assembly.hpp"
#include "karst/estimator.hpp"
#include "karst/norms.hpp"
#include "karst/properties.hpp"
#include "karst/study.hpp"

namespace karst {

namespace {

namespace fs = std::filesystem;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
}

fs::path ensure_outdir(const RunConfig& cfg) {
  fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  return dir;
}

struct SolveResult {
  FeFunction u_h;
  SolveReport report;
  SparseSystem system;
};

SolveResult run_solve(const RunConfig& cfg, const DofMap& dm) {
  const ProblemData data = cfg.problem_data();
  const bool nonconforming = !dm.reference().conforming;
  SolveResult out;
  out.system = assemble_system(dm, data, nonconforming);
  const ReducedSystem red = apply_dirichlet(out.system, dm);
  const Eigen::VectorXd x = solve(red, cfg.solver, &out.report);
  out.u_h = FeFunction::from_full_vector(dm, red.expand(x));
  return out;
}

nlohmann::json solution_json(const FeFunction& u_h, const SolveReport& rep) {
  const DofMap& dm = *u_h.dofmap;
  std::vector<double> mc(u_h.matrix_coeffs.data(), u_h.matrix_coeffs.data() + dm.matrix_dof_count());
  std::vector<double> cc(u_h.conduit_coeffs.data(),
                         u_h.conduit_coeffs.data() + dm.conduit_dof_count());
  return {{"family", family_to_string(dm.family())},
          {"matrix_dofs", dm.matrix_dof_count()},
          {"conduit_dofs", dm.conduit_dof_count()},
          {"matrix_coeffs", mc},
          {"conduit_coeffs", cc},
          {"solver",
           {{"method", rep.method},
            {"iterations", rep.iterations},
            {"residual", rep.final_residual}}}};
}

EstimatorReport run_estimate(const RunConfig& cfg, const FeFunction& u_h) {
  const DofMap& dm = *u_h.dofmap;
  const ProblemData data = cfg.problem_data();
  const int deg = assembly_quad_degree(cfg.family);
  const ProjectedData proj = project_data(data, dm.mesh(), deg + 4);
  EstimatorReport rep = estimate(u_h, data, proj,
                                 make_mode(!dm.reference().conforming, cfg.isotropic_estimator));
  if (cfg.has_exact_solution()) {
    const ManufacturedCase mc = cfg.manufactured_case();
    rep.alignment = alignment_measure(
        dm.mesh(),
        [&](int elem, const Vec2& ref, const Vec2& p) {
          return Vec2(mc.exact_matrix_gradient(p.x(), p.y()) - u_h.gradient(elem, ref));
        },
        deg);
    rep.alignment_field = "u - u_h";
  }
  return rep;
}

bool touches_conduit(const Mesh& mesh, int elem) {
  const Element& el = mesh.elements[elem];
  for (int j = 0; j < el.vertex_count(); ++j)
    if (mesh.vertices[el.v[j]].y() == 0.0) return true;
  return false;
}

std::vector<int> mark_bulk(const EstimatorReport& rep, double fraction) {
  std::vector<std::pair<double, int>> by_theta;
  double total = 0.0;
  for (int k = 0; k < static_cast<int>(rep.local.size()); ++k) {
    by_theta.push_back({rep.local[k].theta_sq(), k});
    total += rep.local[k].theta_sq();
  }
  std::sort(by_theta.begin(), by_theta.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<int> marked;
  double acc = 0.0;
  for (const auto& [theta_sq, k] : by_theta) {
    if (acc >= fraction * total && !marked.empty()) break;
    marked.push_back(k);
    acc += theta_sq;
  }
  return marked;
}

}  // namespace

int cmd_mesh(const RunConfig& cfg) {
  const fs::path dir = ensure_outdir(cfg);
  const Mesh mesh = cfg.build_mesh();
  mesh.validate();
  write_text(dir / "mesh.json", mesh_to_json(mesh));

  const MeshAssumptionReport rep = check_mesh_assumptions(mesh);
  nlohmann::json diag{{"max_vertex_valence", rep.max_vertex_valence},
                      {"max_size_ratio", rep.max_size_ratio},
                      {"max_edge_height_ratio", rep.max_edge_height_ratio},
                      {"ratio_ok", rep.ratio_ok},
                      {"valence_ok", rep.valence_ok}};
  write_text(dir / "mesh_diagnostics.json", diag.dump(2));
  std::cout << "mesh: " << mesh.elements.size() << " elements, " << mesh.edges.size()
            << " edges, " << mesh.conduit_edges.size() << " conduit edges\n";
  return 0;
}

int cmd_solve(const RunConfig& cfg) {
  const fs::path dir = ensure_outdir(cfg);
  const Mesh mesh = cfg.build_mesh();
  const DofMap dm(mesh, cfg.family);
  const SolveResult sol = run_solve(cfg, dm);
  write_text(dir / "solution.json", solution_json(sol.u_h, sol.report).dump(2));
  if (!cfg.export_matrix.empty()) {
    std::ofstream os(dir / cfg.export_matrix);
    write_matrix_market(os, sol.system.matrix);
  }
  std::cout << "solve: " << dm.total_dof_count() << " dofs, " << sol.report.method << " "
            << sol.report.iterations << " iterations, residual " << sol.report.final_residual
            << "\n";
  return 0;
}

int cmd_estimate(const RunConfig& cfg) {
  const fs::path dir = ensure_outdir(cfg);
  const Mesh mesh = cfg.build_mesh();
  const DofMap dm(mesh, cfg.family);
  const SolveResult sol = run_solve(cfg, dm);
  const EstimatorReport rep = run_estimate(cfg, sol.u_h);
  write_text(dir / "solution.json", solution_json(sol.u_h, sol.report).dump(2));
  write_text(dir / "estimator.json", rep.to_json());
  write_text(dir / "estimator.csv", rep.to_csv());
  std::cout << "estimate: theta " << rep.total_theta << ", zeta " << rep.total_zeta << "\n";
  return 0;
}

int cmd_adapt(const RunConfig& cfg) {
  const fs::path dir = ensure_outdir(cfg);
  Mesh rect = build_graded_mesh(cfg.geometry, cfg.nx, cfg.ny,
                                cfg.grading == 1.0 ? Grading::uniform()
                                                   : Grading::geometric(cfg.grading));
  nlohmann::json levels = nlohmann::json::array();
  std::string final_mesh_json, final_est_json, final_est_csv;

  for (int level = 0; level < cfg.adapt_max_levels; ++level) {
    const Mesh mesh = cfg.triangles ? split_to_triangles(rect) : rect;
    const DofMap dm(mesh, cfg.family);
    const SolveResult sol = run_solve(cfg, dm);
    const EstimatorReport rep = run_estimate(cfg, sol.u_h);

    const std::vector<int> marked = mark_bulk(rep, cfg.marking_fraction);
    int on_conduit = 0;
    for (int k : marked) on_conduit += touches_conduit(mesh, k) ? 1 : 0;
    const double conduit_fraction =
        marked.empty() ? 0.0 : static_cast<double>(on_conduit) / marked.size();

    nlohmann::json rec{{"level", level},
                       {"elements", static_cast<int>(mesh.elements.size())},
                       {"dofs", dm.total_dof_count()},
                       {"theta", rep.total_theta},
                       {"zeta", rep.total_zeta},
                       {"marked", static_cast<int>(marked.size())},
                       {"marked_conduit_fraction", conduit_fraction}};
    if (cfg.has_exact_solution()) {
      const ManufacturedCase mc = cfg.manufactured_case();
      rec["error"] = error_norm(sol.u_h, mc, !dm.reference().conforming,
                                assembly_quad_degree(cfg.family) + 2);
    }
    levels.push_back(rec);
    std::cout << "adapt level " << level << ": " << mesh.elements.size() << " elements, theta "
              << rep.total_theta << ", marked " << marked.size() << " (conduit fraction "
              << conduit_fraction << ")\n";

    if (level == cfg.adapt_max_levels - 1) {
      final_mesh_json = mesh_to_json(mesh);
      final_est_json = rep.to_json();
      final_est_csv = rep.to_csv();
      break;
    }
    std::vector<int> rect_marked;
    if (cfg.triangles) {
      std::set<int> parents;
      for (int k : marked) parents.insert(mesh.triangle_parent[k]);
      rect_marked.assign(parents.begin(), parents.end());
    } else {
      rect_marked = marked;
    }
    rect = refine(rect, rect_marked);
  }

  write_text(dir / "adapt.json", nlohmann::json{{"levels", levels}}.dump(2));
  write_text(dir / "mesh.json", final_mesh_json);
  write_text(dir / "estimator.json", final_est_json);
  write_text(dir / "estimator.csv", final_est_csv);
  return 0;
}

int cmd_verify(const RunConfig& cfg) {
  const fs::path dir = ensure_outdir(cfg);

  PropertyConfig pcfg;
  pcfg.seed = cfg.seed;
  const PropertyReport props = property_suites(pcfg);
  write_text(dir / "properties.json", props.to_json());
  for (const auto& s : props.suites)
    std::cout << (s.passed ? "PASS " : "FAIL ") << s.name << "\n";

  // Convergence study on uniform refinements of the configured mesh.
  const ManufacturedCase mc = cfg.has_exact_solution()
                                  ? cfg.manufactured_case()
                                  : make_smooth_decoupled_case(cfg.geometry, cfg.conductivity,
                                                               cfg.conduit_conductivity);
  std::vector<Mesh> meshes{cfg.build_mesh()};
  for (int l = 1; l < cfg.study_levels; ++l) meshes.push_back(refine_all(meshes.back()));
  StudyOptions opts;
  opts.solver = cfg.solver;
  opts.isotropic = cfg.isotropic_estimator;
  const std::vector<StudyLevel> levels = run_study(mc, cfg.family, meshes, opts);
  write_text(dir / "study.csv", study_to_csv(levels));
  write_text(dir / "study.json", study_to_json(levels));
  std::cout << "study: final error " << levels.back().error << ", rate "
            << levels.back().error_rate << ", effectivity " << levels.back().effectivity << "\n";

  if (!props.all_passed()) {
    nlohmann::json failures = nlohmann::json::array();
    for (const auto& s : props.suites)
      for (const auto& c : s.checks)
        if (!c.passed)
          failures.push_back({{"suite", s.name},
                              {"check", c.name},
                              {"value", c.value},
                              {"relation", c.relation},
                              {"bound", c.bound}});
    write_text(dir / "failures.json", failures.dump(2));
    std::cerr << "verify: " << failures.size() << " failed checks (see failures.json)\n";
    return 1;
  }
  return 0;
}

}  // namespace karst
