#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "karst/assembly.hpp"
#include "karst/commands.hpp"
#include "karst/estimator.hpp"
#include "karst/norms.hpp"
#include "karst/properties.hpp"
#include "karst/study.hpp"

namespace py = pybind11;
using namespace karst;

namespace {

Mesh make_mesh(double length, double half_height, int nx, int ny, double grading,
               bool triangles) {
  const DomainGeometry geom{length, half_height};
  Mesh m = build_graded_mesh(geom, nx, ny,
                             grading == 1.0 ? Grading::uniform() : Grading::geometric(grading));
  if (triangles) m = split_to_triangles(m);
  return m;
}

ManufacturedCase case_from_kwargs(const DomainGeometry& geom, const std::string& name,
                                  double conductivity, double conduit_conductivity,
                                  double exchange, double interface_value) {
  if (name == "smooth-decoupled")
    return make_smooth_decoupled_case(geom, conductivity, conduit_conductivity);
  if (name == "layered")
    return make_layered_case(geom, conductivity, conduit_conductivity, exchange, interface_value);
  throw std::invalid_argument("unknown case: " + name);
}

py::dict level_to_dict(const StudyLevel& r) {
  py::dict d;
  d["level"] = r.level;
  d["elements"] = r.elements;
  d["dofs"] = r.dofs;
  d["error"] = r.error;
  d["theta"] = r.theta;
  d["zeta"] = r.zeta;
  d["alignment_error"] = r.alignment_error;
  d["effectivity"] = r.effectivity;
  d["reliability_const"] = r.reliability_const;
  d["max_local_efficiency"] = r.max_local_efficiency;
  d["error_rate"] = r.error_rate;
  d["theta_rate"] = r.theta_rate;
  d["solver_iterations"] = r.solver_iterations;
  return d;
}

}  // namespace

PYBIND11_MODULE(_karst, m) {
  m.doc() = "Coupled matrix/conduit flow solver with residual error estimation";

  py::class_<Mesh>(m, "Mesh")
      .def_property_readonly("num_elements",
                             [](const Mesh& mesh) { return mesh.elements.size(); })
      .def_property_readonly("num_vertices", [](const Mesh& mesh) { return mesh.vertices.size(); })
      .def_property_readonly("num_edges", [](const Mesh& mesh) { return mesh.edges.size(); })
      .def_property_readonly("num_conduit_edges",
                             [](const Mesh& mesh) { return mesh.conduit_edges.size(); })
      .def_property_readonly("triangular", [](const Mesh& mesh) { return mesh.is_triangular(); })
      .def("total_area", &Mesh::total_area)
      .def("max_aspect_ratio",
           [](const Mesh& mesh) {
             double worst = 1.0;
             for (const Element& el : mesh.elements)
               worst = std::max(worst, el.anisotropy.len_long / el.anisotropy.len_short);
             return worst;
           })
      .def("validate", &Mesh::validate)
      .def("refine_all", [](const Mesh& mesh) { return refine_all(mesh); })
      .def("to_json", [](const Mesh& mesh) { return mesh_to_json(mesh); });

  m.def("build_mesh", &make_mesh, py::arg("length") = 1.0, py::arg("half_height") = 1.0,
        py::arg("nx") = 8, py::arg("ny") = 8, py::arg("grading") = 1.0,
        py::arg("triangles") = false, "Tensor-product mesh with geometric grading towards y=0");

  m.def("mesh_from_json", &mesh_from_json);

  m.def(
      "graded_mesh_for_aspect",
      [](double length, double half_height, int nx, double aspect) {
        return graded_mesh_for_aspect({length, half_height}, nx, aspect);
      },
      py::arg("length") = 1.0, py::arg("half_height") = 1.0, py::arg("nx") = 4,
      py::arg("aspect") = 10.0);

  m.def(
      "solve_case",
      [](const Mesh& mesh, const std::string& family, const std::string& case_name,
         double conductivity, double conduit_conductivity, double exchange,
         double interface_value, bool isotropic) {
        const ManufacturedCase mc =
            case_from_kwargs(mesh.geometry, case_name, conductivity, conduit_conductivity,
                             exchange, interface_value);
        const DofMap dm(mesh, family_from_string(family));
        StudyOptions opts;
        opts.isotropic = isotropic;
        opts.solver.jacobi = true;
        const LevelSolution sol = solve_level(mc, dm, opts);
        const bool nc = !dm.reference().conforming;
        py::dict out;
        out["dofs"] = dm.total_dof_count();
        out["theta"] = sol.report.total_theta;
        out["zeta"] = sol.report.total_zeta;
        out["error"] = error_norm(sol.u_h, mc, nc, assembly_quad_degree(dm.family()) + 2);
        out["iterations"] = sol.solving.iterations;
        out["residual"] = sol.solving.final_residual;
        std::vector<double> theta_k;
        for (int k = 0; k < static_cast<int>(mesh.elements.size()); ++k)
          theta_k.push_back(sol.report.theta_k(k));
        out["theta_k"] = theta_k;
        return out;
      },
      py::arg("mesh"), py::arg("family") = "q1", py::arg("case_name") = "smooth-decoupled",
      py::arg("conductivity") = 1.0, py::arg("conduit_conductivity") = 1.0,
      py::arg("exchange") = 0.0, py::arg("interface_value") = 1.0, py::arg("isotropic") = false,
      "Solve a manufactured case and return the error/estimator summary");

  m.def(
      "run_study",
      [](const std::string& family, const std::string& case_name, int levels, int nx, int ny,
         double grading, bool triangles, double exchange, double interface_value) {
        Mesh base = make_mesh(1.0, 1.0, nx, ny, grading, triangles);
        std::vector<Mesh> meshes{base};
        for (int l = 1; l < levels; ++l) meshes.push_back(refine_all(meshes.back()));
        const ManufacturedCase mc =
            case_from_kwargs(base.geometry, case_name, 1.0, 1.0, exchange, interface_value);
        StudyOptions opts;
        opts.solver.jacobi = true;
        const auto records = run_study(mc, family_from_string(family), meshes, opts);
        py::list out;
        for (const auto& r : records) out.append(level_to_dict(r));
        return out;
      },
      py::arg("family") = "q1", py::arg("case_name") = "smooth-decoupled", py::arg("levels") = 3,
      py::arg("nx") = 4, py::arg("ny") = 4, py::arg("grading") = 1.0,
      py::arg("triangles") = false, py::arg("exchange") = 0.0, py::arg("interface_value") = 1.0);

  m.def(
      "alignment_measure",
      [](const Mesh& mesh, double gx, double gy) {
        return alignment_measure(
            mesh, [gx, gy](const Vec2&) { return Vec2(gx, gy); }, 4);
      },
      py::arg("mesh"), py::arg("grad_x"), py::arg("grad_y"),
      "Alignment measure of a constant-gradient field");

  m.def(
      "property_suites",
      [](std::uint64_t seed) {
        PropertyConfig cfg;
        cfg.seed = seed;
        const PropertyReport rep = property_suites(cfg);
        py::dict out;
        out["passed"] = rep.all_passed();
        py::list suites;
        for (const auto& s : rep.suites) {
          py::dict sd;
          sd["name"] = s.name;
          sd["passed"] = s.passed;
          py::list checks;
          for (const auto& c : s.checks) {
            py::dict cd;
            cd["name"] = c.name;
            cd["value"] = c.value;
            cd["relation"] = c.relation;
            cd["bound"] = c.bound;
            cd["passed"] = c.passed;
            checks.append(cd);
          }
          sd["checks"] = checks;
          suites.append(sd);
        }
        out["suites"] = suites;
        return out;
      },
      py::arg("seed") = 42);

  m.def("unisolvence_deviation", [](const std::string& family) {
    const ReferenceElement& ref = ReferenceElement::get(family_from_string(family));
    const Eigen::MatrixXd u = ref.unisolvence_matrix();
    return (u - Eigen::MatrixXd::Identity(ref.size(), ref.size())).cwiseAbs().maxCoeff();
  });
}
