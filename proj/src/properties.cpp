#include "karst/properties.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "json.hpp"
#include "karst/assembly.hpp"
#include "karst/clement.hpp"
#include "karst/estimator.hpp"
#include "karst/norms.hpp"
#include "karst/quadrature.hpp"
#include "karst/solver.hpp"
#include "karst/study.hpp"

namespace karst {

void SuiteResult::add(const std::string& check_name, double value, const std::string& relation,
                      double bound) {
  PropertyCheck c;
  c.name = check_name;
  c.value = value;
  c.bound = bound;
  c.relation = relation;
  c.passed = relation == "<=" ? (value <= bound) : (value >= bound);
  passed = passed && c.passed;
  checks.push_back(c);
}

bool PropertyReport::all_passed() const {
  for (const auto& s : suites)
    if (!s.passed) return false;
  return true;
}

std::string PropertyReport::to_json() const {
  nlohmann::json suites_json = nlohmann::json::array();
  for (const auto& s : suites) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : s.checks)
      checks.push_back({{"name", c.name},
                        {"value", c.value},
                        {"relation", c.relation},
                        {"bound", c.bound},
                        {"passed", c.passed}});
    suites_json.push_back({{"name", s.name}, {"passed", s.passed}, {"checks", checks}});
  }
  return nlohmann::json{{"passed", all_passed()}, {"suites", suites_json}}.dump(2);
}

namespace {

constexpr double kAspects[] = {1.0, 10.0, 100.0, 1000.0};

double spread(const std::vector<double>& values) {
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return *lo > 0.0 ? *hi / *lo : 1e300;
}

FeFunction random_conforming_field(const DofMap& dm, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  FeFunction f = FeFunction::zeros(dm);
  const auto v2d = vertex_dof_map(dm);
  const Mesh& mesh = dm.mesh();
  for (size_t v = 0; v < mesh.vertices.size(); ++v)
    f.matrix_coeffs[v2d[v]] = mesh.boundary_vertex[v] ? 0.0 : unit(rng);
  return f;
}

ManufacturedCase kinked_case(const DomainGeometry& geom) {
  return make_layered_case(geom, 1.0, 1.0, 1.0, /*interface_value=*/2.0);
}

}  // namespace

SuiteResult suite_unisolvence() {
  SuiteResult suite;
  suite.name = "unisolvence";
  for (FamilyTag tag : {FamilyTag::P1Tri, FamilyTag::P2Tri, FamilyTag::P3Tri, FamilyTag::Q1Rect,
                        FamilyTag::Q2Rect, FamilyTag::Q3Rect, FamilyTag::CR1Tri,
                        FamilyTag::CR2RectQ1plus, FamilyTag::CR3RectP2}) {
    const ReferenceElement& ref = ReferenceElement::get(tag);
    const Eigen::MatrixXd u = ref.unisolvence_matrix();
    const double dev =
        (u - Eigen::MatrixXd::Identity(ref.size(), ref.size())).cwiseAbs().maxCoeff();
    suite.add(family_to_string(tag) + "_identity_deviation", dev, "<=", 1e-12);
  }
  return suite;
}

SuiteResult suite_cr_property(std::uint64_t seed) {
  SuiteResult suite;
  suite.name = "cr_property";
  const DomainGeometry geom;
  const Mesh rect = build_graded_mesh(geom, 3, 3, Grading::geometric(0.5));
  const Mesh tri = split_to_triangles(rect);

  // Basis level: every global basis function has a zero-mean jump on every
  // edge it touches.
  for (FamilyTag tag : {FamilyTag::CR1Tri, FamilyTag::CR2RectQ1plus, FamilyTag::CR3RectP2}) {
    const Mesh& mesh = tag == FamilyTag::CR1Tri ? tri : rect;
    const DofMap dm(mesh, tag);
    double worst = 0.0;
    for (int ge = 0; ge < static_cast<int>(mesh.edges.size()); ++ge) {
      const Edge& e = mesh.edges[ge];
      std::vector<int> dofs;
      for (int elem : {e.elem_front, e.elem_back}) {
        if (elem < 0) continue;
        for (int d : dm.cell_dofs(elem))
          if (!dm.matrix_dof_constrained(d)) dofs.push_back(d);  // members of V_h only
      }
      std::sort(dofs.begin(), dofs.end());
      dofs.erase(std::unique(dofs.begin(), dofs.end()), dofs.end());
      FeFunction f = FeFunction::zeros(dm);
      for (int d : dofs) {
        f.matrix_coeffs.setZero();
        f.matrix_coeffs[d] = 1.0;
        double mean = 0.0;
        for (const auto& q : edge_rule(2 * dm.reference().degree + 2))
          mean += q.w * e.length * jump_value(f, ge, q.x);
        worst = std::max(worst, std::abs(mean) / e.length);
      }
    }
    suite.add(family_to_string(tag) + "_basis_mean_jump", worst, "<=", 1e-12);
  }

  // Solved level: mean jumps of actual discrete solutions.
  (void)seed;
  const ManufacturedCase mc = kinked_case(geom);
  for (FamilyTag tag : {FamilyTag::CR1Tri, FamilyTag::CR2RectQ1plus, FamilyTag::CR3RectP2}) {
    Mesh mesh = build_graded_mesh(geom, 4, 4, Grading::geometric(0.5));
    if (tag == FamilyTag::CR1Tri) mesh = split_to_triangles(mesh);
    const DofMap dm(mesh, tag);
    StudyOptions opts;
    opts.solver.rel_tol = 1e-12;
    opts.solver.jacobi = true;
    const LevelSolution sol = solve_level(mc, dm, opts);
    const double scale = sol.u_h.matrix_l2_norm();
    double worst = 0.0;
    for (int ge = 0; ge < static_cast<int>(mesh.edges.size()); ++ge) {
      const Edge& e = mesh.edges[ge];
      double mean = 0.0;
      for (const auto& q : edge_rule(2 * dm.reference().degree + 2))
        mean += q.w * e.length * jump_value(sol.u_h, ge, q.x);
      worst = std::max(worst, std::abs(mean) / (e.length * scale));
    }
    suite.add(family_to_string(tag) + "_solution_mean_jump", worst, "<=", 1e-10);
  }
  return suite;
}

SuiteResult suite_inverse_inequalities(std::uint64_t seed) {
  SuiteResult suite;
  suite.name = "inverse_inequalities";
  std::mt19937_64 rng(seed ^ 0x1bbf00d5u);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const int n_polys = 100;
  const int quad_deg = 12;

  for (CellShape shape : {CellShape::Rectangle, CellShape::Triangle}) {
    // Per-aspect extremes of the five ratios.
    std::vector<double> r1_min, r1_max, r2_max, r3_min, r3_max, r4_max, r5_max;
    for (double aspect : kAspects) {
      DomainGeometry geom;
      geom.length = 1.0;
      geom.half_height = 1.0 / aspect;
      Mesh mesh = build_graded_mesh(geom, 1, 1, Grading::uniform());
      if (shape == CellShape::Triangle) mesh = split_to_triangles(mesh);
      const int elem = shape == CellShape::Triangle ? 2 : 1;  // a cell of the upper half
      const Element& el = mesh.elements[elem];
      const double h_short = el.anisotropy.min_length();
      const AffineMap map = element_map(mesh, elem, clement_family(mesh));
      const auto cell_q = reference_rule(shape, quad_deg);
      const auto e_q = edge_rule(quad_deg);

      double lo1 = 1e300, hi1 = 0.0, hi2 = 0.0, lo3 = 1e300, hi3 = 0.0, hi4 = 0.0, hi5 = 0.0;
      for (int trial = 0; trial < n_polys; ++trial) {
        // Random P2 polynomial in the element's reference coordinates.
        Poly2 v;
        for (int d = 0; d <= 2; ++d)
          for (int px = d; px >= 0; --px) v += Poly2::monomial(px, d - px, unit(rng));

        double n_v = 0.0, n_vb = 0.0, n_grad = 0.0;
        for (const auto& q : cell_q) {
          const double w = q.w * std::abs(map.det);
          const double val = v(q.xy);
          const double b = element_bubble(shape, q.xy);
          n_v += w * val * val;
          n_vb += w * val * val * b;
          // grad(v * b^(1/2)) in physical coordinates.
          const Vec2 g_ref =
              v.gradient(q.xy) * std::sqrt(b) +
              val * 0.5 / std::sqrt(b) * element_bubble_gradient(shape, q.xy);
          n_grad += w * map.push_gradient(g_ref).squaredNorm();
        }
        lo1 = std::min(lo1, std::sqrt(n_vb / n_v));
        hi1 = std::max(hi1, std::sqrt(n_vb / n_v));
        hi2 = std::max(hi2, std::sqrt(n_grad / n_v) * h_short);

        // Edge ratios on every edge of the cell.
        std::vector<double> e_coef(3);
        for (double& c : e_coef) c = unit(rng);
        const Poly1 ve({e_coef[0], e_coef[1], e_coef[2]});
        for (int j = 0; j < el.vertex_count(); ++j) {
          const int ge = mesh.element_edges[elem][j];
          const Edge& edge = mesh.edges[ge];
          const AffineMap amap = edge_adapted_map(mesh, ge, elem);
          const double h_ek = mesh.edge_height(ge, elem);

          double ne_v = 0.0, ne_vb = 0.0;
          for (const auto& q : e_q) {
            const double val = ve(q.x);
            const double b = edge_bubble(shape, Vec2(q.x, 0.0));
            ne_v += q.w * edge.length * val * val;
            ne_vb += q.w * edge.length * val * val * b;
          }
          lo3 = std::min(lo3, std::sqrt(ne_vb / ne_v));
          hi3 = std::max(hi3, std::sqrt(ne_vb / ne_v));

          double n_ext = 0.0, n_ext_grad = 0.0;
          for (const auto& q : cell_q) {
            const double w = q.w * std::abs(amap.det);
            const double b = edge_bubble(shape, q.xy);
            const double val = ve(q.xy.x());
            n_ext += w * val * val * b * b;
            const Vec2 g_ref = Vec2(ve.derivative(q.xy.x()) * b, 0.0) +
                               val * edge_bubble_gradient(shape, q.xy);
            n_ext_grad += w * amap.push_gradient(g_ref).squaredNorm();
          }
          hi4 = std::max(hi4, std::sqrt(n_ext) / (std::sqrt(h_ek) * std::sqrt(ne_v)));
          hi5 = std::max(hi5,
                         std::sqrt(n_ext_grad) * h_short / (std::sqrt(h_ek) * std::sqrt(ne_v)));
        }
      }
      r1_min.push_back(lo1);
      r1_max.push_back(hi1);
      r2_max.push_back(hi2);
      r3_min.push_back(lo3);
      r3_max.push_back(hi3);
      r4_max.push_back(hi4);
      r5_max.push_back(hi5);
    }

    const std::string p = shape == CellShape::Rectangle ? "rect_" : "tri_";
    suite.add(p + "r1_lower", *std::min_element(r1_min.begin(), r1_min.end()), ">=", 0.05);
    suite.add(p + "r1_upper", *std::max_element(r1_max.begin(), r1_max.end()), "<=", 1.0 + 1e-12);
    suite.add(p + "r3_lower", *std::min_element(r3_min.begin(), r3_min.end()), ">=", 0.05);
    suite.add(p + "r3_upper", *std::max_element(r3_max.begin(), r3_max.end()), "<=", 1.0 + 1e-12);
    suite.add(p + "r1_lower_spread", spread(r1_min), "<=", 10.0);
    suite.add(p + "r2_spread", spread(r2_max), "<=", 10.0);
    suite.add(p + "r3_lower_spread", spread(r3_min), "<=", 10.0);
    suite.add(p + "r4_spread", spread(r4_max), "<=", 10.0);
    suite.add(p + "r5_spread", spread(r5_max), "<=", 10.0);
  }
  return suite;
}

namespace {

// Coarse cell -> nested fine cells, by fine-centroid location.
std::vector<std::vector<int>> nested_cells(const Mesh& coarse, const Mesh& fine) {
  std::vector<std::vector<int>> map(coarse.elements.size());
  for (int kf = 0; kf < static_cast<int>(fine.elements.size()); ++kf)
    map[coarse.locate(fine.element_centroid(kf))].push_back(kf);
  return map;
}

// Coarse edge -> fine edges covering it (midpoint-on-segment test).
std::vector<std::vector<int>> nested_edges(const Mesh& coarse, const Mesh& fine) {
  std::vector<std::vector<int>> map(coarse.edges.size());
  for (int ef = 0; ef < static_cast<int>(fine.edges.size()); ++ef) {
    const Vec2 m = fine.edge_point(ef, 0.5);
    for (int ec = 0; ec < static_cast<int>(coarse.edges.size()); ++ec) {
      const Vec2 a = coarse.vertices[coarse.edges[ec].v[0]];
      const Vec2 b = coarse.vertices[coarse.edges[ec].v[1]];
      const Vec2 ab = b - a;
      const double t = (m - a).dot(ab) / ab.squaredNorm();
      if (t < -1e-12 || t > 1.0 + 1e-12) continue;
      if ((m - (a + t * ab)).norm() < 1e-12 * (1.0 + ab.norm())) {
        map[ec].push_back(ef);
        break;
      }
    }
  }
  return map;
}

struct ClementTestRig {
  Mesh coarse, fine;
  std::vector<std::vector<int>> cells;  // coarse cell -> fine cells
  std::vector<std::vector<int>> edges;  // coarse edge -> fine edges
  std::vector<int> fine_to_coarse;      // fine cell -> coarse cell
};

ClementTestRig make_rig(bool triangles, double aspect) {
  ClementTestRig rig;
  DomainGeometry geom;
  Mesh coarse = graded_mesh_for_aspect(geom, 4, aspect);
  Mesh fine = refine_all(refine_all(coarse));
  if (triangles) {
    coarse = split_to_triangles(coarse);
    fine = split_to_triangles(fine);
  }
  rig.coarse = std::move(coarse);
  rig.fine = std::move(fine);
  rig.cells = nested_cells(rig.coarse, rig.fine);
  rig.edges = nested_edges(rig.coarse, rig.fine);
  rig.fine_to_coarse.assign(rig.fine.elements.size(), -1);
  for (int kc = 0; kc < static_cast<int>(rig.cells.size()); ++kc)
    for (int kf : rig.cells[kc]) rig.fine_to_coarse[kf] = kc;
  return rig;
}

}  // namespace

SuiteResult suite_clement_estimates(std::uint64_t seed) {
  SuiteResult suite;
  suite.name = "clement_estimates";
  const int n_fields = 50;
  const int quad_deg = 4;

  for (bool triangles : {false, true}) {
    std::vector<double> c1_per_aspect, c2_per_aspect;
    for (double aspect : kAspects) {
      const ClementTestRig rig = make_rig(triangles, aspect);
      const DofMap dm_fine(rig.fine, clement_family(rig.fine));
      const DofMap dm_coarse(rig.coarse, clement_family(rig.coarse));
      const FamilyTag fam_c = clement_family(rig.coarse);
      const FamilyTag fam_f = clement_family(rig.fine);
      std::mt19937_64 rng(seed ^ (triangles ? 0xabcdefull : 0x123456ull) ^
                          static_cast<std::uint64_t>(aspect));

      double worst1 = 0.0, worst2 = 0.0;
      for (int trial = 0; trial < n_fields; ++trial) {
        const FeFunction v = random_conforming_field(dm_fine, rng);

        // Patch means over coarse vertex patches, integrating per fine cell.
        std::vector<double> integral(rig.coarse.vertices.size(), 0.0);
        std::vector<double> area(rig.coarse.vertices.size(), 0.0);
        std::vector<double> cell_integral(rig.coarse.elements.size(), 0.0);
        for (int kc = 0; kc < static_cast<int>(rig.coarse.elements.size()); ++kc) {
          double acc = 0.0;
          for (int kf : rig.cells[kc]) {
            const AffineMap mf = element_map(rig.fine, kf, fam_f);
            for (const auto& q : reference_rule(rig.fine.elements[kf].shape, quad_deg))
              acc += q.w * std::abs(mf.det) * v.value(kf, q.xy);
          }
          cell_integral[kc] = acc;
        }
        for (int kc = 0; kc < static_cast<int>(rig.coarse.elements.size()); ++kc) {
          const Element& el = rig.coarse.elements[kc];
          for (int j = 0; j < el.vertex_count(); ++j) {
            integral[el.v[j]] += cell_integral[kc];
            area[el.v[j]] += el.area;
          }
        }
        for (size_t i = 0; i < integral.size(); ++i) integral[i] /= area[i];
        const FeFunction iv = clement_from_node_means(dm_coarse, integral);

        // lhs1 = sum_K h_min^-2 ||v - Iv||^2_K, lhs2 with the edge weights,
        // m1 and ||grad v||^2, all integrated on the fine mesh.
        double lhs1 = 0.0, m1_num = 0.0, grad_sq = 0.0;
        for (int kc = 0; kc < static_cast<int>(rig.coarse.elements.size()); ++kc) {
          const Element& el = rig.coarse.elements[kc];
          const AffineMap mc_map = element_map(rig.coarse, kc, fam_c);
          const Eigen::Matrix2d frame_t = el.anisotropy.frame().transpose();
          const double inv_h2 =
              1.0 / (el.anisotropy.min_length() * el.anisotropy.min_length());
          double diff = 0.0;
          for (int kf : rig.cells[kc]) {
            const AffineMap mf = element_map(rig.fine, kf, fam_f);
            for (const auto& q : reference_rule(rig.fine.elements[kf].shape, quad_deg)) {
              const Vec2 p = mf.to_physical(q.xy);
              const double w = q.w * std::abs(mf.det);
              const double d = v.value(kf, q.xy) - iv.value(kc, mc_map.to_reference(p));
              diff += w * d * d;
              const Vec2 g = v.gradient(kf, q.xy);
              grad_sq += w * g.squaredNorm();
              m1_num += w * inv_h2 * (frame_t * g).squaredNorm();
            }
          }
          lhs1 += inv_h2 * diff;
        }

        double lhs2 = 0.0;
        for (int ec = 0; ec < static_cast<int>(rig.coarse.edges.size()); ++ec) {
          const Edge& e = rig.coarse.edges[ec];
          const double w_edge = e.avg_height / (e.avg_min_length * e.avg_min_length);
          double diff = 0.0;
          for (int ef : rig.edges[ec]) {
            const double len = rig.fine.edges[ef].length;
            const int kf = rig.fine.edges[ef].inner_element();
            const int kc = rig.fine_to_coarse[kf];
            const AffineMap mf = element_map(rig.fine, kf, fam_f);
            const AffineMap mcm = element_map(rig.coarse, kc, fam_c);
            for (const auto& q : edge_rule(4)) {
              const Vec2 p = rig.fine.edge_point(ef, q.x);
              const double d =
                  v.value(kf, mf.to_reference(p)) - iv.value(kc, mcm.to_reference(p));
              diff += q.w * len * d * d;
            }
          }
          lhs2 += w_edge * diff;
        }

        const double m1_sq = m1_num / grad_sq;
        worst1 = std::max(worst1, lhs1 / (m1_sq * grad_sq));
        worst2 = std::max(worst2, lhs2 / (m1_sq * grad_sq));
      }
      c1_per_aspect.push_back(worst1);
      c2_per_aspect.push_back(worst2);
    }
    const std::string p = triangles ? "tri_" : "rect_";
    suite.add(p + "cle1_constant_spread", spread(c1_per_aspect), "<=", 10.0);
    suite.add(p + "cle2_constant_spread", spread(c2_per_aspect), "<=", 10.0);
    suite.add(p + "cle1_constant",
              *std::max_element(c1_per_aspect.begin(), c1_per_aspect.end()), "<=", 100.0);
    suite.add(p + "cle2_constant",
              *std::max_element(c2_per_aspect.begin(), c2_per_aspect.end()), "<=", 100.0);
  }
  return suite;
}

SuiteResult suite_coercivity(std::uint64_t seed) {
  SuiteResult suite;
  suite.name = "coercivity";
  std::mt19937_64 rng(seed ^ 0xc0e2c172u);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const DomainGeometry geom;
  ProblemData data;
  data.conductivity = 1.0;
  data.conduit_conductivity = 1.0;
  data.exchange = 1.0;

  const Mesh rect_uniform = build_graded_mesh(geom, 4, 4, Grading::uniform());
  const Mesh rect_graded = graded_mesh_for_aspect(geom, 4, 100.0);
  const Mesh tri_uniform = split_to_triangles(rect_uniform);
  const Mesh tri_graded = split_to_triangles(rect_graded);

  for (FamilyTag tag : {FamilyTag::Q1Rect, FamilyTag::Q2Rect, FamilyTag::P1Tri, FamilyTag::CR1Tri,
                        FamilyTag::CR2RectQ1plus, FamilyTag::CR3RectP2}) {
    const bool tri = ReferenceElement::get(tag).shape == CellShape::Triangle;
    double worst = 1e300;
    for (const Mesh* mesh : {tri ? &tri_uniform : &rect_uniform, tri ? &tri_graded : &rect_graded}) {
      const DofMap dm(*mesh, tag);
      const bool nc = !dm.reference().conforming;
      const SparseSystem sys = assemble_system(dm, data, nc);
      const int deg = assembly_quad_degree(tag);
      for (int trial = 0; trial < 25; ++trial) {
        FeFunction f = FeFunction::zeros(dm);
        for (int d = 0; d < dm.matrix_dof_count(); ++d)
          if (!dm.matrix_dof_constrained(d)) f.matrix_coeffs[d] = unit(rng);
        for (int d = 0; d < dm.conduit_dof_count(); ++d)
          if (!dm.conduit_dof_constrained(d)) f.conduit_coeffs[d] = unit(rng);
        const Eigen::VectorXd x = f.full_vector();
        const double energy = x.dot(sys.matrix * x);
        const double norm_sq = discrete_norm_sq(f, deg);
        if (norm_sq > 0.0) worst = std::min(worst, energy / norm_sq);
      }
    }
    suite.add(family_to_string(tag) + "_coercivity", worst, ">=", 1e-4);
  }
  return suite;
}

SuiteResult suite_alignment_bounds(std::uint64_t seed) {
  SuiteResult suite;
  suite.name = "alignment_bounds";
  std::mt19937_64 rng(seed ^ 0xa119u);

  // Stretched 1 x 0.1 cells: gradient along the short axis gives exactly 1,
  // along the long axis exactly the aspect ratio.
  DomainGeometry stretched;
  stretched.length = 1.0;
  stretched.half_height = 0.5;
  const Mesh mesh_s = build_graded_mesh(stretched, 1, 5, Grading::uniform());
  const auto grad_y = [](const Vec2&) { return Vec2(0.0, 1.0); };
  const auto grad_x = [](const Vec2&) { return Vec2(1.0, 0.0); };
  suite.add("aligned_constant_gradient", std::abs(alignment_measure(mesh_s, grad_y, 4) - 1.0),
            "<=", 1e-12);
  suite.add("misaligned_constant_gradient", std::abs(alignment_measure(mesh_s, grad_x, 4) - 10.0),
            "<=", 1e-12 * 10.0);

  // Unit squares: m1 = 1 for any field.
  DomainGeometry square;
  square.length = 4.0;
  square.half_height = 2.0;
  const Mesh mesh_q = build_graded_mesh(square, 4, 2, Grading::uniform());
  const auto grad_mixed = [](const Vec2& p) { return Vec2(3.0 + p.y(), -2.0 + p.x() * p.x()); };
  suite.add("isotropic_any_field", std::abs(alignment_measure(mesh_q, grad_mixed, 6) - 1.0), "<=",
            1e-12);

  // Crude bounds over random discrete fields on three mesh families.
  double worst_low = 1e300, worst_high = 0.0;
  const DomainGeometry geom;
  const Mesh meshes[] = {build_graded_mesh(geom, 4, 4, Grading::uniform()),
                         graded_mesh_for_aspect(geom, 4, 10.0),
                         split_to_triangles(graded_mesh_for_aspect(geom, 4, 100.0))};
  for (const Mesh& mesh : meshes) {
    double max_aspect = 1.0;
    for (const Element& el : mesh.elements)
      max_aspect = std::max(max_aspect, el.anisotropy.len_long / el.anisotropy.len_short);
    const DofMap dm(mesh, clement_family(mesh));
    for (int trial = 0; trial < 67; ++trial) {
      const FeFunction f = random_conforming_field(dm, rng);
      const double m1 = alignment_measure(
          mesh, [&](int elem, const Vec2& ref, const Vec2&) { return f.gradient(elem, ref); }, 4);
      worst_low = std::min(worst_low, m1);
      worst_high = std::max(worst_high, m1 / max_aspect);
    }
  }
  suite.add("random_fields_lower", worst_low, ">=", 1.0 - 1e-10);
  suite.add("random_fields_upper_vs_max_aspect", worst_high, "<=", 1.0 + 1e-10);
  return suite;
}

SuiteResult suite_galerkin_orthogonality() {
  SuiteResult suite;
  suite.name = "galerkin_orthogonality";
  const DomainGeometry geom;

  for (FamilyTag tag : {FamilyTag::Q1Rect, FamilyTag::P1Tri}) {
    for (bool coupled : {false, true}) {
      const ManufacturedCase mc =
          coupled ? kinked_case(geom) : make_smooth_decoupled_case(geom, 1.0, 1.0);
      Mesh mesh = build_graded_mesh(geom, 8, 8, Grading::uniform());
      if (tag == FamilyTag::P1Tri) mesh = split_to_triangles(mesh);
      const DofMap dm(mesh, tag);

      const WeakFormVectors wf = exact_weak_form(mc, dm, rhs_quad_degree(tag) + 4);
      const double scale = std::max(1.0, wf.load.cwiseAbs().maxCoeff());
      const double consistency =
          (wf.bilinear_with_exact - wf.load).cwiseAbs().maxCoeff() / scale;

      const SparseSystem sys = assemble_system(dm, mc.data, false);
      const ReducedSystem red = apply_dirichlet(sys, dm);
      SolverConfig scfg;
      scfg.rel_tol = 1e-13;
      scfg.jacobi = true;
      const Eigen::VectorXd x = red.expand(solve(red, scfg));
      double orth = 0.0;
      const Eigen::VectorXd ax = sys.matrix * x;
      for (int d : dm.free_dofs()) orth = std::max(orth, std::abs(wf.bilinear_with_exact[d] - ax[d]));

      const std::string p = family_to_string(tag) + (coupled ? "_coupled" : "_decoupled");
      suite.add(p + "_weak_consistency", consistency, "<=", 1e-7);
      suite.add(p + "_orthogonality", orth / scale, "<=", 1e-7);
    }
  }
  return suite;
}

PropertyReport property_suites(const PropertyConfig& cfg) {
  PropertyReport rep;
  rep.suites.push_back(suite_unisolvence());
  rep.suites.push_back(suite_cr_property(cfg.seed));
  rep.suites.push_back(suite_inverse_inequalities(cfg.seed));
  rep.suites.push_back(suite_clement_estimates(cfg.seed));
  rep.suites.push_back(suite_coercivity(cfg.seed));
  rep.suites.push_back(suite_alignment_bounds(cfg.seed));
  rep.suites.push_back(suite_galerkin_orthogonality());
  return rep;
}

}  // namespace karst
