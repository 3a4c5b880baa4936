#include "karst/norms.hpp"

#include <cmath>
#include <set>

#include "karst/quadrature.hpp"

namespace karst {

namespace {

double conduit_error_h1_sq(const FeFunction& u_h, const ManufacturedCase& mc,
                           const std::vector<int>& conduit_indices, int quad_degree) {
  const Mesh& mesh = u_h.dofmap->mesh();
  const auto eq = edge_rule(quad_degree);
  double acc = 0.0;
  for (int ci : conduit_indices) {
    const int ge = mesh.conduit_edges[ci];
    const double len = mesh.edges[ge].length;
    for (const auto& q : eq) {
      const double x = mesh.edge_point(ge, q.x).x();
      const double e = mc.exact_conduit(x) - u_h.conduit_value(ci, q.x);
      const double de = mc.exact_conduit_deriv(x) - u_h.conduit_deriv(ci, q.x);
      acc += q.w * len * (e * e + de * de);
    }
  }
  return acc;
}

double element_error_sq(const FeFunction& u_h, const ManufacturedCase& mc, int elem,
                        bool include_l2, int quad_degree) {
  const Mesh& mesh = u_h.dofmap->mesh();
  const AffineMap map = element_map(mesh, elem, u_h.dofmap->family());
  double acc = 0.0;
  for (const auto& q : reference_rule(mesh.elements[elem].shape, quad_degree)) {
    const Vec2 p = map.to_physical(q.xy);
    const Vec2 ge = mc.exact_matrix_gradient(p.x(), p.y()) - u_h.gradient(elem, q.xy);
    double term = ge.squaredNorm();
    if (include_l2) {
      const double e = mc.exact_matrix(p.x(), p.y()) - u_h.value(elem, q.xy);
      term += e * e;
    }
    acc += q.w * std::abs(map.det) * term;
  }
  return acc;
}

double edge_jump_error_sq(const FeFunction& u_h, int ge, int quad_degree) {
  // [u - u_h] = -[u_h] on interior edges (the exact solution is continuous).
  const Mesh& mesh = u_h.dofmap->mesh();
  const double len = mesh.edges[ge].length;
  double acc = 0.0;
  for (const auto& q : edge_rule(quad_degree)) {
    const double j = -jump_value(u_h, ge, q.x);
    acc += q.w * len * j * j;
  }
  return acc;
}

}  // namespace

double penalty_seminorm_sq(const FeFunction& f, int quad_degree) {
  const Mesh& mesh = f.dofmap->mesh();
  double acc = 0.0;
  for (int ge = 0; ge < static_cast<int>(mesh.edges.size()); ++ge) {
    const Edge& e = mesh.edges[ge];
    if (e.location == EdgeLocation::Boundary) continue;
    const double w = e.avg_height / (e.avg_min_length * e.avg_min_length);
    double jump_sq = 0.0;
    for (const auto& q : edge_rule(quad_degree)) {
      const double j = jump_value(f, ge, q.x);
      jump_sq += q.w * e.length * j * j;
    }
    acc += w * jump_sq;
  }
  return acc;
}

double discrete_norm_sq(const FeFunction& f, int quad_degree) {
  const Mesh& mesh = f.dofmap->mesh();
  double acc = 0.0;
  for (int k = 0; k < static_cast<int>(mesh.elements.size()); ++k) {
    const AffineMap map = element_map(mesh, k, f.dofmap->family());
    for (const auto& q : reference_rule(mesh.elements[k].shape, quad_degree))
      acc += q.w * std::abs(map.det) * f.gradient(k, q.xy).squaredNorm();
  }
  const auto eq = edge_rule(quad_degree);
  for (int ci = 0; ci < static_cast<int>(mesh.conduit_edges.size()); ++ci) {
    const double len = mesh.edges[mesh.conduit_edges[ci]].length;
    for (const auto& q : eq) {
      const double v = f.conduit_value(ci, q.x);
      const double dv = f.conduit_deriv(ci, q.x);
      acc += q.w * len * (v * v + dv * dv);
    }
  }
  if (!f.dofmap->reference().conforming) acc += penalty_seminorm_sq(f, quad_degree);
  return acc;
}

double error_norm(const FeFunction& u_h, const ManufacturedCase& mc, bool nonconforming,
                  int quad_degree) {
  const Mesh& mesh = u_h.dofmap->mesh();
  double broken = 0.0;
  for (int k = 0; k < static_cast<int>(mesh.elements.size()); ++k)
    broken += element_error_sq(u_h, mc, k, /*include_l2=*/false, quad_degree);

  std::vector<int> all_conduit(mesh.conduit_edges.size());
  for (int i = 0; i < static_cast<int>(all_conduit.size()); ++i) all_conduit[i] = i;
  const double conduit = conduit_error_h1_sq(u_h, mc, all_conduit, quad_degree);

  if (!nonconforming) return std::sqrt(broken) + std::sqrt(conduit);

  double jump = 0.0;
  for (int ge = 0; ge < static_cast<int>(mesh.edges.size()); ++ge) {
    const Edge& e = mesh.edges[ge];
    if (e.location == EdgeLocation::Boundary) continue;
    jump += e.avg_height / (e.avg_min_length * e.avg_min_length) *
            edge_jump_error_sq(u_h, ge, quad_degree);
  }
  return std::sqrt(broken + conduit + jump);
}

double local_error_norm(const FeFunction& u_h, const ManufacturedCase& mc,
                        const std::vector<int>& patch, bool nonconforming, int quad_degree) {
  const Mesh& mesh = u_h.dofmap->mesh();
  const std::set<int> in_patch(patch.begin(), patch.end());

  double matrix_part = 0.0;
  for (int k : patch)
    matrix_part += element_error_sq(u_h, mc, k, /*include_l2=*/true, quad_degree);

  std::vector<int> conduit_indices;
  for (int ci = 0; ci < static_cast<int>(mesh.conduit_edges.size()); ++ci) {
    const Edge& e = mesh.edges[mesh.conduit_edges[ci]];
    if (in_patch.count(e.elem_front) || in_patch.count(e.elem_back)) conduit_indices.push_back(ci);
  }
  const double conduit = conduit_error_h1_sq(u_h, mc, conduit_indices, quad_degree);

  double jump = 0.0;
  if (nonconforming) {
    // sum_K J_K: interior edges of the patch enter once per incident element.
    for (int k : patch) {
      for (int j = 0; j < mesh.elements[k].vertex_count(); ++j) {
        const int ge = mesh.element_edges[k][j];
        const Edge& e = mesh.edges[ge];
        if (e.location == EdgeLocation::Boundary) continue;
        jump += e.avg_height / (e.avg_min_length * e.avg_min_length) *
                edge_jump_error_sq(u_h, ge, quad_degree);
      }
    }
  }
  return std::sqrt(matrix_part + conduit + jump);
}

WeakFormVectors exact_weak_form(const ManufacturedCase& mc, const DofMap& dm, int quad_degree) {
  const Mesh& mesh = dm.mesh();
  const ReferenceElement& ref = dm.reference();
  const ProblemData& data = mc.data;
  WeakFormVectors out;
  out.bilinear_with_exact = Eigen::VectorXd::Zero(dm.total_dof_count());
  out.load = Eigen::VectorXd::Zero(dm.total_dof_count());
  Eigen::VectorXd& a_u = out.bilinear_with_exact;
  Eigen::VectorXd& load = out.load;

  for (int k = 0; k < static_cast<int>(mesh.elements.size()); ++k) {
    const AffineMap map = element_map(mesh, k, dm.family());
    const auto& dofs = dm.cell_dofs(k);
    for (const auto& q : reference_rule(mesh.elements[k].shape, quad_degree)) {
      const Vec2 p = map.to_physical(q.xy);
      const Vec2 grad_u = mc.exact_matrix_gradient(p.x(), p.y());
      const double f = data.source_matrix(p.x(), p.y());
      const double w = q.w * std::abs(map.det);
      for (int i = 0; i < ref.size(); ++i) {
        const Vec2 grad_phi = map.push_gradient(ref.basis[i].gradient(q.xy));
        const double phi = ref.basis[i](q.xy);
        a_u[dofs[i]] += w * data.conductivity * grad_u.dot(grad_phi);
        load[dofs[i]] += w * f * phi;
      }
    }
  }

  const ConduitBasis cb{dm.conduit_degree()};
  const int nc = dm.conduit_degree() + 1;
  const int nb = ref.size();
  for (int ci = 0; ci < static_cast<int>(mesh.conduit_edges.size()); ++ci) {
    const int ge = mesh.conduit_edges[ci];
    const Edge& e = mesh.edges[ge];
    const auto& cnodes = dm.conduit_edge_dofs(ci);
    const AffineMap map_up = element_map(mesh, e.elem_front, dm.family());
    const AffineMap map_down = element_map(mesh, e.elem_back, dm.family());
    for (const auto& q : edge_rule(quad_degree)) {
      const double x = mesh.edge_point(ge, q.x).x();
      const double w = q.w * e.length;
      const double du = mc.exact_conduit_deriv(x);
      const double fc = data.source_conduit(x);
      const double mismatch = mc.exact_matrix(x, 0.0) - mc.exact_conduit(x);
      for (int i = 0; i < nc; ++i) {
        const int g = dm.conduit_global(cnodes[i]);
        a_u[g] += w * (data.conduit_conductivity * du * cb.deriv(i, q.x) / e.length -
                       data.exchange * mismatch * cb.value(i, q.x));
        load[g] += w * fc * cb.value(i, q.x);
      }
      if (data.exchange > 0.0) {
        const Vec2 p = mesh.edge_point(ge, q.x);
        const Vec2 r_up = map_up.to_reference(p);
        const Vec2 r_down = map_down.to_reference(p);
        for (int i = 0; i < nb; ++i) {
          a_u[dm.cell_dofs(e.elem_front)[i]] +=
              w * data.exchange * mismatch * 0.5 * ref.basis[i](r_up);
          a_u[dm.cell_dofs(e.elem_back)[i]] +=
              w * data.exchange * mismatch * 0.5 * ref.basis[i](r_down);
        }
      }
    }
  }

  for (int d = 0; d < dm.matrix_dof_count(); ++d)
    if (dm.matrix_dof_constrained(d)) a_u[d] = load[d] = 0.0;
  for (int d = 0; d < dm.conduit_dof_count(); ++d)
    if (dm.conduit_dof_constrained(d)) a_u[dm.conduit_global(d)] = load[dm.conduit_global(d)] = 0.0;
  return out;
}

Eigen::VectorXd exact_weak_residual(const ManufacturedCase& mc, const DofMap& dm, int quad_degree) {
  const WeakFormVectors v = exact_weak_form(mc, dm, quad_degree);
  return v.bilinear_with_exact - v.load;
}

}  // namespace karst
