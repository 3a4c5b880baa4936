#include "karst/clement.hpp"

#include <cmath>
#include <stdexcept>

#include "karst/quadrature.hpp"

namespace karst {

FamilyTag clement_family(const Mesh& mesh) {
  return mesh.is_triangular() ? FamilyTag::P1Tri : FamilyTag::Q1Rect;
}

std::vector<int> vertex_dof_map(const DofMap& dm) {
  const Mesh& mesh = dm.mesh();
  std::vector<int> v2d(mesh.vertices.size(), -1);
  const auto& ref = dm.reference();
  for (int k = 0; k < static_cast<int>(mesh.elements.size()); ++k)
    for (int j = 0; j < ref.size(); ++j) {
      if (ref.dofs[j].entity != Dof::Entity::Vertex)
        throw std::logic_error("vertex_dof_map: family has non-vertex dofs");
      v2d[mesh.elements[k].v[ref.dofs[j].local_index]] = dm.cell_dofs(k)[j];
    }
  return v2d;
}

std::vector<double> patch_means(const Mesh& mesh, const ScalarField& v, int quad_degree) {
  std::vector<double> integral(mesh.vertices.size(), 0.0);
  std::vector<double> area(mesh.vertices.size(), 0.0);
  for (int k = 0; k < static_cast<int>(mesh.elements.size()); ++k) {
    const Element& el = mesh.elements[k];
    const AffineMap map = element_map(mesh, k, clement_family(mesh));
    double cell_int = 0.0;
    for (const auto& q : reference_rule(el.shape, quad_degree)) {
      const double val = v(map.to_physical(q.xy));
      if (!std::isfinite(val)) throw std::runtime_error("clement: non-finite sample");
      cell_int += q.w * std::abs(map.det) * val;
    }
    for (int j = 0; j < el.vertex_count(); ++j) {
      integral[el.v[j]] += cell_int;
      area[el.v[j]] += el.area;
    }
  }
  for (size_t i = 0; i < integral.size(); ++i) integral[i] /= area[i];
  return integral;
}

FeFunction clement_from_node_means(const DofMap& clement_dm, const std::vector<double>& means) {
  const Mesh& mesh = clement_dm.mesh();
  FeFunction f = FeFunction::zeros(clement_dm);
  const auto v2d = vertex_dof_map(clement_dm);
  for (size_t v = 0; v < mesh.vertices.size(); ++v)
    f.matrix_coeffs[v2d[v]] = mesh.boundary_vertex[v] ? 0.0 : means[v];
  return f;
}

FeFunction clement_interpolate(const DofMap& clement_dm, const ScalarField& v, int quad_degree) {
  return clement_from_node_means(clement_dm, patch_means(clement_dm.mesh(), v, quad_degree));
}

}  // namespace karst
