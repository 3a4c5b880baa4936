#include "karst/space.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "karst/quadrature.hpp"

namespace karst {

DofMap::DofMap(const Mesh& mesh, FamilyTag family)
    : mesh_(&mesh), family_(family), ref_(&ReferenceElement::get(family)) {
  const CellShape mesh_shape =
      mesh.is_triangular() ? CellShape::Triangle : CellShape::Rectangle;
  if (ref_->shape != mesh_shape)
    throw std::invalid_argument("dofmap: family " + family_to_string(family) +
                                " does not match the mesh cell shape");
  conduit_degree_ = ref_->conduit_degree;

  const int n_elems = static_cast<int>(mesh.elements.size());
  cell_dofs_.assign(n_elems, std::vector<int>(ref_->size(), -1));
  cell_edge_.assign(n_elems, {-1, -1, -1, -1});

  std::map<int, int> vertex_dof;
  std::map<int, int> edge_mean_dof;
  std::map<std::pair<int, long long>, int> edge_point_dof;
  std::vector<std::pair<Dof::Entity, int>> dof_backing;  // entity + mesh id for constraints

  const auto& ref_edges = ReferenceElement::reference_edges(ref_->shape);

  for (int k = 0; k < n_elems; ++k) {
    const AffineMap map = element_map(mesh, k, family);

    // Resolve local reference edges to global edges by midpoint.
    for (int le = 0; le < static_cast<int>(ref_edges.size()); ++le) {
      const Vec2 mid = map.to_physical(0.5 * (ref_edges[le].first + ref_edges[le].second));
      int best = -1;
      double best_d = 1e300;
      for (int j = 0; j < mesh.elements[k].vertex_count(); ++j) {
        const int ge = mesh.element_edges[k][j];
        const double d = (mesh.edge_point(ge, 0.5) - mid).norm();
        if (d < best_d) {
          best_d = d;
          best = ge;
        }
      }
      cell_edge_[k][le] = best;
    }

    for (int j = 0; j < ref_->size(); ++j) {
      const Dof& dof = ref_->dofs[j];
      int gid = -1;
      switch (dof.entity) {
        case Dof::Entity::Vertex: {
          const int v = mesh.elements[k].v[dof.local_index];
          auto it = vertex_dof.find(v);
          if (it == vertex_dof.end()) {
            gid = matrix_dof_count_++;
            vertex_dof.emplace(v, gid);
            dof_backing.push_back({Dof::Entity::Vertex, v});
          } else {
            gid = it->second;
          }
          break;
        }
        case Dof::Entity::Edge: {
          const int ge = cell_edge_[k][dof.local_edge];
          if (dof.kind == Dof::Kind::EdgeMoment) {
            auto it = edge_mean_dof.find(ge);
            if (it == edge_mean_dof.end()) {
              gid = matrix_dof_count_++;
              edge_mean_dof.emplace(ge, gid);
              dof_backing.push_back({Dof::Entity::Edge, ge});
            } else {
              gid = it->second;
            }
          } else {
            const Vec2 p = map.to_physical(dof.point);
            const Vec2 a = mesh.vertices[mesh.edges[ge].v[0]];
            const Vec2 b = mesh.vertices[mesh.edges[ge].v[1]];
            const double s = (p - a).dot(b - a) / (b - a).squaredNorm();
            const auto key = std::make_pair(ge, std::llround(s * 1e6));
            auto it = edge_point_dof.find(key);
            if (it == edge_point_dof.end()) {
              gid = matrix_dof_count_++;
              edge_point_dof.emplace(key, gid);
              dof_backing.push_back({Dof::Entity::Edge, ge});
            } else {
              gid = it->second;
            }
          }
          break;
        }
        case Dof::Entity::Cell: {
          gid = matrix_dof_count_++;
          dof_backing.push_back({Dof::Entity::Cell, k});
          break;
        }
      }
      cell_dofs_[k][j] = gid;
    }
  }

  matrix_constrained_.assign(matrix_dof_count_, false);
  for (int d = 0; d < matrix_dof_count_; ++d) {
    const auto& [entity, id] = dof_backing[d];
    if (entity == Dof::Entity::Vertex)
      matrix_constrained_[d] = mesh.boundary_vertex[id];
    else if (entity == Dof::Entity::Edge)
      matrix_constrained_[d] = mesh.edges[id].location == EdgeLocation::Boundary;
  }

  // Conduit space: shared endpoint nodes plus per-edge interior nodes.
  const int n_ce = static_cast<int>(mesh.conduit_edges.size());
  conduit_edge_dofs_.assign(n_ce, {});
  std::map<int, int> interface_vertex_dof;
  auto conduit_node = [&](int vertex) {
    auto it = interface_vertex_dof.find(vertex);
    if (it != interface_vertex_dof.end()) return it->second;
    const int id = conduit_dof_count_++;
    interface_vertex_dof.emplace(vertex, id);
    conduit_dof_x_.push_back(mesh.vertices[vertex].x());
    return id;
  };
  for (int ci = 0; ci < n_ce; ++ci) {
    const Edge& e = mesh.edges[mesh.conduit_edges[ci]];
    const int left = conduit_node(e.v[0]);
    std::vector<int> nodes{left};
    for (int kk = 1; kk < conduit_degree_; ++kk) {
      nodes.push_back(conduit_dof_count_++);
      const double s = static_cast<double>(kk) / conduit_degree_;
      conduit_dof_x_.push_back(mesh.edge_point(mesh.conduit_edges[ci], s).x());
    }
    nodes.push_back(conduit_node(e.v[1]));
    conduit_edge_dofs_[ci] = std::move(nodes);
  }

  conduit_constrained_.assign(conduit_dof_count_, false);
  for (int d = 0; d < conduit_dof_count_; ++d) {
    const double x = conduit_dof_x_[d];
    const double L = mesh.geometry.length;
    if (std::abs(x) < 1e-12 * L || std::abs(x - L) < 1e-12 * L) conduit_constrained_[d] = true;
  }
}

std::vector<int> DofMap::free_dofs() const {
  std::vector<int> free;
  for (int d = 0; d < matrix_dof_count_; ++d)
    if (!matrix_constrained_[d]) free.push_back(d);
  for (int d = 0; d < conduit_dof_count_; ++d)
    if (!conduit_constrained_[d]) free.push_back(conduit_global(d));
  return free;
}

double ConduitBasis::value(int j, double s) const {
  const int n = degree;
  double num = 1.0, den = 1.0;
  const double sj = static_cast<double>(j) / n;
  for (int m = 0; m <= n; ++m) {
    if (m == j) continue;
    const double sm = static_cast<double>(m) / n;
    num *= (s - sm);
    den *= (sj - sm);
  }
  return num / den;
}

double ConduitBasis::deriv(int j, double s) const {
  const int n = degree;
  const double sj = static_cast<double>(j) / n;
  double den = 1.0;
  for (int m = 0; m <= n; ++m)
    if (m != j) den *= (sj - static_cast<double>(m) / n);
  double acc = 0.0;
  for (int skip = 0; skip <= n; ++skip) {
    if (skip == j) continue;
    double prod = 1.0;
    for (int m = 0; m <= n; ++m) {
      if (m == j || m == skip) continue;
      prod *= (s - static_cast<double>(m) / n);
    }
    acc += prod;
  }
  return acc / den;
}

double ConduitBasis::second(int j, double s) const {
  const int n = degree;
  if (n < 2) return 0.0;
  const double sj = static_cast<double>(j) / n;
  double den = 1.0;
  for (int m = 0; m <= n; ++m)
    if (m != j) den *= (sj - static_cast<double>(m) / n);
  double acc = 0.0;
  for (int s1 = 0; s1 <= n; ++s1) {
    if (s1 == j) continue;
    for (int s2 = 0; s2 <= n; ++s2) {
      if (s2 == j || s2 == s1) continue;
      double prod = 1.0;
      for (int m = 0; m <= n; ++m) {
        if (m == j || m == s1 || m == s2) continue;
        prod *= (s - static_cast<double>(m) / n);
      }
      acc += prod;
    }
  }
  return acc / den;
}

FeFunction FeFunction::zeros(const DofMap& dm) {
  FeFunction f;
  f.dofmap = &dm;
  f.matrix_coeffs = Eigen::VectorXd::Zero(dm.matrix_dof_count());
  f.conduit_coeffs = Eigen::VectorXd::Zero(dm.conduit_dof_count());
  return f;
}

FeFunction FeFunction::from_full_vector(const DofMap& dm, const Eigen::VectorXd& x) {
  FeFunction f = zeros(dm);
  f.matrix_coeffs = x.head(dm.matrix_dof_count());
  f.conduit_coeffs = x.tail(dm.conduit_dof_count());
  return f;
}

Eigen::VectorXd FeFunction::full_vector() const {
  Eigen::VectorXd x(dofmap->total_dof_count());
  x.head(matrix_coeffs.size()) = matrix_coeffs;
  x.tail(conduit_coeffs.size()) = conduit_coeffs;
  return x;
}

namespace {

void check_inside(CellShape shape, const Vec2& r) {
  constexpr double tol = 1e-10;
  const bool inside = shape == CellShape::Rectangle
                          ? (r.x() >= -tol && r.x() <= 1.0 + tol && r.y() >= -tol && r.y() <= 1.0 + tol)
                          : (r.x() >= -tol && r.y() >= -tol && r.x() + r.y() <= 1.0 + tol);
  if (!inside) throw std::invalid_argument("evaluate: point outside the reference element");
}

}  // namespace

double FeFunction::value(int elem, const Vec2& ref) const {
  const auto& ref_el = dofmap->reference();
  check_inside(ref_el.shape, ref);
  const auto& dofs = dofmap->cell_dofs(elem);
  double acc = 0.0;
  for (int j = 0; j < ref_el.size(); ++j) acc += matrix_coeffs[dofs[j]] * ref_el.basis[j](ref);
  return acc;
}

Vec2 FeFunction::gradient(int elem, const Vec2& ref) const {
  const auto& ref_el = dofmap->reference();
  check_inside(ref_el.shape, ref);
  const auto& dofs = dofmap->cell_dofs(elem);
  Vec2 g = Vec2::Zero();
  for (int j = 0; j < ref_el.size(); ++j) g += matrix_coeffs[dofs[j]] * ref_el.basis[j].gradient(ref);
  const AffineMap map = element_map(dofmap->mesh(), elem, dofmap->family());
  return map.push_gradient(g);
}

double FeFunction::laplacian(int elem, const Vec2& ref) const {
  const auto& ref_el = dofmap->reference();
  const auto& dofs = dofmap->cell_dofs(elem);
  Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
  for (int j = 0; j < ref_el.size(); ++j) h += matrix_coeffs[dofs[j]] * ref_el.basis[j].hessian(ref);
  const AffineMap map = element_map(dofmap->mesh(), elem, dofmap->family());
  return map.push_hessian(h).trace();
}

double FeFunction::value_at(const Vec2& phys) const {
  const int elem = dofmap->mesh().locate(phys);
  const AffineMap map = element_map(dofmap->mesh(), elem, dofmap->family());
  return value(elem, map.to_reference(phys));
}

double FeFunction::trace(int elem, int edge, double s) const {
  const AffineMap map = element_map(dofmap->mesh(), elem, dofmap->family());
  return value(elem, map.to_reference(dofmap->mesh().edge_point(edge, s)));
}

Vec2 FeFunction::trace_gradient(int elem, int edge, double s) const {
  const AffineMap map = element_map(dofmap->mesh(), elem, dofmap->family());
  return gradient(elem, map.to_reference(dofmap->mesh().edge_point(edge, s)));
}

double FeFunction::conduit_value(int ci, double s) const {
  const ConduitBasis b{dofmap->conduit_degree()};
  const auto& nodes = dofmap->conduit_edge_dofs(ci);
  double acc = 0.0;
  for (int j = 0; j < static_cast<int>(nodes.size()); ++j)
    acc += conduit_coeffs[nodes[j]] * b.value(j, s);
  return acc;
}

double FeFunction::conduit_deriv(int ci, double s) const {
  const ConduitBasis b{dofmap->conduit_degree()};
  const auto& nodes = dofmap->conduit_edge_dofs(ci);
  const double len = dofmap->mesh().edges[dofmap->mesh().conduit_edges[ci]].length;
  double acc = 0.0;
  for (int j = 0; j < static_cast<int>(nodes.size()); ++j)
    acc += conduit_coeffs[nodes[j]] * b.deriv(j, s);
  return acc / len;
}

double FeFunction::conduit_second(int ci, double s) const {
  const ConduitBasis b{dofmap->conduit_degree()};
  const auto& nodes = dofmap->conduit_edge_dofs(ci);
  const double len = dofmap->mesh().edges[dofmap->mesh().conduit_edges[ci]].length;
  double acc = 0.0;
  for (int j = 0; j < static_cast<int>(nodes.size()); ++j)
    acc += conduit_coeffs[nodes[j]] * b.second(j, s);
  return acc / (len * len);
}

double FeFunction::interface_trace(int ci, double s) const {
  const Mesh& mesh = dofmap->mesh();
  const int edge = mesh.conduit_edges[ci];
  const Edge& e = mesh.edges[edge];
  return 0.5 * (trace(e.elem_front, edge, s) + trace(e.elem_back, edge, s));
}

double FeFunction::matrix_l2_norm(int quad_degree) const {
  const Mesh& mesh = dofmap->mesh();
  const int deg = quad_degree > 0 ? quad_degree : 2 * dofmap->reference().degree + 2;
  double acc = 0.0;
  for (int k = 0; k < static_cast<int>(mesh.elements.size()); ++k) {
    const AffineMap map = element_map(mesh, k, dofmap->family());
    for (const auto& q : reference_rule(mesh.elements[k].shape, deg)) {
      const double v = value(k, q.xy);
      acc += q.w * std::abs(map.det) * v * v;
    }
  }
  return std::sqrt(acc);
}

double jump_value(const FeFunction& f, int edge, double s) {
  const Edge& e = f.dofmap->mesh().edges[edge];
  if (e.is_boundary()) return -f.trace(e.inner_element(), edge, s);
  return f.trace(e.elem_front, edge, s) - f.trace(e.elem_back, edge, s);
}

double jump_normal_flux(const FeFunction& f, int edge, double s, double conductivity) {
  const Edge& e = f.dofmap->mesh().edges[edge];
  if (e.is_boundary())
    return -conductivity * f.trace_gradient(e.inner_element(), edge, s).dot(e.normal);
  const Vec2 g_front = f.trace_gradient(e.elem_front, edge, s);
  const Vec2 g_back = f.trace_gradient(e.elem_back, edge, s);
  return conductivity * (g_front - g_back).dot(e.normal);
}

FeFunction interpolate(const DofMap& dm, const ScalarField& f_matrix, const LineField& f_conduit) {
  FeFunction out = FeFunction::zeros(dm);
  const Mesh& mesh = dm.mesh();
  const auto& ref = dm.reference();
  for (int k = 0; k < static_cast<int>(mesh.elements.size()); ++k) {
    const AffineMap map = element_map(mesh, k, dm.family());
    for (int j = 0; j < ref.size(); ++j) {
      const double c =
          ref.apply_dof(ref.dofs[j], [&](const Vec2& r) { return f_matrix(map.to_physical(r)); });
      out.matrix_coeffs[dm.cell_dofs(k)[j]] = c;
    }
  }
  for (int d = 0; d < dm.conduit_dof_count(); ++d)
    out.conduit_coeffs[d] = f_conduit(dm.conduit_dof_position(d));
  return out;
}

}  // namespace karst
