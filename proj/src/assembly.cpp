#include "karst/assembly.hpp"

#include <cmath>
#include <stdexcept>

#include "karst/quadrature.hpp"

namespace karst {

Eigen::VectorXd ReducedSystem::expand(const Eigen::VectorXd& x) const {
  Eigen::VectorXd full = Eigen::VectorXd::Zero(full_size);
  for (int i = 0; i < static_cast<int>(free_dofs.size()); ++i) full[free_dofs[i]] = x[i];
  return full;
}

Eigen::VectorXd ReducedSystem::restrict_vec(const Eigen::VectorXd& full) const {
  Eigen::VectorXd x(free_dofs.size());
  for (int i = 0; i < static_cast<int>(free_dofs.size()); ++i) x[i] = full[free_dofs[i]];
  return x;
}

int assembly_quad_degree(FamilyTag family) { return 2 * ReferenceElement::get(family).degree + 2; }

int rhs_quad_degree(FamilyTag family) { return assembly_quad_degree(family) + 4; }

SparseSystem assemble_system(const DofMap& dm, const ProblemData& data, bool penalty) {
  data.validate();
  const ReferenceElement& ref = dm.reference();
  if (!ref.conforming && !penalty)
    throw std::invalid_argument("assemble: nonconforming families require the penalty term");

  const Mesh& mesh = dm.mesh();
  const int n = dm.total_dof_count();
  const int deg = assembly_quad_degree(dm.family());
  std::vector<Eigen::Triplet<double>> trips;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);

  // Matrix stiffness block.
  const QuadratureRule cell_rule = reference_rule(ref.shape, deg);
  const QuadratureRule rhs_rule = reference_rule(ref.shape, rhs_quad_degree(dm.family()));
  const int nb = ref.size();
  std::vector<Vec2> grads(nb);
  for (int k = 0; k < static_cast<int>(mesh.elements.size()); ++k) {
    const AffineMap map = element_map(mesh, k, dm.family());
    const auto& dofs = dm.cell_dofs(k);
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(nb, nb);
    for (const auto& q : cell_rule) {
      for (int j = 0; j < nb; ++j) grads[j] = map.push_gradient(ref.basis[j].gradient(q.xy));
      const double w = q.w * std::abs(map.det) * data.conductivity;
      for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j) local(i, j) += w * grads[i].dot(grads[j]);
    }
    for (int i = 0; i < nb; ++i)
      for (int j = 0; j < nb; ++j) trips.emplace_back(dofs[i], dofs[j], local(i, j));

    for (const auto& q : rhs_rule) {
      const Vec2 p = map.to_physical(q.xy);
      const double f = data.source_matrix(p.x(), p.y());
      if (!std::isfinite(f)) throw std::runtime_error("assemble: non-finite matrix source");
      const double w = q.w * std::abs(map.det) * f;
      for (int i = 0; i < nb; ++i) rhs[dofs[i]] += w * ref.basis[i](q.xy);
    }
  }

  // Conduit stiffness, exchange coupling and conduit load.
  const ConduitBasis cb{dm.conduit_degree()};
  const int nc = dm.conduit_degree() + 1;
  const auto edge_q = edge_rule(deg);
  const auto edge_q_rhs = edge_rule(rhs_quad_degree(dm.family()));
  for (int ci = 0; ci < static_cast<int>(mesh.conduit_edges.size()); ++ci) {
    const int ge = mesh.conduit_edges[ci];
    const Edge& e = mesh.edges[ge];
    const double len = e.length;
    const auto& cnodes = dm.conduit_edge_dofs(ci);

    // D * u' v' over the edge.
    for (const auto& q : edge_q) {
      const double w = q.w * len * data.conduit_conductivity / (len * len);
      for (int i = 0; i < nc; ++i)
        for (int j = 0; j < nc; ++j)
          trips.emplace_back(dm.conduit_global(cnodes[i]), dm.conduit_global(cnodes[j]),
                             w * cb.deriv(i, q.x) * cb.deriv(j, q.x));
    }

    // alpha * (avg trace u - u^c)(avg trace v - v^c).
    if (data.exchange > 0.0) {
      const int up = e.elem_front, down = e.elem_back;
      const AffineMap map_up = element_map(mesh, up, dm.family());
      const AffineMap map_down = element_map(mesh, down, dm.family());
      const auto& dofs_up = dm.cell_dofs(up);
      const auto& dofs_down = dm.cell_dofs(down);
      std::vector<int> gids;
      gids.reserve(2 * nb + nc);
      for (int i = 0; i < nb; ++i) gids.push_back(dofs_up[i]);
      for (int i = 0; i < nb; ++i) gids.push_back(dofs_down[i]);
      for (int i = 0; i < nc; ++i) gids.push_back(dm.conduit_global(cnodes[i]));
      Eigen::VectorXd b(2 * nb + nc);
      Eigen::MatrixXd local = Eigen::MatrixXd::Zero(b.size(), b.size());
      for (const auto& q : edge_q) {
        const Vec2 p = mesh.edge_point(ge, q.x);
        const Vec2 r_up = map_up.to_reference(p);
        const Vec2 r_down = map_down.to_reference(p);
        for (int i = 0; i < nb; ++i) {
          b[i] = 0.5 * ref.basis[i](r_up);
          b[nb + i] = 0.5 * ref.basis[i](r_down);
        }
        for (int i = 0; i < nc; ++i) b[2 * nb + i] = -cb.value(i, q.x);
        local += (q.w * len * data.exchange) * (b * b.transpose());
      }
      for (int i = 0; i < b.size(); ++i)
        for (int j = 0; j < b.size(); ++j) trips.emplace_back(gids[i], gids[j], local(i, j));
    }

    for (const auto& q : edge_q_rhs) {
      const double fc = data.source_conduit(mesh.edge_point(ge, q.x).x());
      if (!std::isfinite(fc)) throw std::runtime_error("assemble: non-finite conduit source");
      for (int i = 0; i < nc; ++i)
        rhs[dm.conduit_global(cnodes[i])] += q.w * len * fc * cb.value(i, q.x);
    }
  }

  // Jump penalty over interior matrix and conduit edges.
  if (penalty && !ref.conforming) {
    for (int ge = 0; ge < static_cast<int>(mesh.edges.size()); ++ge) {
      const Edge& e = mesh.edges[ge];
      if (e.location == EdgeLocation::Boundary) continue;
      const double weight = e.avg_height / (e.avg_min_length * e.avg_min_length);
      const AffineMap map_f = element_map(mesh, e.elem_front, dm.family());
      const AffineMap map_b = element_map(mesh, e.elem_back, dm.family());
      const auto& dofs_f = dm.cell_dofs(e.elem_front);
      const auto& dofs_b = dm.cell_dofs(e.elem_back);
      std::vector<int> gids;
      for (int i = 0; i < nb; ++i) gids.push_back(dofs_f[i]);
      for (int i = 0; i < nb; ++i) gids.push_back(dofs_b[i]);
      Eigen::VectorXd jmp(2 * nb);
      Eigen::MatrixXd local = Eigen::MatrixXd::Zero(2 * nb, 2 * nb);
      for (const auto& q : edge_q) {
        const Vec2 p = mesh.edge_point(ge, q.x);
        const Vec2 r_f = map_f.to_reference(p);
        const Vec2 r_b = map_b.to_reference(p);
        for (int i = 0; i < nb; ++i) {
          jmp[i] = ref.basis[i](r_f);
          jmp[nb + i] = -ref.basis[i](r_b);
        }
        local += (q.w * e.length * weight) * (jmp * jmp.transpose());
      }
      for (int i = 0; i < 2 * nb; ++i)
        for (int j = 0; j < 2 * nb; ++j) trips.emplace_back(gids[i], gids[j], local(i, j));
    }
  }

  SparseSystem sys;
  sys.matrix.resize(n, n);
  sys.matrix.setFromTriplets(trips.begin(), trips.end());
  sys.rhs = std::move(rhs);
  return sys;
}

ReducedSystem apply_dirichlet(const SparseSystem& system, const DofMap& dm) {
  ReducedSystem red;
  red.free_dofs = dm.free_dofs();
  red.full_size = dm.total_dof_count();

  std::vector<int> to_reduced(red.full_size, -1);
  for (int i = 0; i < static_cast<int>(red.free_dofs.size()); ++i) to_reduced[red.free_dofs[i]] = i;

  std::vector<Eigen::Triplet<double>> trips;
  for (int col = 0; col < system.matrix.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(system.matrix, col); it; ++it) {
      const int ri = to_reduced[it.row()], rj = to_reduced[it.col()];
      if (ri >= 0 && rj >= 0) trips.emplace_back(ri, rj, it.value());
    }
  red.matrix.resize(red.free_dofs.size(), red.free_dofs.size());
  red.matrix.setFromTriplets(trips.begin(), trips.end());
  red.rhs = red.restrict_vec(system.rhs);
  return red;
}

double max_asymmetry(const Eigen::SparseMatrix<double>& m) {
  Eigen::SparseMatrix<double> d = Eigen::SparseMatrix<double>(m.transpose()) - m;
  double worst = 0.0;
  for (int col = 0; col < d.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(d, col); it; ++it)
      worst = std::max(worst, std::abs(it.value()));
  return worst;
}

void write_matrix_market(std::ostream& os, const Eigen::SparseMatrix<double>& m) {
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << m.rows() << " " << m.cols() << " " << m.nonZeros() << "\n";
  char buf[64];
  for (int col = 0; col < m.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, col); it; ++it) {
      std::snprintf(buf, sizeof(buf), "%d %d %.17g\n", static_cast<int>(it.row()) + 1,
                    static_cast<int>(it.col()) + 1, it.value());
      os << buf;
    }
}

}  // namespace karst
