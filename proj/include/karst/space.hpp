#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "karst/elements.hpp"
#include "karst/mesh.hpp"

namespace karst {

using ScalarField = std::function<double(const Vec2&)>;
using LineField = std::function<double(double)>;

/// Global numbering for the coupled space: matrix dofs (2d field, possibly
/// discontinuous for CR families) followed by conduit dofs (always a
/// conforming 1d space on the induced conduit mesh).
class DofMap {
 public:
  DofMap(const Mesh& mesh, FamilyTag family);

  const Mesh& mesh() const { return *mesh_; }
  FamilyTag family() const { return family_; }
  const ReferenceElement& reference() const { return *ref_; }

  int matrix_dof_count() const { return matrix_dof_count_; }
  int conduit_dof_count() const { return conduit_dof_count_; }
  int total_dof_count() const { return matrix_dof_count_ + conduit_dof_count_; }

  const std::vector<int>& cell_dofs(int elem) const { return cell_dofs_[elem]; }
  /// Global edge id carrying a local reference edge of `elem` under the
  /// family's element map.
  int cell_edge(int elem, int local_edge) const { return cell_edge_[elem][local_edge]; }

  bool matrix_dof_constrained(int dof) const { return matrix_constrained_[dof]; }
  bool conduit_dof_constrained(int dof) const { return conduit_constrained_[dof]; }

  int conduit_degree() const { return conduit_degree_; }
  /// Conduit dof ids on conduit edge `ci` (index into mesh.conduit_edges),
  /// ordered by the edge parameter: s = 0, 1/d, ..., 1.
  const std::vector<int>& conduit_edge_dofs(int ci) const { return conduit_edge_dofs_[ci]; }
  double conduit_dof_position(int dof) const { return conduit_dof_x_[dof]; }

  /// Global index of a conduit dof in the assembled system.
  int conduit_global(int dof) const { return matrix_dof_count_ + dof; }

  std::vector<int> free_dofs() const;

 private:
  const Mesh* mesh_;
  FamilyTag family_;
  const ReferenceElement* ref_;
  int matrix_dof_count_ = 0;
  int conduit_dof_count_ = 0;
  int conduit_degree_ = 1;
  std::vector<std::vector<int>> cell_dofs_;
  std::vector<std::array<int, 4>> cell_edge_;
  std::vector<bool> matrix_constrained_;
  std::vector<bool> conduit_constrained_;
  std::vector<std::vector<int>> conduit_edge_dofs_;
  std::vector<double> conduit_dof_x_;
};

/// 1d Lagrange basis on [0,1] with equispaced nodes, degree <= 3.
struct ConduitBasis {
  int degree;
  double value(int j, double s) const;
  double deriv(int j, double s) const;
  double second(int j, double s) const;
};

struct FeFunction {
  const DofMap* dofmap = nullptr;
  Eigen::VectorXd matrix_coeffs;
  Eigen::VectorXd conduit_coeffs;

  static FeFunction zeros(const DofMap& dm);
  static FeFunction from_full_vector(const DofMap& dm, const Eigen::VectorXd& x);
  Eigen::VectorXd full_vector() const;

  double value(int elem, const Vec2& ref) const;
  Vec2 gradient(int elem, const Vec2& ref) const;
  double laplacian(int elem, const Vec2& ref) const;

  double value_at(const Vec2& phys) const;  // locate + evaluate (one-sided on edges)

  /// Matrix trace on an edge from the side of `elem`, at edge parameter s.
  double trace(int elem, int edge, double s) const;
  Vec2 trace_gradient(int elem, int edge, double s) const;

  /// Conduit field u^c on conduit edge `ci` at edge parameter s.
  double conduit_value(int ci, double s) const;
  double conduit_deriv(int ci, double s) const;    // d/dx
  double conduit_second(int ci, double s) const;   // d2/dx2

  /// Average of the upper and lower matrix traces on conduit edge `ci`
  /// (the two coincide for conforming families).
  double interface_trace(int ci, double s) const;

  double matrix_l2_norm(int quad_degree = -1) const;
};

/// Value jump across an edge in the direction of its normal
/// (front minus back; minus the inner trace on boundary edges).
double jump_value(const FeFunction& f, int edge, double s);

/// Jump of conductivity * grad(u) . n_E across an interior edge.
double jump_normal_flux(const FeFunction& f, int edge, double s, double conductivity);

/// Elementwise interpolation through the family's dof functionals plus nodal
/// interpolation of the conduit field. Reproduces any function whose pullback
/// lies in the local polynomial space.
FeFunction interpolate(const DofMap& dm, const ScalarField& f_matrix, const LineField& f_conduit);

}  // namespace karst
