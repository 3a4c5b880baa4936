#pragma once

#include <Eigen/Sparse>
#include <ostream>

#include "karst/problem.hpp"
#include "karst/space.hpp"

namespace karst {

/// Assembled symmetric system over all dofs (matrix block first, then
/// conduit block), before boundary-condition elimination.
struct SparseSystem {
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd rhs;
};

/// System restricted to the free dofs; expand() pads the eliminated
/// (homogeneous Dirichlet) dofs with zeros.
struct ReducedSystem {
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd rhs;
  std::vector<int> free_dofs;
  int full_size = 0;

  Eigen::VectorXd expand(const Eigen::VectorXd& x) const;
  Eigen::VectorXd restrict_vec(const Eigen::VectorXd& full) const;
};

/// Default quadrature degree: 2*deg+2, plus 4 on the right-hand side when the
/// source is not elementwise polynomial.
int assembly_quad_degree(FamilyTag family);
int rhs_quad_degree(FamilyTag family);

/// Stiffness + conduit + exchange blocks and load vector. The penalty term
/// (jump stabilisation over interior matrix and conduit edges) is required
/// for nonconforming families and rejected for conforming ones if requested.
SparseSystem assemble_system(const DofMap& dm, const ProblemData& data, bool penalty);

ReducedSystem apply_dirichlet(const SparseSystem& system, const DofMap& dm);

double max_asymmetry(const Eigen::SparseMatrix<double>& m);

void write_matrix_market(std::ostream& os, const Eigen::SparseMatrix<double>& m);

}  // namespace karst
