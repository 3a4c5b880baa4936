#include <cmath>

#include "doctest.h"
#include "karst/assembly.hpp"
#include "karst/solver.hpp"

using namespace karst;

namespace {

ProblemData zero_source_data(double k, double d, double alpha) {
  ProblemData p;
  p.conductivity = k;
  p.conduit_conductivity = d;
  p.exchange = alpha;
  return p;
}

}  // namespace

TEST_CASE("decoupled system: stiffness row sums and conduit block") {
  const Mesh mesh = build_graded_mesh({1.0, 1.0}, 3, 3, Grading::uniform());
  const DofMap dm(mesh, FamilyTag::Q1Rect);
  const SparseSystem sys = assemble_system(dm, zero_source_data(2.0, 3.0, 0.0), false);

  CHECK(max_asymmetry(sys.matrix) <= 1e-12);

  // Partition of unity: interior matrix rows sum to zero.
  const Eigen::MatrixXd dense(sys.matrix);
  for (int d = 0; d < dm.matrix_dof_count(); ++d) {
    if (dm.matrix_dof_constrained(d)) continue;
    CHECK(std::abs(dense.row(d).head(dm.matrix_dof_count()).sum()) <= 1e-12);
    // No coupling into the conduit block when exchange is off.
    CHECK(dense.row(d).tail(dm.conduit_dof_count()).cwiseAbs().maxCoeff() <= 1e-14);
  }

  // Conduit block is the 1d stiffness: D/h on uniform cells.
  const double h = 1.0 / 3.0;
  const auto& nodes0 = dm.conduit_edge_dofs(0);
  const int g0 = dm.conduit_global(nodes0[0]);
  const int g1 = dm.conduit_global(nodes0[1]);
  CHECK(dense(g0, g1) == doctest::Approx(-3.0 / h).epsilon(1e-13));
  CHECK(dense(g1, g1) == doctest::Approx(2.0 * 3.0 / h).epsilon(1e-13));

  // Same partition-of-unity property for P1 on the split mesh.
  const Mesh tri = split_to_triangles(mesh);
  const DofMap dm_tri(tri, FamilyTag::P1Tri);
  const SparseSystem sys_tri = assemble_system(dm_tri, zero_source_data(2.0, 3.0, 0.0), false);
  const Eigen::MatrixXd dense_tri(sys_tri.matrix);
  for (int d = 0; d < dm_tri.matrix_dof_count(); ++d)
    if (!dm_tri.matrix_dof_constrained(d))
      CHECK(std::abs(dense_tri.row(d).head(dm_tri.matrix_dof_count()).sum()) <= 1e-12);
}

TEST_CASE("exchange coupling reproduces the 1d mass matrix") {
  // One cell per half; the conduit is a single edge of length L.
  const double L = 1.0, alpha = 1.0, d_cond = 1.0;
  const Mesh mesh = build_graded_mesh({L, 1.0}, 1, 1, Grading::uniform());
  const DofMap dm(mesh, FamilyTag::Q1Rect);
  const SparseSystem sys = assemble_system(dm, zero_source_data(1.0, d_cond, alpha), false);
  const Eigen::MatrixXd dense(sys.matrix);

  const auto& nodes = dm.conduit_edge_dofs(0);
  const int g0 = dm.conduit_global(nodes[0]);
  const int g1 = dm.conduit_global(nodes[1]);
  // D * 1d stiffness + alpha * 1d mass.
  CHECK(dense(g0, g0) == doctest::Approx(d_cond / L + alpha * L / 3.0).epsilon(1e-13));
  CHECK(dense(g0, g1) == doctest::Approx(-d_cond / L + alpha * L / 6.0).epsilon(1e-13));
}

TEST_CASE("homogeneous data gives the zero solution") {
  const Mesh mesh = build_graded_mesh({1.0, 1.0}, 3, 2, Grading::uniform());
  const DofMap dm(mesh, FamilyTag::Q1Rect);
  const SparseSystem sys = assemble_system(dm, zero_source_data(1.0, 1.0, 1.0), false);
  const ReducedSystem red = apply_dirichlet(sys, dm);
  SolveReport rep;
  const Eigen::VectorXd x = solve(red, SolverConfig{}, &rep);
  CHECK(x.norm() == 0.0);
  CHECK(rep.iterations == 0);
}

TEST_CASE("dirichlet elimination keeps symmetry and drops constrained dofs") {
  const Mesh mesh = build_graded_mesh({1.0, 1.0}, 4, 4, Grading::geometric(0.5));
  const DofMap dm(mesh, FamilyTag::Q1Rect);
  const SparseSystem sys = assemble_system(dm, zero_source_data(1.0, 1.0, 2.0), false);
  const ReducedSystem red = apply_dirichlet(sys, dm);
  CHECK(red.matrix.rows() == static_cast<int>(dm.free_dofs().size()));
  CHECK(max_asymmetry(red.matrix) <= 1e-12);

  // Expansion pads with zeros exactly at the constrained dofs.
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(red.matrix.rows());
  const Eigen::VectorXd full = red.expand(ones);
  for (int d = 0; d < dm.matrix_dof_count(); ++d)
    CHECK(full[d] == (dm.matrix_dof_constrained(d) ? 0.0 : 1.0));
}

TEST_CASE("nonconforming families demand the penalty") {
  const Mesh mesh = split_to_triangles(build_graded_mesh({1.0, 1.0}, 2, 2, Grading::uniform()));
  const DofMap dm(mesh, FamilyTag::CR1Tri);
  CHECK_THROWS_AS(assemble_system(dm, zero_source_data(1.0, 1.0, 0.0), false),
                  std::invalid_argument);
  CHECK_NOTHROW(assemble_system(dm, zero_source_data(1.0, 1.0, 0.0), true));
}

TEST_CASE("penalised CR system is SPD on the free dofs") {
  const Mesh mesh = build_graded_mesh({1.0, 1.0}, 3, 2, Grading::uniform());
  const DofMap dm(mesh, FamilyTag::CR2RectQ1plus);
  const SparseSystem sys = assemble_system(dm, zero_source_data(1.0, 1.0, 1.0), true);
  const ReducedSystem red = apply_dirichlet(sys, dm);
  const Eigen::MatrixXd dense(red.matrix);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense);
  CHECK(eig.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("matrix market export") {
  const Mesh mesh = build_graded_mesh({1.0, 1.0}, 1, 1, Grading::uniform());
  const DofMap dm(mesh, FamilyTag::Q1Rect);
  const SparseSystem sys = assemble_system(dm, zero_source_data(1.0, 1.0, 0.0), false);
  std::ostringstream os;
  write_matrix_market(os, sys.matrix);
  const std::string text = os.str();
  CHECK(text.rfind("%%MatrixMarket matrix coordinate real general", 0) == 0);
  CHECK(text.find(" 8 ") != std::string::npos);  // 6 matrix + 2 conduit dofs
}

TEST_CASE("non-finite sources are rejected") {
  const Mesh mesh = build_graded_mesh({1.0, 1.0}, 2, 2, Grading::uniform());
  const DofMap dm(mesh, FamilyTag::Q1Rect);
  ProblemData data;
  data.source_matrix = [](double, double) { return std::nan(""); };
  CHECK_THROWS_AS(assemble_system(dm, data, false), std::runtime_error);
}

TEST_CASE("physical parameter derivation") {
  const ProblemData p = ProblemData::from_physical(2.0, 0.5, 9.81, 0.1, 1.0);
  CHECK(p.conductivity == doctest::Approx(2.0 * 9.81 / 0.5).epsilon(1e-14));
  CHECK(p.conduit_conductivity == doctest::Approx(0.001 * 9.81 / 6.0).epsilon(1e-14));
  CHECK_THROWS_AS(ProblemData::from_physical(-1.0, 0.5, 9.81, 0.1, 1.0), std::invalid_argument);
}
