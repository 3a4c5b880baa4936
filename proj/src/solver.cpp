#include "karst/solver.hpp"

#include <cmath>

namespace karst {

namespace {

Eigen::VectorXd conjugate_gradient(const Eigen::SparseMatrix<double>& a, const Eigen::VectorXd& b,
                                   const SolverConfig& cfg, SolveReport& rep) {
  const int n = static_cast<int>(b.size());
  Eigen::VectorXd inv_diag = Eigen::VectorXd::Ones(n);
  if (cfg.jacobi) {
    const Eigen::VectorXd d = a.diagonal();
    for (int i = 0; i < n; ++i) inv_diag[i] = d[i] > 0.0 ? 1.0 / d[i] : 1.0;
  }

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd r = b;
  Eigen::VectorXd z = inv_diag.cwiseProduct(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  const double b_norm = b.norm();
  const double target = cfg.rel_tol * b_norm;

  for (int it = 0; it < cfg.max_iterations; ++it) {
    if (r.norm() <= target) {
      rep.iterations = it;
      rep.final_residual = r.norm() / b_norm;
      return x;
    }
    const Eigen::VectorXd ap = a * p;
    const double alpha = rz / p.dot(ap);
    if (!std::isfinite(alpha)) throw std::runtime_error("solver: breakdown (non-finite step)");
    x += alpha * p;
    r -= alpha * ap;
    z = inv_diag.cwiseProduct(r);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  if (r.norm() <= target) {
    rep.iterations = cfg.max_iterations;
    rep.final_residual = r.norm() / b_norm;
    return x;
  }
  throw std::runtime_error("solver: conjugate gradient did not converge within " +
                           std::to_string(cfg.max_iterations) + " iterations");
}

}  // namespace

Eigen::VectorXd solve(const ReducedSystem& system, const SolverConfig& cfg, SolveReport* report) {
  cfg.validate();
  SolveReport rep;
  const int n = static_cast<int>(system.rhs.size());
  if (system.matrix.rows() != n || system.matrix.cols() != n)
    throw std::invalid_argument("solver: system is not square");
  if (!system.rhs.allFinite()) throw std::invalid_argument("solver: non-finite right-hand side");

  Eigen::VectorXd x;
  if (system.rhs.norm() == 0.0) {
    x = Eigen::VectorXd::Zero(n);
    rep.method = "trivial";
  } else if (cfg.method == SolverConfig::Method::DenseDirect) {
    const Eigen::MatrixXd dense(system.matrix);
    x = dense.ldlt().solve(system.rhs);
    rep.method = "dense-ldlt";
    rep.final_residual = (system.matrix * x - system.rhs).norm() / system.rhs.norm();
  } else {
    rep.method = cfg.jacobi ? "cg-jacobi" : "cg";
    x = conjugate_gradient(system.matrix, system.rhs, cfg, rep);
  }
  if (!x.allFinite()) throw std::runtime_error("solver: non-finite solution entries");
  if (report) *report = rep;
  return x;
}

}  // namespace karst
