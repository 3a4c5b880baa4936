#pragma once

#include "karst/assembly.hpp"

namespace karst {

struct SolverConfig {
  enum class Method { ConjugateGradient, DenseDirect };
  Method method = Method::ConjugateGradient;
  double rel_tol = 1e-10;
  int max_iterations = 20000;
  bool jacobi = false;

  void validate() const {
    if (!(rel_tol > 0.0 && rel_tol < 1.0))
      throw std::invalid_argument("solver: tolerance must be in (0,1)");
    if (max_iterations < 1) throw std::invalid_argument("solver: max iterations must be >= 1");
  }
};

struct SolveReport {
  int iterations = 0;
  double final_residual = 0.0;  // ||Ax-b|| / ||b|| (0 for b = 0)
  std::string method;
};

/// Solve the reduced SPD system. Zero rhs short-circuits to x = 0.
/// Throws on non-convergence or non-finite entries.
Eigen::VectorXd solve(const ReducedSystem& system, const SolverConfig& cfg,
                      SolveReport* report = nullptr);

}  // namespace karst
