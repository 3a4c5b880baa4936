#pragma once

#include "karst/estimator.hpp"
#include "karst/manufactured.hpp"
#include "karst/norms.hpp"
#include "karst/solver.hpp"

namespace karst {

struct StudyLevel {
  int level = 0;
  int elements = 0;
  int dofs = 0;
  double h_short_min = 0.0;   // min over cells of the short length
  double h_long_max = 0.0;    // max over cells of the long length
  double max_aspect = 1.0;
  double error = 0.0;         // ||u - u_h||_h
  double theta = 0.0;
  double zeta = 0.0;
  double alignment_error = 0.0;       // m1(u - u_h)
  double effectivity = 0.0;           // theta / error (nan when error or theta is 0)
  double reliability_const = 0.0;     // error / (m1 * sqrt(theta^2 + zeta^2))
  double max_local_efficiency = 0.0;  // max_K theta_K / (||e||_{h,W_K} + sum zeta_K')
  double jump_seminorm = 0.0;         // J(u_h,u_h)^(1/2), nonconforming families
  int solver_iterations = 0;
  double solver_residual = 0.0;
  double error_rate = 0.0;  // log2(prev/cur), nan on the first level
  double theta_rate = 0.0;
};

struct StudyOptions {
  SolverConfig solver;
  bool isotropic = false;
  int quad_degree = -1;  // error/indicator quadrature; default 2*deg+2
  bool with_local_efficiency = true;
};

struct LevelSolution {
  FeFunction u_h;
  EstimatorReport report;
  SolveReport solving;
};

/// Assemble, solve and estimate one case on one mesh.
LevelSolution solve_level(const ManufacturedCase& mc, const DofMap& dm, const StudyOptions& opts);

/// Convergence study over a mesh sequence (at least two levels).
std::vector<StudyLevel> run_study(const ManufacturedCase& mc, FamilyTag family,
                                  const std::vector<Mesh>& meshes, const StudyOptions& opts);

std::string study_to_csv(const std::vector<StudyLevel>& levels);
std::string study_to_json(const std::vector<StudyLevel>& levels);

}  // namespace karst
