#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "karst/elements.hpp"
#include "karst/manufactured.hpp"
#include "karst/solver.hpp"

namespace karst {

/// Validated run configuration (single JSON document; unknown keys rejected).
struct RunConfig {
  DomainGeometry geometry;

  int nx = 8;
  int ny = 8;
  double grading = 1.0;  // layer ratio towards y=0; 1 = uniform
  bool triangles = false;

  FamilyTag family = FamilyTag::Q1Rect;

  enum class ProblemKind { Layered, SmoothDecoupled, Direct };
  ProblemKind problem_kind = ProblemKind::SmoothDecoupled;
  double conductivity = 1.0;
  double conduit_conductivity = 1.0;
  double exchange = 0.0;
  double interface_value = 1.0;  // layered case: u^m(x,0)/u^c(x)
  double matrix_source_const = 0.0;   // direct problems
  double conduit_source_const = 0.0;

  bool isotropic_estimator = false;

  SolverConfig solver;
  std::string export_matrix;  // Matrix Market path ("" = off)

  int adapt_max_levels = 4;
  double marking_fraction = 0.5;

  int study_levels = 4;

  std::string output_dir = "out";
  std::uint64_t seed = 42;

  Mesh build_mesh() const;
  bool has_exact_solution() const { return problem_kind != ProblemKind::Direct; }
  ManufacturedCase manufactured_case() const;  // throws for Direct
  ProblemData problem_data() const;
};

/// Parse and validate a config document. `overrides` are "dotted.path=value"
/// assignments applied before validation.
RunConfig parse_config(const std::string& json_text, const std::vector<std::string>& overrides = {});

RunConfig default_config();

}  // namespace karst
