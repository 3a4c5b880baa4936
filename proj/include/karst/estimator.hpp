#pragma once

#include <optional>
#include <string>

#include "karst/problem.hpp"
#include "karst/space.hpp"

namespace karst {

enum class EstimatorMode {
  AnisotropicConforming,
  AnisotropicNonconforming,
  IsotropicConforming,
  IsotropicNonconforming,
};

bool mode_is_isotropic(EstimatorMode mode);
bool mode_is_nonconforming(EstimatorMode mode);
EstimatorMode make_mode(bool nonconforming, bool isotropic);
std::string mode_to_string(EstimatorMode mode);

/// Elementwise projections of the sources: f^m onto P1 (triangles) / Q1
/// (rectangles) per cell, f^c onto constants per conduit edge.
struct ProjectedData {
  std::vector<Poly2> matrix_source;    // per element, reference coordinates
  std::vector<double> conduit_source;  // per conduit edge
};

ProjectedData project_data(const ProblemData& data, const Mesh& mesh, int quad_degree);

/// Squared contributions; theta_sq = volume + flux + conduit + jump.
struct ElementIndicator {
  double volume_sq = 0.0;   // weighted element residual
  double flux_sq = 0.0;     // weighted normal-flux jumps (interior matrix edges)
  double conduit_sq = 0.0;  // weighted conduit residual (conduit edges of the cell)
  double jump_sq = 0.0;     // weighted solution jumps (nonconforming modes only)
  double zeta_sq = 0.0;     // data approximation term

  double theta_sq() const { return volume_sq + flux_sq + conduit_sq + jump_sq; }
};

struct EstimatorReport {
  EstimatorMode mode = EstimatorMode::AnisotropicConforming;
  std::vector<ElementIndicator> local;
  double total_theta = 0.0;
  double total_zeta = 0.0;
  std::optional<double> alignment;  // m1, when computed for some field
  std::string alignment_field;      // which field m1 was computed for

  double theta_k(int elem) const { return std::sqrt(local[elem].theta_sq()); }
  double zeta_k(int elem) const { return std::sqrt(local[elem].zeta_sq); }

  std::string to_json() const;
  std::string to_csv() const;
};

struct EstimatorOptions {
  int quad_degree = -1;       // default 2*deg+2
  int data_quad_degree = -1;  // default 2*deg+6 (non-polynomial sources)
};

EstimatorReport estimate(const FeFunction& u_h, const ProblemData& data,
                         const ProjectedData& proj, EstimatorMode mode,
                         const EstimatorOptions& opts = {});

/// Gradient samplers for the alignment measure. The element-aware form gets
/// reference and physical coordinates (needed for discrete fields).
using ElementGradient = std::function<Vec2(int elem, const Vec2& ref, const Vec2& phys)>;

double alignment_measure(const Mesh& mesh, const ElementGradient& grad, int quad_degree);
double alignment_measure(const Mesh& mesh, const std::function<Vec2(const Vec2&)>& grad,
                         int quad_degree);

}  // namespace karst
