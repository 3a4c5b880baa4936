#pragma once

#include "karst/space.hpp"

namespace karst {

/// Family of the Clement image space on this mesh: continuous piecewise
/// P1 (triangles) or Q1 (rectangles) with zero boundary values.
FamilyTag clement_family(const Mesh& mesh);

/// vertex id -> matrix dof id, valid for families whose matrix dofs are
/// exactly the vertex dofs (P1/Q1).
std::vector<int> vertex_dof_map(const DofMap& dm);

/// Mean of v over every vertex patch W_x (L2 projection onto constants).
std::vector<double> patch_means(const Mesh& mesh, const ScalarField& v, int quad_degree);

/// Nodal Clement function from per-vertex values; boundary nodes forced to 0.
FeFunction clement_from_node_means(const DofMap& clement_dm, const std::vector<double>& means);

FeFunction clement_interpolate(const DofMap& clement_dm, const ScalarField& v, int quad_degree);

}  // namespace karst
