#pragma once

#include <functional>

#include "karst/mesh.hpp"
#include "karst/problem.hpp"

namespace karst {

/// Closed-form solution of the coupled problem with matching sources.
/// u^c(x) = sin(pi x / L), u^m(x,y) = sin(pi x / L) * phi(|y|) with
/// phi(t) = (H_m - t)(a + b t); b is chosen so the interface flux-jump
/// identity K * [d_y u^m]_{y=0} = alpha * (u^m(.,0) - u^c) holds, which makes
/// (u^m, u^c) the exact weak solution for regular (L2) sources.
struct ManufacturedCase {
  enum class Tag { SmoothDecoupled, LayeredCoupled };

  Tag tag = Tag::SmoothDecoupled;
  DomainGeometry geometry;
  ProblemData data;
  double layer_a = 0.0;
  double layer_b = 0.0;

  std::function<double(double, double)> exact_matrix;
  std::function<Vec2(double, double)> exact_matrix_gradient;
  std::function<double(double)> exact_conduit;
  std::function<double(double)> exact_conduit_deriv;

  /// K*[d_y u^m] - alpha*(u^m - u^c) at (x, 0); ~1e-16 by construction.
  double interface_identity_residual(double x) const;
};

/// interface_value = a * H_m = u^m(x,0)/u^c(x). The default 1 yields a
/// globally smooth solution; values != 1 give a genuine gradient kink at y=0
/// and a nonzero exchange flux.
ManufacturedCase make_layered_case(const DomainGeometry& geom, double conductivity,
                                   double conduit_conductivity, double exchange,
                                   double interface_value = 1.0);

/// Layered case with alpha_ex = 0 and interface value 1: smooth and decoupled.
ManufacturedCase make_smooth_decoupled_case(const DomainGeometry& geom, double conductivity,
                                            double conduit_conductivity);

}  // namespace karst
