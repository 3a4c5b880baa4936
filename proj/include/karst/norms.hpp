#pragma once

#include "karst/estimator.hpp"
#include "karst/manufactured.hpp"
#include "karst/space.hpp"

namespace karst {

/// J(f,f) = sum over interior-matrix and conduit edges of
/// h_E / h_min,E^2 * ||[f]||^2_E.
double penalty_seminorm_sq(const FeFunction& f, int quad_degree);

/// Discrete norm^2 of a finite element function:
/// sum_K |f|^2_{1,K} + ||f^c||^2_{1,conduit} + J(f,f).
double discrete_norm_sq(const FeFunction& f, int quad_degree);

/// ||u - u_h||_h. Nonconforming: (broken H1 seminorm^2 + conduit H1 norm^2
/// + J(e,e))^(1/2). Conforming: |e|_{1,m} + ||e||_{1,c} (a sum of two norms).
double error_norm(const FeFunction& u_h, const ManufacturedCase& mc, bool nonconforming,
                  int quad_degree);

/// ||u - u_h||_{h,omega} over a patch of elements (full H1 norms locally).
double local_error_norm(const FeFunction& u_h, const ManufacturedCase& mc,
                        const std::vector<int>& patch, bool nonconforming, int quad_degree);

/// a(u, phi_i) and F(phi_i) with the exact fields, one entry per dof
/// (constrained entries zeroed), evaluated with the given quadrature degree.
/// Their difference is ~0 for the weak solution; a(u, phi) - A*x measures
/// Galerkin orthogonality.
struct WeakFormVectors {
  Eigen::VectorXd bilinear_with_exact;
  Eigen::VectorXd load;
};
WeakFormVectors exact_weak_form(const ManufacturedCase& mc, const DofMap& dm, int quad_degree);

Eigen::VectorXd exact_weak_residual(const ManufacturedCase& mc, const DofMap& dm, int quad_degree);

}  // namespace karst
