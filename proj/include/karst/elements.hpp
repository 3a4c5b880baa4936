#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "karst/mesh.hpp"

namespace karst {

/// Supported element families. CR2/CR3 are the rectangle Crouzeix-Raviart
/// variants with 5 (Q1-plus) and 6 (P2) degrees of freedom.
enum class FamilyTag {
  P1Tri,
  P2Tri,
  P3Tri,
  Q1Rect,
  Q2Rect,
  Q3Rect,
  CR1Tri,
  CR2RectQ1plus,
  CR3RectP2,
};

FamilyTag family_from_string(const std::string& name);
std::string family_to_string(FamilyTag tag);

/// Bivariate polynomial with dense coefficients; coef(i,j) multiplies x^i y^j.
class Poly2 {
 public:
  Poly2() : coef_(Eigen::MatrixXd::Zero(1, 1)) {}
  explicit Poly2(Eigen::MatrixXd coef) : coef_(std::move(coef)) {}
  static Poly2 monomial(int px, int py, double c = 1.0);

  double operator()(const Vec2& p) const;
  Vec2 gradient(const Vec2& p) const;
  Eigen::Matrix2d hessian(const Vec2& p) const;
  Poly2 dx() const;
  Poly2 dy() const;
  Poly2 operator*(const Poly2& o) const;
  Poly2& operator+=(const Poly2& o);
  const Eigen::MatrixXd& coefficients() const { return coef_; }

 private:
  Eigen::MatrixXd coef_;
};

class Poly1 {
 public:
  Poly1() : coef_{0.0} {}
  explicit Poly1(std::vector<double> coef) : coef_(std::move(coef)) {}
  double operator()(double x) const;
  double derivative(double x) const;
  double second_derivative(double x) const;

 private:
  std::vector<double> coef_;
};

/// Degree of freedom functional on the reference cell.
struct Dof {
  enum class Kind { Point, EdgeMoment, CellMoment };
  enum class Entity { Vertex, Edge, Cell };

  Kind kind = Kind::Point;
  Vec2 point = Vec2::Zero();        // Point
  int local_edge = -1;              // Point-on-edge and EdgeMoment
  bool normalize_edge = false;      // EdgeMoment: divide by reference edge length
  Poly2 cell_weight;                // CellMoment weight

  Entity entity = Entity::Vertex;
  int local_index = 0;              // vertex/edge index, or running cell-dof index
};

/// Affine reference-to-physical map. The Jacobian may have negative
/// determinant (direction-adapted CR2 maps); quadrature uses |det|.
struct AffineMap {
  Vec2 origin = Vec2::Zero();
  Eigen::Matrix2d jac = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d jac_inv = Eigen::Matrix2d::Identity();
  double det = 1.0;

  Vec2 to_physical(const Vec2& ref) const { return origin + jac * ref; }
  Vec2 to_reference(const Vec2& phys) const { return jac_inv * (phys - origin); }
  Vec2 push_gradient(const Vec2& ref_grad) const { return jac_inv.transpose() * ref_grad; }
  Eigen::Matrix2d push_hessian(const Eigen::Matrix2d& ref_hess) const {
    return jac_inv.transpose() * ref_hess * jac_inv;
  }
};

struct ReferenceElement {
  FamilyTag tag;
  CellShape shape;
  bool conforming;
  int degree;          // polynomial degree (drives quadrature defaults)
  int conduit_degree;  // degree of the 1d conduit space paired with this family
  std::vector<Poly2> basis;
  std::vector<Dof> dofs;

  int size() const { return static_cast<int>(basis.size()); }

  /// theta_i(q_j); identity to 1e-12 by construction (checked).
  Eigen::MatrixXd unisolvence_matrix() const;

  /// Apply a dof functional to an arbitrary function given in reference
  /// coordinates (moments by Gauss quadrature of degree 2*degree+2).
  double apply_dof(const Dof& dof, const std::function<double(const Vec2&)>& f) const;

  /// Reference edge endpoints, paired with the Dof::local_edge indices.
  static const std::vector<std::pair<Vec2, Vec2>>& reference_edges(CellShape shape);

  static const ReferenceElement& get(FamilyTag tag);
};

/// Reference-to-physical map for an element. CR2 maps the reference y axis
/// onto the stretching direction of the rectangle (ties go to the y axis).
AffineMap element_map(const Mesh& mesh, int elem, FamilyTag family);

/// Map adapted to an edge: the reference edge on the x axis (triangle) or
/// the bottom edge y=0 (rectangle) is carried onto `edge` with the same
/// parameterisation as Mesh::edge_point, and the image is `side_elem`.
AffineMap edge_adapted_map(const Mesh& mesh, int edge, int side_elem);

// Bubble functions on the reference cell (sup-norm 1, zero on the boundary;
// the edge bubble vanishes on all of the cell boundary except the y=0 edge).
double element_bubble(CellShape shape, const Vec2& ref);
Vec2 element_bubble_gradient(CellShape shape, const Vec2& ref);
double edge_bubble(CellShape shape, const Vec2& ref);
Vec2 edge_bubble_gradient(CellShape shape, const Vec2& ref);

}  // namespace karst
