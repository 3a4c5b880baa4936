#include "karst/elements.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "karst/quadrature.hpp"

namespace karst {

FamilyTag family_from_string(const std::string& name) {
  static const std::map<std::string, FamilyTag> table = {
      {"p1", FamilyTag::P1Tri},          {"p2", FamilyTag::P2Tri},
      {"p3", FamilyTag::P3Tri},          {"q1", FamilyTag::Q1Rect},
      {"q2", FamilyTag::Q2Rect},         {"q3", FamilyTag::Q3Rect},
      {"cr1", FamilyTag::CR1Tri},        {"cr2", FamilyTag::CR2RectQ1plus},
      {"cr3", FamilyTag::CR3RectP2}};
  auto it = table.find(name);
  if (it == table.end()) throw std::invalid_argument("unknown element family: " + name);
  return it->second;
}

std::string family_to_string(FamilyTag tag) {
  switch (tag) {
    case FamilyTag::P1Tri: return "p1";
    case FamilyTag::P2Tri: return "p2";
    case FamilyTag::P3Tri: return "p3";
    case FamilyTag::Q1Rect: return "q1";
    case FamilyTag::Q2Rect: return "q2";
    case FamilyTag::Q3Rect: return "q3";
    case FamilyTag::CR1Tri: return "cr1";
    case FamilyTag::CR2RectQ1plus: return "cr2";
    case FamilyTag::CR3RectP2: return "cr3";
  }
  return "?";
}

Poly2 Poly2::monomial(int px, int py, double c) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(px + 1, py + 1);
  m(px, py) = c;
  return Poly2(m);
}

double Poly2::operator()(const Vec2& p) const {
  // Horner in y inside Horner in x.
  double acc = 0.0;
  for (int i = static_cast<int>(coef_.rows()) - 1; i >= 0; --i) {
    double row = 0.0;
    for (int j = static_cast<int>(coef_.cols()) - 1; j >= 0; --j) row = row * p.y() + coef_(i, j);
    acc = acc * p.x() + row;
  }
  return acc;
}

Poly2 Poly2::dx() const {
  if (coef_.rows() == 1) return Poly2();
  Eigen::MatrixXd d(coef_.rows() - 1, coef_.cols());
  for (int i = 1; i < coef_.rows(); ++i) d.row(i - 1) = i * coef_.row(i);
  return Poly2(d);
}

Poly2 Poly2::dy() const {
  if (coef_.cols() == 1) return Poly2();
  Eigen::MatrixXd d(coef_.rows(), coef_.cols() - 1);
  for (int j = 1; j < coef_.cols(); ++j) d.col(j - 1) = j * coef_.col(j);
  return Poly2(d);
}

Vec2 Poly2::gradient(const Vec2& p) const { return Vec2(dx()(p), dy()(p)); }

Eigen::Matrix2d Poly2::hessian(const Vec2& p) const {
  Eigen::Matrix2d h;
  h(0, 0) = dx().dx()(p);
  h(0, 1) = h(1, 0) = dx().dy()(p);
  h(1, 1) = dy().dy()(p);
  return h;
}

Poly2 Poly2::operator*(const Poly2& o) const {
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(coef_.rows() + o.coef_.rows() - 1,
                                            coef_.cols() + o.coef_.cols() - 1);
  for (int i = 0; i < coef_.rows(); ++i)
    for (int j = 0; j < coef_.cols(); ++j)
      if (coef_(i, j) != 0.0)
        for (int k = 0; k < o.coef_.rows(); ++k)
          for (int l = 0; l < o.coef_.cols(); ++l) r(i + k, j + l) += coef_(i, j) * o.coef_(k, l);
  return Poly2(r);
}

Poly2& Poly2::operator+=(const Poly2& o) {
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(std::max(coef_.rows(), o.coef_.rows()),
                                            std::max(coef_.cols(), o.coef_.cols()));
  r.topLeftCorner(coef_.rows(), coef_.cols()) = coef_;
  r.topLeftCorner(o.coef_.rows(), o.coef_.cols()) += o.coef_;
  coef_ = std::move(r);
  return *this;
}

double Poly1::operator()(double x) const {
  double acc = 0.0;
  for (int i = static_cast<int>(coef_.size()) - 1; i >= 0; --i) acc = acc * x + coef_[i];
  return acc;
}

double Poly1::derivative(double x) const {
  double acc = 0.0;
  for (int i = static_cast<int>(coef_.size()) - 1; i >= 1; --i) acc = acc * x + i * coef_[i];
  return acc;
}

double Poly1::second_derivative(double x) const {
  double acc = 0.0;
  for (int i = static_cast<int>(coef_.size()) - 1; i >= 2; --i)
    acc = acc * x + i * (i - 1) * coef_[i];
  return acc;
}

const std::vector<std::pair<Vec2, Vec2>>& ReferenceElement::reference_edges(CellShape shape) {
  // Rectangle order matches the CR dof convention: bottom, top, left, right.
  static const std::vector<std::pair<Vec2, Vec2>> rect = {
      {Vec2(0, 0), Vec2(1, 0)}, {Vec2(0, 1), Vec2(1, 1)},
      {Vec2(0, 0), Vec2(0, 1)}, {Vec2(1, 0), Vec2(1, 1)}};
  static const std::vector<std::pair<Vec2, Vec2>> tri = {
      {Vec2(0, 0), Vec2(1, 0)}, {Vec2(1, 0), Vec2(0, 1)}, {Vec2(0, 1), Vec2(0, 0)}};
  return shape == CellShape::Rectangle ? rect : tri;
}

double ReferenceElement::apply_dof(const Dof& dof, const std::function<double(const Vec2&)>& f) const {
  switch (dof.kind) {
    case Dof::Kind::Point:
      return f(dof.point);
    case Dof::Kind::EdgeMoment: {
      const auto& [a, b] = reference_edges(shape)[dof.local_edge];
      const double arc = (b - a).norm();
      double acc = 0.0;
      for (const auto& q : edge_rule(2 * degree + 2)) acc += q.w * f(a + q.x * (b - a));
      acc *= arc;
      return dof.normalize_edge ? acc / arc : acc;
    }
    case Dof::Kind::CellMoment: {
      double acc = 0.0;
      for (const auto& q : reference_rule(shape, 2 * degree + 2))
        acc += q.w * dof.cell_weight(q.xy) * f(q.xy);
      return acc;
    }
  }
  return 0.0;
}

Eigen::MatrixXd ReferenceElement::unisolvence_matrix() const {
  Eigen::MatrixXd m(size(), size());
  for (int i = 0; i < size(); ++i)
    for (int j = 0; j < size(); ++j)
      m(i, j) = apply_dof(dofs[i], [&](const Vec2& p) { return basis[j](p); });
  return m;
}

namespace {

Dof point_dof(Vec2 p, Dof::Entity entity, int local_index, int local_edge = -1) {
  Dof d;
  d.kind = Dof::Kind::Point;
  d.point = p;
  d.entity = entity;
  d.local_index = local_index;
  d.local_edge = local_edge;
  return d;
}

Dof edge_mean_dof(int local_edge, bool normalize) {
  Dof d;
  d.kind = Dof::Kind::EdgeMoment;
  d.local_edge = local_edge;
  d.normalize_edge = normalize;
  d.entity = Dof::Entity::Edge;
  d.local_index = local_edge;
  return d;
}

Dof cell_moment_dof(Poly2 weight, int local_index) {
  Dof d;
  d.kind = Dof::Kind::CellMoment;
  d.cell_weight = std::move(weight);
  d.entity = Dof::Entity::Cell;
  d.local_index = local_index;
  return d;
}

// Dual (Lagrange) basis for point dofs: solve V^T C^T = I with
// V(i,k) = mono_k(node_i).
std::vector<Poly2> dual_basis(const std::vector<Poly2>& monomials, const std::vector<Dof>& dofs,
                              const ReferenceElement& probe) {
  const int n = static_cast<int>(monomials.size());
  Eigen::MatrixXd v(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      v(i, k) = probe.apply_dof(dofs[i], [&](const Vec2& p) { return monomials[k](p); });
  const Eigen::MatrixXd c = v.fullPivLu().solve(Eigen::MatrixXd::Identity(n, n));
  std::vector<Poly2> basis(n);
  for (int j = 0; j < n; ++j) {
    Poly2 acc;
    for (int k = 0; k < n; ++k) {
      Poly2 term = monomials[k];
      Eigen::MatrixXd coef = term.coefficients() * c(k, j);
      acc += Poly2(coef);
    }
    basis[j] = acc;
  }
  return basis;
}

std::vector<Poly2> total_degree_monomials(int degree) {
  std::vector<Poly2> m;
  for (int d = 0; d <= degree; ++d)
    for (int px = d; px >= 0; --px) m.push_back(Poly2::monomial(px, d - px));
  return m;
}

std::vector<Poly2> tensor_monomials(int degree) {
  std::vector<Poly2> m;
  for (int px = 0; px <= degree; ++px)
    for (int py = 0; py <= degree; ++py) m.push_back(Poly2::monomial(px, py));
  return m;
}

// Coefficient helper for the explicit CR bases.
Poly2 from_terms(const std::vector<std::tuple<int, int, double>>& terms) {
  Poly2 acc;
  for (const auto& [px, py, c] : terms) acc += Poly2::monomial(px, py, c);
  return acc;
}

ReferenceElement make_lagrange(FamilyTag tag, CellShape shape, int degree, int conduit_degree) {
  ReferenceElement el;
  el.tag = tag;
  el.shape = shape;
  el.conforming = true;
  el.degree = degree;
  el.conduit_degree = conduit_degree;

  const auto& edges = ReferenceElement::reference_edges(shape);
  std::vector<Dof> dofs;
  if (shape == CellShape::Triangle) {
    const Vec2 verts[3] = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
    for (int i = 0; i < 3; ++i) dofs.push_back(point_dof(verts[i], Dof::Entity::Vertex, i));
    for (int e = 0; e < 3; ++e)
      for (int k = 1; k < degree; ++k) {
        const Vec2 p = edges[e].first + (static_cast<double>(k) / degree) * (edges[e].second - edges[e].first);
        dofs.push_back(point_dof(p, Dof::Entity::Edge, e, e));
      }
    int cell_idx = 0;
    for (int i = 1; i < degree; ++i)
      for (int j = 1; i + j < degree; ++j)
        dofs.push_back(point_dof(Vec2(static_cast<double>(i) / degree, static_cast<double>(j) / degree),
                                 Dof::Entity::Cell, cell_idx++));
    el.dofs = std::move(dofs);
    el.basis = dual_basis(total_degree_monomials(degree), el.dofs, el);
  } else {
    const Vec2 verts[4] = {Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)};
    for (int i = 0; i < 4; ++i) dofs.push_back(point_dof(verts[i], Dof::Entity::Vertex, i));
    for (int e = 0; e < 4; ++e)
      for (int k = 1; k < degree; ++k) {
        const Vec2 p = edges[e].first + (static_cast<double>(k) / degree) * (edges[e].second - edges[e].first);
        dofs.push_back(point_dof(p, Dof::Entity::Edge, e, e));
      }
    int cell_idx = 0;
    for (int i = 1; i < degree; ++i)
      for (int j = 1; j < degree; ++j)
        dofs.push_back(point_dof(Vec2(static_cast<double>(i) / degree, static_cast<double>(j) / degree),
                                 Dof::Entity::Cell, cell_idx++));
    el.dofs = std::move(dofs);
    el.basis = dual_basis(tensor_monomials(degree), el.dofs, el);
  }
  return el;
}

ReferenceElement make_cr1() {
  ReferenceElement el;
  el.tag = FamilyTag::CR1Tri;
  el.shape = CellShape::Triangle;
  el.conforming = false;
  el.degree = 1;
  el.conduit_degree = 1;
  for (int e = 0; e < 3; ++e) el.dofs.push_back(edge_mean_dof(e, /*normalize=*/true));
  // Dual to the edge means: 1 - 2*lambda_opposite.
  el.basis = {from_terms({{0, 0, 1.0}, {0, 1, -2.0}}),                  // edge (v0,v1)
              from_terms({{0, 0, -1.0}, {1, 0, 2.0}, {0, 1, 2.0}}),     // edge (v1,v2)
              from_terms({{0, 0, 1.0}, {1, 0, -2.0}})};                 // edge (v2,v0)
  return el;
}

ReferenceElement make_cr2() {
  ReferenceElement el;
  el.tag = FamilyTag::CR2RectQ1plus;
  el.shape = CellShape::Rectangle;
  el.conforming = false;
  el.degree = 2;
  el.conduit_degree = 1;
  for (int e = 0; e < 4; ++e) el.dofs.push_back(edge_mean_dof(e, /*normalize=*/false));
  const Poly2 q5 = from_terms({{1, 1, 12.0}, {1, 0, -6.0}, {0, 1, -6.0}, {0, 0, 3.0}});
  el.dofs.push_back(cell_moment_dof(q5, 0));
  el.basis = {
      from_terms({{0, 0, 1.0}, {0, 1, -4.0}, {0, 2, 3.0}}),               // 1 - 4y + 3y^2
      from_terms({{0, 1, -2.0}, {0, 2, 3.0}}),                            // -2y + 3y^2
      from_terms({{0, 0, 0.5}, {1, 0, -1.0}, {0, 1, 3.0}, {0, 2, -3.0}}), // 1/2 - x + 3y - 3y^2
      from_terms({{0, 0, -0.5}, {1, 0, 1.0}, {0, 1, 3.0}, {0, 2, -3.0}}), // -1/2 + x + 3y - 3y^2
      q5,                                                                 // 3(2x-1)(2y-1)
  };
  return el;
}

ReferenceElement make_cr3() {
  ReferenceElement el;
  el.tag = FamilyTag::CR3RectP2;
  el.shape = CellShape::Rectangle;
  el.conforming = false;
  el.degree = 2;
  el.conduit_degree = 1;
  for (int e = 0; e < 4; ++e) el.dofs.push_back(edge_mean_dof(e, /*normalize=*/false));
  const Poly2 q5 = from_terms({{1, 1, 12.0}, {1, 0, -6.0}, {0, 1, -6.0}, {0, 0, 3.0}});
  el.dofs.push_back(cell_moment_dof(q5, 0));
  el.dofs.push_back(cell_moment_dof(Poly2::monomial(0, 0), 1));
  el.basis = {
      from_terms({{0, 0, 1.0}, {0, 1, -4.0}, {0, 2, 3.0}}),  // 1 - 4y + 3y^2
      from_terms({{0, 1, -2.0}, {0, 2, 3.0}}),               // -2y + 3y^2
      from_terms({{0, 0, 1.0}, {1, 0, -4.0}, {2, 0, 3.0}}),  // 1 - 4x + 3x^2
      from_terms({{1, 0, -2.0}, {2, 0, 3.0}}),               // -2x + 3x^2
      q5,                                                    // 3(2x-1)(2y-1)
      from_terms({{1, 0, 6.0}, {2, 0, -6.0}, {0, 1, 6.0}, {0, 2, -6.0}, {0, 0, -1.0}}),
  };
  return el;
}

ReferenceElement make_family(FamilyTag tag) {
  switch (tag) {
    case FamilyTag::P1Tri: return make_lagrange(tag, CellShape::Triangle, 1, 1);
    case FamilyTag::P2Tri: return make_lagrange(tag, CellShape::Triangle, 2, 2);
    case FamilyTag::P3Tri: return make_lagrange(tag, CellShape::Triangle, 3, 3);
    case FamilyTag::Q1Rect: return make_lagrange(tag, CellShape::Rectangle, 1, 1);
    case FamilyTag::Q2Rect: return make_lagrange(tag, CellShape::Rectangle, 2, 2);
    case FamilyTag::Q3Rect: return make_lagrange(tag, CellShape::Rectangle, 3, 3);
    case FamilyTag::CR1Tri: return make_cr1();
    case FamilyTag::CR2RectQ1plus: return make_cr2();
    case FamilyTag::CR3RectP2: return make_cr3();
  }
  throw std::invalid_argument("unknown element family");
}

}  // namespace

const ReferenceElement& ReferenceElement::get(FamilyTag tag) {
  static std::map<FamilyTag, ReferenceElement> cache;
  auto it = cache.find(tag);
  if (it == cache.end()) {
    ReferenceElement el = make_family(tag);
    const Eigen::MatrixXd u = el.unisolvence_matrix();
    const double err = (u - Eigen::MatrixXd::Identity(el.size(), el.size())).cwiseAbs().maxCoeff();
    if (err > 1e-12)
      throw std::logic_error("reference element " + family_to_string(tag) + " is not unisolvent");
    it = cache.emplace(tag, std::move(el)).first;
  }
  return it->second;
}

AffineMap element_map(const Mesh& mesh, int elem, FamilyTag family) {
  const Element& el = mesh.elements[elem];
  AffineMap map;
  map.origin = mesh.vertices[el.v[0]];
  if (el.shape == CellShape::Triangle) {
    map.jac.col(0) = mesh.vertices[el.v[1]] - map.origin;
    map.jac.col(1) = mesh.vertices[el.v[2]] - map.origin;
  } else {
    const Vec2 ex = mesh.vertices[el.v[1]] - map.origin;
    const Vec2 ey = mesh.vertices[el.v[3]] - map.origin;
    const double dx = ex.norm(), dy = ey.norm();
    if (family == FamilyTag::CR2RectQ1plus && dx > dy) {
      // Reference y goes to the stretching direction (here: x).
      map.jac.col(0) = ey;
      map.jac.col(1) = ex;
    } else {
      map.jac.col(0) = ex;
      map.jac.col(1) = ey;
    }
  }
  map.det = map.jac.determinant();
  map.jac_inv = map.jac.inverse();
  return map;
}

AffineMap edge_adapted_map(const Mesh& mesh, int edge, int side_elem) {
  const Edge& e = mesh.edges[edge];
  if (side_elem != e.elem_front && side_elem != e.elem_back)
    throw std::invalid_argument("edge_adapted_map: element is not incident to the edge");
  const Element& el = mesh.elements[side_elem];
  const Vec2 a = mesh.vertices[e.v[0]];
  const Vec2 b = mesh.vertices[e.v[1]];

  AffineMap map;
  map.origin = a;
  map.jac.col(0) = b - a;
  if (el.shape == CellShape::Triangle) {
    int opposite = -1;
    for (int k = 0; k < 3; ++k)
      if (el.v[k] != e.v[0] && el.v[k] != e.v[1]) opposite = el.v[k];
    map.jac.col(1) = mesh.vertices[opposite] - a;
  } else {
    // Corner adjacent to a but not on the edge.
    int ia = -1;
    for (int k = 0; k < 4; ++k)
      if (el.v[k] == e.v[0]) ia = k;
    for (int step : {1, 3}) {
      const int cand = el.v[(ia + step) % 4];
      if (cand != e.v[1]) map.jac.col(1) = mesh.vertices[cand] - a;
    }
  }
  map.det = map.jac.determinant();
  map.jac_inv = map.jac.inverse();
  return map;
}

double element_bubble(CellShape shape, const Vec2& r) {
  if (shape == CellShape::Triangle) return 27.0 * r.x() * r.y() * (1.0 - r.x() - r.y());
  return 16.0 * r.x() * (1.0 - r.x()) * r.y() * (1.0 - r.y());
}

Vec2 element_bubble_gradient(CellShape shape, const Vec2& r) {
  const double x = r.x(), y = r.y();
  if (shape == CellShape::Triangle)
    return Vec2(27.0 * y * (1.0 - 2.0 * x - y), 27.0 * x * (1.0 - x - 2.0 * y));
  return Vec2(16.0 * (1.0 - 2.0 * x) * y * (1.0 - y), 16.0 * x * (1.0 - x) * (1.0 - 2.0 * y));
}

double edge_bubble(CellShape shape, const Vec2& r) {
  if (shape == CellShape::Triangle) return 4.0 * r.x() * (1.0 - r.x() - r.y());
  return 4.0 * r.x() * (1.0 - r.x()) * (1.0 - r.y());
}

Vec2 edge_bubble_gradient(CellShape shape, const Vec2& r) {
  const double x = r.x(), y = r.y();
  if (shape == CellShape::Triangle) return Vec2(4.0 * (1.0 - 2.0 * x - y), -4.0 * x);
  return Vec2(4.0 * (1.0 - 2.0 * x) * (1.0 - y), -4.0 * x * (1.0 - x));
}

}  // namespace karst
