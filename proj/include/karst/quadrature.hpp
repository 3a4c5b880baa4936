#pragma once

#include <vector>

#include "karst/mesh.hpp"

namespace karst {

struct QuadPoint {
  Vec2 xy;
  double w;
};

struct QuadratureRule {
  std::vector<QuadPoint> points;

  auto begin() const { return points.begin(); }
  auto end() const { return points.end(); }
};

struct QuadPoint1d {
  double x;
  double w;
};

/// Gauss-Legendre rule on [0,1], exact for polynomials of degree 2n-1.
std::vector<QuadPoint1d> gauss_legendre_01(int n);

/// Rule on [0,1] exact for 1d polynomials up to `degree`.
std::vector<QuadPoint1d> edge_rule(int degree);

/// Rule on the reference cell, exact for polynomials up to `degree`
/// (partial degree on the square, total degree on the triangle).
/// Supported up to degree 19.
QuadratureRule reference_rule(CellShape shape, int degree);

}  // namespace karst
