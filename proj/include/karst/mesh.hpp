#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

namespace karst {

using Vec2 = Eigen::Vector2d;

/// Rectangular aquifer cross-section: matrix Omega^m = (0,L) x (-H_m,H_m)
/// with the conduit line Omega^c = (0,L) x {0} embedded at mid-height.
struct DomainGeometry {
  double length = 1.0;       // L
  double half_height = 1.0;  // H_m
};

enum class CellShape { Rectangle, Triangle };
enum class Subdomain { Lower, Upper };
enum class EdgeLocation { InteriorMatrix, Conduit, Boundary };

/// Principal stretch directions of a cell, longest first.
/// frame() stacks them columnwise; frame()^T * frame() = diag(len_long^2, len_short^2).
struct ElementAnisotropy {
  Vec2 axis_long = Vec2::Zero();
  Vec2 axis_short = Vec2::Zero();
  double len_long = 0.0;
  double len_short = 0.0;

  double min_length() const { return len_short; }
  Eigen::Matrix2d frame() const {
    Eigen::Matrix2d c;
    c.col(0) = axis_long;
    c.col(1) = axis_short;
    return c;
  }
};

struct Element {
  CellShape shape = CellShape::Rectangle;
  std::array<int, 4> v{-1, -1, -1, -1};  // CCW; v[3] unused for triangles
  Subdomain subdomain = Subdomain::Lower;
  ElementAnisotropy anisotropy;
  double area = 0.0;
  double diameter = 0.0;  // h_K, used by the isotropic estimator mode

  int vertex_count() const { return shape == CellShape::Rectangle ? 4 : 3; }
};

/// Oriented edge with a fixed unit normal. tangent = normal rotated by +90 deg.
/// elem_front is the cell the normal points into (-1 on the boundary, where the
/// normal points outward); elem_back is the other side. Jumps are front - back.
struct Edge {
  std::array<int, 2> v{-1, -1};
  int elem_front = -1;
  int elem_back = -1;
  Vec2 normal = Vec2::Zero();
  Vec2 tangent = Vec2::Zero();
  double length = 0.0;
  double avg_height = 0.0;      // h_E: mean of |K|/|E| over incident cells
  double avg_min_length = 0.0;  // h_min,E: mean of the incident min_length values
  EdgeLocation location = EdgeLocation::InteriorMatrix;

  bool is_boundary() const { return elem_front < 0 || elem_back < 0; }
  int inner_element() const { return elem_front >= 0 ? elem_front : elem_back; }
};

struct MeshAssumptionReport {
  int max_vertex_valence = 0;
  double max_size_ratio = 1.0;         // max h_{i,K'}/h_{i,K} over touching cells
  double max_edge_height_ratio = 1.0;  // max of h_E/h_{E,K} and its inverse
  double threshold = 4.0;
  bool ratio_ok = true;
  bool valence_ok = true;
};

class Mesh {
 public:
  DomainGeometry geometry;
  std::vector<Vec2> vertices;
  std::vector<Element> elements;
  std::vector<Edge> edges;
  std::vector<int> conduit_edges;  // on y=0, ordered by x, tiling [0,L]

  std::vector<std::array<int, 4>> element_edges;   // per cell, -1 padded
  std::vector<std::vector<int>> vertex_patch;      // W_x
  std::vector<std::vector<int>> element_patch;     // W_K = K plus face neighbours
  std::vector<bool> boundary_vertex;

  // Tensor-product structure. Triangle meshes keep the parent grid plus a
  // per-triangle parent rectangle index (row-major in the grid).
  std::vector<double> grid_x, grid_y;
  std::vector<int> triangle_parent;

  bool is_triangular() const { return !elements.empty() && elements.front().shape == CellShape::Triangle; }
  int grid_cols() const { return static_cast<int>(grid_x.size()) - 1; }
  int grid_rows() const { return static_cast<int>(grid_y.size()) - 1; }

  /// Height h_{E,K} = |K|/|E| of element `elem` over edge `edge`.
  double edge_height(int edge, int elem) const;

  /// Edge point at parameter s in [0,1] measured from v[0] to v[1].
  Vec2 edge_point(int edge, double s) const;

  Vec2 element_centroid(int elem) const;

  /// Cell containing (x,y); grid walk plus a diagonal test on triangle meshes.
  int locate(const Vec2& p) const;

  double total_area() const;

  /// Structural checks (conformity, conduit tiling, anisotropy frames, areas).
  /// Throws std::logic_error on violation; meant for tests and import paths.
  void validate() const;
};

struct Grading {
  double ratio = 1.0;  // layer-thickness ratio towards y=0; 1 = uniform
  static Grading uniform() { return {1.0}; }
  static Grading geometric(double q) { return {q}; }
};

/// Tensor-product rectangle mesh over explicit grid lines. grid_y must contain 0.
Mesh build_tensor_mesh(const DomainGeometry& geom, std::vector<double> gx, std::vector<double> gy);

/// nx uniform columns; ny layers per half with thicknesses forming a geometric
/// sequence of ratio q towards y=0, mirror-symmetric about the conduit.
Mesh build_graded_mesh(const DomainGeometry& geom, int nx, int ny, const Grading& grading);

/// Split every rectangle along its SW-NE diagonal.
Mesh split_to_triangles(const Mesh& mesh);

MeshAssumptionReport check_mesh_assumptions(const Mesh& mesh, double threshold = 4.0);

/// Red refinement of the marked cells with conformity closure. For a conforming
/// axis-aligned rectangle mesh this is exactly grid-line bisection of every
/// row/column containing a mark. Rectangle meshes only.
Mesh refine(const Mesh& mesh, const std::vector<int>& marked);

Mesh refine_all(const Mesh& mesh);

/// Geometric ratio q such that the layer closest to y=0 has thickness t_min.
double grading_ratio_for_min_thickness(double half_height, int ny, double t_min);

/// Graded mesh whose conduit-adjacent cells have aspect ratio ~`aspect`,
/// choosing the layer count so the grading ratio stays moderate (q >= ~0.45).
Mesh graded_mesh_for_aspect(const DomainGeometry& geom, int nx, double aspect);

std::string mesh_to_json(const Mesh& mesh);
Mesh mesh_from_json(const std::string& text);

}  // namespace karst
