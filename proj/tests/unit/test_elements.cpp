#include <cmath>

#include "doctest.h"
#include "karst/elements.hpp"
#include "karst/quadrature.hpp"

using namespace karst;

TEST_CASE("every family is unisolvent") {
  for (FamilyTag tag : {FamilyTag::P1Tri, FamilyTag::P2Tri, FamilyTag::P3Tri, FamilyTag::Q1Rect,
                        FamilyTag::Q2Rect, FamilyTag::Q3Rect, FamilyTag::CR1Tri,
                        FamilyTag::CR2RectQ1plus, FamilyTag::CR3RectP2}) {
    const ReferenceElement& ref = ReferenceElement::get(tag);
    const Eigen::MatrixXd u = ref.unisolvence_matrix();
    const double dev =
        (u - Eigen::MatrixXd::Identity(ref.size(), ref.size())).cwiseAbs().maxCoeff();
    INFO(family_to_string(tag));
    CHECK(dev <= 1e-12);
  }
}

TEST_CASE("CR2 basis values match the closed forms") {
  const ReferenceElement& ref = ReferenceElement::get(FamilyTag::CR2RectQ1plus);
  REQUIRE(ref.size() == 5);
  // q3 = 1/2 - x + 3y - 3y^2 at the origin.
  CHECK(ref.basis[2](Vec2(0.0, 0.0)) == doctest::Approx(0.5).epsilon(1e-14));
  // q1 = 1 - 4y + 3y^2; gradient at the centre is (0, -1).
  const Vec2 g = ref.basis[0].gradient(Vec2(0.5, 0.5));
  CHECK(g.x() == doctest::Approx(0.0));
  CHECK(g.y() == doctest::Approx(-1.0));
}

TEST_CASE("CR3 basis values match the closed forms") {
  const ReferenceElement& ref = ReferenceElement::get(FamilyTag::CR3RectP2);
  REQUIRE(ref.size() == 6);
  // q6 = 6(x - x^2 + y - y^2) - 1 at the centre.
  CHECK(ref.basis[5](Vec2(0.5, 0.5)) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("element bubbles peak at one and vanish on the boundary") {
  CHECK(element_bubble(CellShape::Triangle, Vec2(1.0 / 3.0, 1.0 / 3.0)) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(element_bubble(CellShape::Rectangle, Vec2(0.5, 0.5)) == doctest::Approx(1.0));
  CHECK(element_bubble(CellShape::Triangle, Vec2(0.5, 0.5)) == doctest::Approx(0.0));
  CHECK(element_bubble(CellShape::Rectangle, Vec2(0.0, 0.3)) == doctest::Approx(0.0));
  CHECK(edge_bubble(CellShape::Triangle, Vec2(0.5, 0.0)) == doctest::Approx(1.0));
  CHECK(edge_bubble(CellShape::Rectangle, Vec2(0.5, 0.0)) == doctest::Approx(1.0));
}

TEST_CASE("edge-adapted maps carry the shared edge consistently") {
  const Mesh mesh = build_graded_mesh({1.0, 1.0}, 2, 1, Grading::uniform());
  // A vertical interior edge between two cells.
  int target = -1;
  for (int ge = 0; ge < static_cast<int>(mesh.edges.size()); ++ge)
    if (mesh.edges[ge].location == EdgeLocation::InteriorMatrix) target = ge;
  REQUIRE(target >= 0);
  const Edge& e = mesh.edges[target];

  const AffineMap a = edge_adapted_map(mesh, target, e.elem_front);
  const AffineMap b = edge_adapted_map(mesh, target, e.elem_back);
  for (double s : {0.0, 0.25, 0.7, 1.0}) {
    const Vec2 pa = a.to_physical(Vec2(s, 0.0));
    const Vec2 pb = b.to_physical(Vec2(s, 0.0));
    CHECK((pa - mesh.edge_point(target, s)).norm() <= 1e-14);
    CHECK((pa - pb).norm() <= 1e-14);
  }
  CHECK_THROWS_AS(edge_adapted_map(mesh, target, 999), std::invalid_argument);
}

TEST_CASE("constant extension times edge bubble vanishes on the patch boundary") {
  const Mesh mesh = split_to_triangles(build_graded_mesh({1.0, 1.0}, 2, 2, Grading::uniform()));
  int target = -1;
  for (int ge = 0; ge < static_cast<int>(mesh.edges.size()); ++ge)
    if (mesh.edges[ge].location == EdgeLocation::InteriorMatrix) target = ge;
  REQUIRE(target >= 0);
  const Edge& e = mesh.edges[target];

  for (int side : {e.elem_front, e.elem_back}) {
    const AffineMap map = edge_adapted_map(mesh, target, side);
    const CellShape shape = mesh.elements[side].shape;
    // Extension of 1 is 1 everywhere on the cell.
    for (const auto& q : reference_rule(shape, 3)) CHECK(1.0 * edge_bubble(shape, q.xy) >= 0.0);
    // On the two non-shared boundary sides the bubble vanishes.
    const auto& redges = ReferenceElement::reference_edges(shape);
    for (size_t le = 0; le < redges.size(); ++le) {
      const Vec2 mid_ref = 0.5 * (redges[le].first + redges[le].second);
      const Vec2 mid_phys = map.to_physical(mid_ref);
      if ((mid_phys - mesh.edge_point(target, 0.5)).norm() < 1e-12) continue;  // the edge itself
      CHECK(std::abs(edge_bubble(shape, mid_ref)) <= 1e-14);
    }
  }
}

TEST_CASE("CR2 map follows the stretching direction") {
  // Wide cells: reference y must map onto the x axis.
  const Mesh wide = build_graded_mesh({4.0, 0.5}, 1, 1, Grading::uniform());
  const AffineMap map = element_map(wide, 1, FamilyTag::CR2RectQ1plus);
  const Vec2 dy = map.to_physical(Vec2(0.0, 1.0)) - map.to_physical(Vec2(0.0, 0.0));
  CHECK(std::abs(dy.x()) == doctest::Approx(4.0));
  CHECK(std::abs(dy.y()) == doctest::Approx(0.0));

  // Tall cells keep the standard orientation.
  const Mesh tall = build_graded_mesh({0.5, 4.0}, 1, 1, Grading::uniform());
  const AffineMap map2 = element_map(tall, 1, FamilyTag::CR2RectQ1plus);
  const Vec2 dy2 = map2.to_physical(Vec2(0.0, 1.0)) - map2.to_physical(Vec2(0.0, 0.0));
  CHECK(std::abs(dy2.y()) == doctest::Approx(4.0));
}
