#include <cmath>
#include <set>

#include "doctest.h"
#include "karst/mesh.hpp"

using namespace karst;

TEST_CASE("uniform 4x4 mesh: counts and conduit edges") {
  const Mesh m = build_graded_mesh({1.0, 1.0}, 4, 4, Grading::uniform());
  CHECK(m.elements.size() == 32);
  CHECK(m.conduit_edges.size() == 4);
  for (int ce : m.conduit_edges) CHECK(m.edges[ce].length == doctest::Approx(0.25).epsilon(1e-14));
  m.validate();
}

TEST_CASE("single cell per half") {
  const Mesh m = build_graded_mesh({1.0, 1.0}, 1, 1, Grading::uniform());
  REQUIRE(m.elements.size() == 2);
  for (const Element& el : m.elements) {
    CHECK(el.area == doctest::Approx(1.0));
    CHECK(el.anisotropy.len_long == doctest::Approx(1.0));
    CHECK(el.anisotropy.len_short == doctest::Approx(1.0));
    CHECK(el.anisotropy.min_length() == doctest::Approx(1.0));
  }
}

TEST_CASE("geometric grading q=0.5, ny=3") {
  // Thicknesses per half from the outer boundary towards the conduit:
  // 4/7, 2/7, 1/7 (geometric series normalised to H_m = 1).
  const Mesh m = build_graded_mesh({1.0, 1.0}, 4, 3, Grading::geometric(0.5));
  REQUIRE(m.grid_y.size() == 7);
  CHECK(m.grid_y[1] - m.grid_y[0] == doctest::Approx(4.0 / 7.0).epsilon(1e-14));
  CHECK(m.grid_y[2] - m.grid_y[1] == doctest::Approx(2.0 / 7.0).epsilon(1e-14));
  CHECK(m.grid_y[3] - m.grid_y[2] == doctest::Approx(1.0 / 7.0).epsilon(1e-14));
  CHECK(m.grid_y[3] == 0.0);

  // Cell adjacent to y=0: 1/4 wide, 1/7 tall.
  const int k = m.locate(Vec2(0.1, -0.01));
  CHECK(m.elements[k].anisotropy.min_length() == doctest::Approx(1.0 / 7.0));
  CHECK(m.elements[k].anisotropy.len_long / m.elements[k].anisotropy.len_short ==
        doctest::Approx(7.0 / 4.0));
  m.validate();
}

TEST_CASE("mesh construction rejects bad arguments") {
  CHECK_THROWS_AS(build_graded_mesh({1.0, 1.0}, 0, 1, Grading::uniform()), std::invalid_argument);
  CHECK_THROWS_AS(build_graded_mesh({-1.0, 1.0}, 1, 1, Grading::uniform()), std::invalid_argument);
  CHECK_THROWS_AS(build_graded_mesh({1.0, 1.0}, 1, 1, Grading::geometric(0.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_graded_mesh({1.0, 1.0}, 1, 1, Grading::geometric(1.5)),
                  std::invalid_argument);
}

TEST_CASE("split to triangles preserves rectangle edges and area") {
  const Mesh rect = build_graded_mesh({1.0, 1.0}, 4, 4, Grading::uniform());
  const Mesh tri = split_to_triangles(rect);
  CHECK(tri.elements.size() == 64);
  CHECK(tri.total_area() == doctest::Approx(rect.total_area()).epsilon(1e-14));

  std::set<std::pair<int, int>> tri_edges;
  for (const Edge& e : tri.edges) tri_edges.insert({e.v[0], e.v[1]});
  for (const Edge& e : rect.edges) CHECK(tri_edges.count({e.v[0], e.v[1]}) == 1);
  tri.validate();

  CHECK_THROWS_AS(split_to_triangles(tri), std::invalid_argument);
}

TEST_CASE("triangle anisotropy from a unit square") {
  const Mesh tri = split_to_triangles(build_graded_mesh({1.0, 1.0}, 1, 1, Grading::uniform()));
  for (const Element& el : tri.elements) {
    CHECK(el.area == doctest::Approx(0.5));
    CHECK(el.anisotropy.len_long == doctest::Approx(std::sqrt(2.0)));
  }
  // Height over an edge: |K| / |E|.
  const int ge = tri.element_edges[0][0];
  CHECK(tri.edge_height(ge, 0) ==
        doctest::Approx(tri.elements[0].area / tri.edges[ge].length));
}

TEST_CASE("triangle anisotropy of a stretched cell: altitude rule") {
  DomainGeometry geom{0.25, 1.0 / 7.0};
  const Mesh tri = split_to_triangles(build_graded_mesh(geom, 1, 1, Grading::uniform()));
  const double hyp = std::hypot(0.25, 1.0 / 7.0);
  for (const Element& el : tri.elements) {
    CHECK(el.anisotropy.len_long == doctest::Approx(hyp).epsilon(1e-13));
    CHECK(el.anisotropy.len_short == doctest::Approx(2.0 * el.area / hyp).epsilon(1e-13));
    // Frame stays orthogonal with the right lengths.
    const Eigen::Matrix2d g = el.anisotropy.frame().transpose() * el.anisotropy.frame();
    CHECK(std::abs(g(0, 1)) <= 1e-12);
  }
}

TEST_CASE("mesh assumption diagnostics") {
  const MeshAssumptionReport uniform =
      check_mesh_assumptions(build_graded_mesh({1.0, 1.0}, 4, 4, Grading::uniform()));
  CHECK(uniform.max_size_ratio == doctest::Approx(1.0));
  CHECK(uniform.max_vertex_valence <= 4);
  CHECK(uniform.ratio_ok);
  CHECK(uniform.valence_ok);

  const MeshAssumptionReport graded =
      check_mesh_assumptions(build_graded_mesh({1.0, 1.0}, 4, 4, Grading::geometric(0.5)));
  CHECK(graded.max_size_ratio == doctest::Approx(2.0).epsilon(1e-12));

  const MeshAssumptionReport tri = check_mesh_assumptions(
      split_to_triangles(build_graded_mesh({1.0, 1.0}, 4, 4, Grading::uniform())));
  CHECK(tri.max_vertex_valence <= 6);
}

TEST_CASE("refinement: uniform, identity, local closure") {
  const Mesh m = build_graded_mesh({1.0, 1.0}, 4, 4, Grading::uniform());

  std::vector<int> all(m.elements.size());
  for (int i = 0; i < static_cast<int>(all.size()); ++i) all[i] = i;
  const Mesh fine = refine(m, all);
  CHECK(fine.elements.size() == 4 * m.elements.size());
  for (const Element& el : fine.elements) {
    CHECK(el.anisotropy.len_long == doctest::Approx(0.125));
    CHECK(el.anisotropy.len_short == doctest::Approx(0.125));
  }

  CHECK(refine(m, {}).elements.size() == m.elements.size());

  const Mesh wide = build_graded_mesh({1.0, 1.0}, 4, 4, Grading::uniform());
  const int interior = wide.locate(Vec2(0.4, 0.4));
  const Mesh local = refine(wide, {interior});
  local.validate();  // conformity: no hanging nodes by construction
  CHECK(local.elements.size() >= wide.elements.size() + 3);
  CHECK(local.total_area() == doctest::Approx(wide.total_area()).epsilon(1e-14));
}

TEST_CASE("edge height averages stay within a factor two of the cell heights") {
  for (const Mesh& m : {build_graded_mesh({1.0, 1.0}, 4, 6, Grading::geometric(0.5)),
                        split_to_triangles(build_graded_mesh({1.0, 1.0}, 4, 6, Grading::geometric(0.5))),
                        graded_mesh_for_aspect({1.0, 1.0}, 4, 1000.0),
                        split_to_triangles(graded_mesh_for_aspect({1.0, 1.0}, 4, 1000.0))}) {
    for (int ge = 0; ge < static_cast<int>(m.edges.size()); ++ge) {
      const Edge& e = m.edges[ge];
      for (int elem : {e.elem_front, e.elem_back}) {
        if (elem < 0) continue;
        const double r = e.avg_height / m.edge_height(ge, elem);
        CHECK(r >= 0.5 - 1e-12);
        CHECK(r <= 2.0 + 1e-12);
        const double rm = e.avg_min_length / m.elements[elem].anisotropy.min_length();
        CHECK(rm >= 0.5 - 1e-12);
        CHECK(rm <= 2.0 + 1e-12);
      }
    }
  }
}

TEST_CASE("graded mesh for a target aspect ratio") {
  for (double aspect : {1.0, 10.0, 100.0, 1000.0}) {
    const Mesh m = graded_mesh_for_aspect({1.0, 1.0}, 4, aspect);
    double worst = 1.0;
    for (const Element& el : m.elements)
      worst = std::max(worst, el.anisotropy.len_long / el.anisotropy.len_short);
    CHECK(worst == doctest::Approx(aspect).epsilon(1e-10));
    m.validate();
  }
}

TEST_CASE("mesh json round trip") {
  const Mesh m = build_graded_mesh({2.0, 0.5}, 3, 2, Grading::geometric(0.5));
  const Mesh back = mesh_from_json(mesh_to_json(m));
  REQUIRE(back.elements.size() == m.elements.size());
  CHECK(back.total_area() == doctest::Approx(m.total_area()).epsilon(1e-14));
  CHECK(back.conduit_edges.size() == m.conduit_edges.size());

  const Mesh tri = split_to_triangles(m);
  const Mesh tri_back = mesh_from_json(mesh_to_json(tri));
  CHECK(tri_back.elements.size() == tri.elements.size());
  CHECK(tri_back.is_triangular());
}

TEST_CASE("point location") {
  const Mesh m = build_graded_mesh({1.0, 1.0}, 4, 3, Grading::geometric(0.5));
  for (const Vec2 p : {Vec2(0.55, -0.9), Vec2(0.05, 0.05), Vec2(0.99, 0.01)}) {
    const int k = m.locate(p);
    const Element& el = m.elements[k];
    double x_lo = 1e300, x_hi = -1e300, y_lo = 1e300, y_hi = -1e300;
    for (int j = 0; j < el.vertex_count(); ++j) {
      x_lo = std::min(x_lo, m.vertices[el.v[j]].x());
      x_hi = std::max(x_hi, m.vertices[el.v[j]].x());
      y_lo = std::min(y_lo, m.vertices[el.v[j]].y());
      y_hi = std::max(y_hi, m.vertices[el.v[j]].y());
    }
    CHECK(p.x() >= x_lo);
    CHECK(p.x() <= x_hi);
    CHECK(p.y() >= y_lo);
    CHECK(p.y() <= y_hi);
  }
}
