#include <cmath>

#include "doctest.h"
#include "karst/norms.hpp"
#include "karst/properties.hpp"
#include "karst/study.hpp"

using namespace karst;

TEST_CASE("layered case satisfies the interface identity") {
  const DomainGeometry geom{2.0, 0.75};
  for (double iv : {1.0, 2.0, 0.5}) {
    const ManufacturedCase mc = make_layered_case(geom, 1.5, 0.8, 2.0, iv);
    for (int i = 0; i < 100; ++i) {
      const double x = geom.length * (i + 0.5) / 100.0;
      CHECK(std::abs(mc.interface_identity_residual(x)) <= 1e-12);
    }
    // Boundary values vanish.
    CHECK(std::abs(mc.exact_matrix(0.0, 0.3)) <= 1e-15);
    CHECK(std::abs(mc.exact_matrix(1.0, geom.half_height)) <= 1e-15);
    CHECK(std::abs(mc.exact_conduit(0.0)) <= 1e-15);
  }
}

TEST_CASE("zero exchange reduces to the smooth decoupled profile") {
  const DomainGeometry geom{1.0, 1.0};
  const ManufacturedCase mc = make_layered_case(geom, 1.0, 1.0, 0.0, 1.0);
  CHECK(mc.tag == ManufacturedCase::Tag::SmoothDecoupled);
  CHECK(mc.layer_b == doctest::Approx(mc.layer_a / geom.half_height).epsilon(1e-14));
  // u^m(x,0) = u^c(x) and the y-derivative is continuous through y=0.
  const Vec2 up = mc.exact_matrix_gradient(0.3, 1e-12);
  const Vec2 down = mc.exact_matrix_gradient(0.3, -1e-12);
  CHECK(up.y() == doctest::Approx(down.y()).epsilon(1e-8));
}

TEST_CASE("weak form consistency of the manufactured solution") {
  const ManufacturedCase mc = make_layered_case({1.0, 1.0}, 1.0, 1.0, 1.0, 2.0);
  const Mesh mesh = build_graded_mesh({1.0, 1.0}, 6, 6, Grading::geometric(0.7));
  const DofMap dm(mesh, FamilyTag::Q1Rect);
  const Eigen::VectorXd r = exact_weak_residual(mc, dm, 10);
  CHECK(r.cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("error norms: zero and constant-gradient cases") {
  const DomainGeometry geom{1.0, 1.0};
  const Mesh mesh = build_graded_mesh(geom, 3, 3, Grading::uniform());
  const DofMap dm(mesh, FamilyTag::Q1Rect);

  // Exact solution identically zero, u_h = 0.
  ManufacturedCase zero;
  zero.geometry = geom;
  zero.exact_matrix = [](double, double) { return 0.0; };
  zero.exact_matrix_gradient = [](double, double) { return Vec2(0.0, 0.0); };
  zero.exact_conduit = [](double) { return 0.0; };
  zero.exact_conduit_deriv = [](double) { return 0.0; };
  const FeFunction u0 = FeFunction::zeros(dm);
  CHECK(error_norm(u0, zero, false, 4) == 0.0);
  CHECK(error_norm(u0, zero, true, 4) == 0.0);

  // e = x on the matrix only: |e|_{1,m} = sqrt(2 L H).
  ManufacturedCase ramp = zero;
  ramp.exact_matrix = [](double x, double) { return x; };
  ramp.exact_matrix_gradient = [](double, double) { return Vec2(1.0, 0.0); };
  CHECK(error_norm(u0, ramp, false, 4) ==
        doctest::Approx(std::sqrt(2.0 * geom.length * geom.half_height)).epsilon(1e-13));
}

TEST_CASE("interpolant of a reproduced solution has zero error") {
  // Manufactured field that lies in the Q2 space: u = x(1-x) per half in y^2.
  const DomainGeometry geom{1.0, 1.0};
  ManufacturedCase mc;
  mc.geometry = geom;
  mc.exact_matrix = [](double x, double y) { return x * (1.0 - x) * (1.0 - y * y); };
  mc.exact_matrix_gradient = [](double x, double y) {
    return Vec2((1.0 - 2.0 * x) * (1.0 - y * y), -2.0 * y * x * (1.0 - x));
  };
  mc.exact_conduit = [](double x) { return x * (1.0 - x); };
  mc.exact_conduit_deriv = [](double x) { return 1.0 - 2.0 * x; };

  const Mesh mesh = build_graded_mesh(geom, 3, 2, Grading::uniform());
  const DofMap dm(mesh, FamilyTag::Q2Rect);
  const FeFunction u_h = interpolate(
      dm, [&](const Vec2& p) { return mc.exact_matrix(p.x(), p.y()); }, mc.exact_conduit);
  CHECK(error_norm(u_h, mc, false, 8) <= 1e-12);
}

TEST_CASE("run_study on the smooth decoupled case converges at first order") {
  const DomainGeometry geom{1.0, 1.0};
  const ManufacturedCase mc = make_smooth_decoupled_case(geom, 1.0, 1.0);
  std::vector<Mesh> meshes{build_graded_mesh(geom, 4, 4, Grading::uniform())};
  meshes.push_back(refine_all(meshes[0]));
  meshes.push_back(refine_all(meshes[1]));

  StudyOptions opts;
  opts.with_local_efficiency = false;
  const auto levels = run_study(mc, FamilyTag::Q1Rect, meshes, opts);
  REQUIRE(levels.size() == 3);
  CHECK(levels[1].error < levels[0].error);
  CHECK(levels[2].error < levels[1].error);
  CHECK(levels[2].error_rate == doctest::Approx(1.0).epsilon(0.15));
  CHECK(std::isnan(levels[0].error_rate));
  for (const auto& l : levels) {
    CHECK(std::isfinite(l.theta));
    CHECK(l.theta > 0.0);
    CHECK(std::isfinite(l.reliability_const));
  }

  // Determinism: identical CSV on a re-run.
  const auto again = run_study(mc, FamilyTag::Q1Rect, meshes, opts);
  CHECK(study_to_csv(levels) == study_to_csv(again));

  CHECK_THROWS_AS(run_study(mc, FamilyTag::Q1Rect, {meshes[0]}, opts), std::invalid_argument);
}

TEST_CASE("higher-order families converge at their optimal rates") {
  const DomainGeometry geom{1.0, 1.0};
  const ManufacturedCase mc = make_layered_case(geom, 1.0, 1.0, 1.0, 2.0);
  StudyOptions opts;
  opts.solver.jacobi = true;
  opts.solver.rel_tol = 1e-12;
  opts.with_local_efficiency = false;

  std::vector<Mesh> rect{build_graded_mesh(geom, 4, 4, Grading::uniform())};
  rect.push_back(refine_all(rect[0]));
  rect.push_back(refine_all(rect[1]));
  std::vector<Mesh> tri;
  for (const Mesh& m : rect) tri.push_back(split_to_triangles(m));

  struct Probe {
    FamilyTag tag;
    const std::vector<Mesh>* meshes;
    double rate;
  };
  for (const Probe& probe : {Probe{FamilyTag::Q2Rect, &rect, 2.0},
                             Probe{FamilyTag::P3Tri, &tri, 3.0},
                             Probe{FamilyTag::CR3RectP2, &rect, 1.0}}) {
    const auto levels = run_study(mc, probe.tag, *probe.meshes, opts);
    INFO(family_to_string(probe.tag));
    CHECK(levels.back().error_rate == doctest::Approx(probe.rate).epsilon(0.08));
  }
}

TEST_CASE("degenerate zero case reports undefined ratios instead of failing") {
  const DomainGeometry geom{1.0, 1.0};
  ManufacturedCase zero;
  zero.geometry = geom;
  zero.exact_matrix = [](double, double) { return 0.0; };
  zero.exact_matrix_gradient = [](double, double) { return Vec2(0.0, 0.0); };
  zero.exact_conduit = [](double) { return 0.0; };
  zero.exact_conduit_deriv = [](double) { return 0.0; };

  std::vector<Mesh> meshes{build_graded_mesh(geom, 2, 2, Grading::uniform())};
  meshes.push_back(refine_all(meshes[0]));
  StudyOptions opts;
  opts.with_local_efficiency = false;
  const auto levels = run_study(zero, FamilyTag::Q1Rect, meshes, opts);
  CHECK(levels[0].error == 0.0);
  CHECK(std::isnan(levels[0].effectivity));
  CHECK(std::isnan(levels[0].alignment_error));
}

TEST_CASE("discrete norm of a conforming field has no jump part") {
  const Mesh mesh = build_graded_mesh({1.0, 1.0}, 3, 3, Grading::uniform());
  const DofMap dm(mesh, FamilyTag::Q1Rect);
  const FeFunction f = interpolate(
      dm, [](const Vec2& p) { return p.x() * p.y(); }, [](double x) { return x; });
  CHECK(penalty_seminorm_sq(f, 4) <= 1e-26);
  CHECK(discrete_norm_sq(f, 4) > 0.0);
}
