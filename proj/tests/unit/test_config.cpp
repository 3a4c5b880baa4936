#include "doctest.h"
#include "karst/config.hpp"

using namespace karst;

TEST_CASE("defaults parse from an empty document") {
  const RunConfig cfg = parse_config("{}");
  CHECK(cfg.nx == 8);
  CHECK(cfg.family == FamilyTag::Q1Rect);
  CHECK(cfg.problem_kind == RunConfig::ProblemKind::SmoothDecoupled);
  CHECK(cfg.output_dir == "out");
}

TEST_CASE("unknown keys are rejected with their path") {
  CHECK_THROWS_WITH_AS(parse_config(R"({"mesh": {"nx": 4, "bogus": 1}})"),
                       doctest::Contains("mesh.bogus"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config(R"({"nonsense": {}})"), doctest::Contains("nonsense"),
                       std::invalid_argument);
}

TEST_CASE("range validation") {
  CHECK_THROWS_AS(parse_config(R"({"mesh": {"nx": 0}})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({"mesh": {"grading": 1.5}})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({"solver": {"tolerance": 2.0}})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({"adapt": {"marking_fraction": 0.0}})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({"problem": {"case": "weird"}})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({"problem": {"exchange": 0.5}})"), std::invalid_argument);
}

TEST_CASE("family and mesh shape must agree") {
  CHECK_THROWS_AS(parse_config(R"({"family": "p1"})"), std::invalid_argument);
  const RunConfig ok = parse_config(R"({"family": "cr1", "mesh": {"triangles": true}})");
  CHECK(ok.family == FamilyTag::CR1Tri);
  CHECK(ok.triangles);
}

TEST_CASE("overrides apply before validation") {
  const RunConfig cfg =
      parse_config("{}", {"mesh.nx=16", "problem.case=layered", "problem.exchange=2.5",
                          "solver.jacobi=true", "output=elsewhere"});
  CHECK(cfg.nx == 16);
  CHECK(cfg.problem_kind == RunConfig::ProblemKind::Layered);
  CHECK(cfg.exchange == 2.5);
  CHECK(cfg.solver.jacobi);
  CHECK(cfg.output_dir == "elsewhere");

  CHECK_THROWS_AS(parse_config("{}", {"mesh.nx"}), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("{}", {"mesh.nope=1"}), std::invalid_argument);
}

TEST_CASE("problem data construction") {
  const RunConfig direct = parse_config(
      R"({"problem": {"case": "direct", "conductivity": 2.0, "matrix_source": 1.5}})");
  const ProblemData d = direct.problem_data();
  CHECK(d.conductivity == 2.0);
  CHECK(d.source_matrix(0.3, -0.2) == 1.5);
  CHECK_THROWS_AS(direct.manufactured_case(), std::logic_error);

  const RunConfig layered = parse_config(
      R"({"problem": {"case": "layered", "exchange": 1.0, "interface_value": 2.0}})");
  const ManufacturedCase mc = layered.manufactured_case();
  CHECK(mc.tag == ManufacturedCase::Tag::LayeredCoupled);
}

TEST_CASE("physical inputs derive the conductivities") {
  const RunConfig cfg = parse_config(
      R"({"problem": {"case": "direct", "permeability": 2.0, "viscosity": 0.5,
          "gravity": 9.81, "conduit_width": 0.1}})");
  CHECK(cfg.conductivity == doctest::Approx(2.0 * 9.81 / 0.5).epsilon(1e-14));
  CHECK(cfg.conduit_conductivity == doctest::Approx(0.001 * 9.81 / 6.0).epsilon(1e-14));
  CHECK_THROWS_WITH_AS(parse_config(R"({"problem": {"permeability": 2.0}})"),
                       doctest::Contains("viscosity"), std::invalid_argument);
}
