import math

import pytest

import karstfem as kf


def test_mesh_counts():
    mesh = kf.build_mesh(nx=4, ny=4)
    assert mesh.num_elements == 32
    assert mesh.num_conduit_edges == 4
    assert mesh.total_area() == pytest.approx(2.0)
    mesh.validate()

    tri = kf.build_mesh(nx=4, ny=4, triangles=True)
    assert tri.num_elements == 64
    assert tri.triangular


def test_graded_mesh_hits_the_aspect_target():
    mesh = kf.graded_mesh_for_aspect(nx=4, aspect=100.0)
    assert mesh.max_aspect_ratio() == pytest.approx(100.0, rel=1e-9)


def test_mesh_json_round_trip():
    mesh = kf.build_mesh(nx=3, ny=2, grading=0.5)
    back = kf.mesh_from_json(mesh.to_json())
    assert back.num_elements == mesh.num_elements
    assert back.total_area() == pytest.approx(mesh.total_area())


def test_alignment_measure_exact_values():
    # 1 x 0.1 cells: aligned fields give 1, misaligned the aspect ratio.
    mesh = kf.build_mesh(length=1.0, half_height=0.5, nx=1, ny=5)
    assert kf.alignment_measure(mesh, 0.0, 1.0) == pytest.approx(1.0, abs=1e-12)
    assert kf.alignment_measure(mesh, 1.0, 0.0) == pytest.approx(10.0, rel=1e-12)


def test_unisolvence():
    for family in ("p1", "q1", "q2", "q3", "cr1", "cr2", "cr3"):
        assert kf.unisolvence_deviation(family) <= 1e-12


def test_solve_and_estimate():
    mesh = kf.build_mesh(nx=8, ny=8)
    result = kf.solve_case(mesh, family="q1", case_name="smooth-decoupled",
                           conduit_conductivity=0.05)
    assert result["error"] > 0.0
    assert result["theta"] > 0.0
    assert math.isfinite(result["zeta"])
    assert len(result["theta_k"]) == mesh.num_elements

    finer = mesh.refine_all()
    refined = kf.solve_case(finer, family="q1", case_name="smooth-decoupled",
                            conduit_conductivity=0.05)
    assert refined["error"] < 0.6 * result["error"]


def test_study_converges_and_is_deterministic():
    a = kf.run_study(family="q1", levels=3, nx=4, ny=4)
    b = kf.run_study(family="q1", levels=3, nx=4, ny=4)
    assert [r["error"] for r in a] == [r["error"] for r in b]
    assert a[-1]["error_rate"] > 0.8


def test_nonconforming_solve():
    mesh = kf.build_mesh(nx=4, ny=4, triangles=True)
    result = kf.solve_case(mesh, family="cr1", case_name="layered",
                           exchange=1.0, interface_value=2.0)
    assert result["error"] > 0.0
    assert result["theta"] > 0.0
