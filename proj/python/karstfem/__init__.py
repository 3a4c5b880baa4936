"""Coupled matrix/conduit flow solver with anisotropic residual error estimation."""

try:
    from ._karst import (  # installed wheel layout
        Mesh,
        alignment_measure,
        build_mesh,
        graded_mesh_for_aspect,
        mesh_from_json,
        property_suites,
        run_study,
        solve_case,
        unisolvence_deviation,
    )
except ImportError:  # in-tree builds put the module next to the package on sys.path
    from _karst import (
        Mesh,
        alignment_measure,
        build_mesh,
        graded_mesh_for_aspect,
        mesh_from_json,
        property_suites,
        run_study,
        solve_case,
        unisolvence_deviation,
    )

__all__ = [
    "Mesh",
    "alignment_measure",
    "build_mesh",
    "graded_mesh_for_aspect",
    "mesh_from_json",
    "property_suites",
    "run_study",
    "solve_case",
    "unisolvence_deviation",
]
