"""Exact cone functions and expansion constants for finite simplicial complexes."""

from .simplicial import Complex
from .chains import Chain, Cochain, CoefficientGroup, ZZ, reduced_homology_ranks
from .cones import (
    ConeFunction,
    FiltrationPlan,
    FiltrationStage,
    apex_star_cone,
    extend_by_vertex_set,
    graph_bfs_cone,
    join_cone,
    run_filtration,
    solve_cone_linear,
    subdivision_transport,
    transport_coefficients,
    verify_cone,
)
from .fqlinalg import GF, Field, Form, Subspace, enumerate_subspaces, is_transversal
from .caps import Caps, default_caps

__version__ = "0.1.0"

__all__ = [
    "Caps",
    "Chain",
    "Cochain",
    "CoefficientGroup",
    "Complex",
    "ConeFunction",
    "Field",
    "FiltrationPlan",
    "FiltrationStage",
    "Form",
    "GF",
    "Subspace",
    "ZZ",
    "apex_star_cone",
    "default_caps",
    "enumerate_subspaces",
    "extend_by_vertex_set",
    "graph_bfs_cone",
    "is_transversal",
    "join_cone",
    "reduced_homology_ranks",
    "run_filtration",
    "solve_cone_linear",
    "subdivision_transport",
    "transport_coefficients",
    "verify_cone",
]
