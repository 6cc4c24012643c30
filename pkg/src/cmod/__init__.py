"""Combinatorial moduli of curve families on vertex-weighted graphs,
circle packings, discrete conformal maps, and square tilings."""

from cmod._backend import BACKEND, NUMBA_ENABLED
from cmod.graphs import (
    Condenser,
    Covering,
    Curve,
    CurveFamily,
    Graph,
    nerve,
    validate_triangulation,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "NUMBA_ENABLED",
    "Graph",
    "Curve",
    "CurveFamily",
    "Condenser",
    "Covering",
    "nerve",
    "validate_triangulation",
    "__version__",
]
