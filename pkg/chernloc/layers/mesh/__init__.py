"""
Mesh Layer Package
==================
This package contains simplices, chains, triangulations and quadrature.

Exports:
    MeshService: Main service class for the mesh layer
    Simplex: Oriented parametrized simplex
    Chain: Integer combination of simplices
    Triangulation: Top simplices of a compact model
    AdaptiveQuadrature: Adaptive simplex cubature
"""

from .mesh_service import MeshService
from .quadrature import AdaptiveQuadrature
from .simplices import Chain, Simplex
from .triangulation import Triangulation

__all__ = [
    "MeshService",
    "Simplex",
    "Chain",
    "Triangulation",
    "AdaptiveQuadrature",
]
