"""
Cech-de Rham Layer Package
==========================
This package contains two-set Cech-de Rham cochains and honeycomb integration.

Exports:
    CechDeRhamService: Main service class for the cechderham layer
    CechCochain: (omega0, omega1, omega01) triple
    ClippedSimplex: Pieces of a simplex cut along a honeycomb
"""

from .cechderham_service import CechDeRhamService
from .clipping import ClippedSimplex
from .cochain import CechCochain

__all__ = [
    "CechDeRhamService",
    "CechCochain",
    "ClippedSimplex",
]
