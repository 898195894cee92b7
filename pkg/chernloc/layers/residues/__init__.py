"""
Residues Layer Package
======================
This package contains Bochner-Martinelli indices, Camacho-Sad residues and the
residue-theorem check.

Exports:
    ResiduesService: Main service class for the residues layer
    FoliationGerm: a(h, y) h d/dh + b(h, y) d/dy near the invariant line {h = 0}
    bochner_martinelli_kernel: The kernel beta_m on C^m
"""

from .foliation import FoliationGerm
from .kernel import bochner_martinelli_kernel
from .residues_service import ResiduesService

__all__ = [
    "ResiduesService",
    "FoliationGerm",
    "bochner_martinelli_kernel",
]
