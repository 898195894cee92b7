"""
Bundles Layer Package
=====================
This package contains vector bundles, r-sections, connections and curvature.

Exports:
    BundlesService: Main service class for the bundles layer
    BundleData: Rank-e bundle given by transition matrices
    SectionTuple: An r-section, per-chart component matrices
    ConnectionData: Per-chart connection matrices
    Domain: Where a connection lives (V0, V1 or everywhere)
    FormMatrix: Square matrix of forms
"""

from .bundle import BundleData, ConnectionData, Domain, SectionTuple
from .bundles_service import BundlesService
from .form_matrix import FormMatrix

__all__ = [
    "BundlesService",
    "BundleData",
    "SectionTuple",
    "ConnectionData",
    "Domain",
    "FormMatrix",
]
