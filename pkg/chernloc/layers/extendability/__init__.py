"""
Extendability Layer Package
===========================
This package contains exact truncated power series and the subalgebra-membership test
that detects nonzero extendable cohomology classes on parametrized curve germs.

Exports:
    ExtendabilityService: Main service class for the extendability layer
    TruncatedSeries: Exact power series truncated at a degree N
    subalgebra_membership: Truncated membership of h in the algebra of a map's components
"""

from .extendability_service import ExtendabilityService
from .membership import subalgebra_membership
from .series import TruncatedSeries

__all__ = [
    "ExtendabilityService",
    "TruncatedSeries",
    "subalgebra_membership",
]
