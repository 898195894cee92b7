"""
Geometry Layer Package
======================
This package contains charts, coverings, partitions of unity and honeycombs.

Exports:
    GeometryService: Main service class for the geometry layer
    Atlas: Charts plus transition maps
    Chart: One coordinate chart
    Covering: Two-set covering with singular disks
    SingularDisk: One component of V1
    PartitionOfUnity: rho0 / rho1 fields
    BumpProfile: Shape parameter of the partition
    HoneycombSystem: Regular cell plus singular disks
    Region: Chart region with membership and sampling
"""

from .atlas import Atlas, Chart
from .covering import Covering, SingularDisk
from .geometry_service import GeometryService
from .honeycomb import HoneycombSystem
from .partition import BumpProfile, PartitionOfUnity
from .regions import Region

__all__ = [
    "GeometryService",
    "Atlas",
    "Chart",
    "Covering",
    "SingularDisk",
    "PartitionOfUnity",
    "BumpProfile",
    "HoneycombSystem",
    "Region",
]
