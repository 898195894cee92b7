"""
Honeycomb Cell Systems
======================
One regular cell R0 and disjoint singular disks R1_nu.

- R1_nu is the closed disk of radius r around mark nu, in the chart of the covering
  disk that contains it; R0 is the closure of the complement
- The interface R(1,0)_nu is the circle |z - mark| = r run counterclockwise, i.e. the
  boundary of R1_nu; R(0,1)_nu = -R(1,0)_nu is the boundary of R0
- Every covering disk's inner disk lies inside some honeycomb disk, so R0 ⊂ V0, and
  every honeycomb disk lies inside its covering disk, so R1 ⊂ V1
"""

import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from chernloc.layers.geometry.chains import disk_chain, link_of_point
from chernloc.layers.geometry.covering import Covering
from chernloc.layers.mesh.simplices import Chain
from chernloc.utils.errors import HoneycombError

logger = logging.getLogger(__name__)

# Interface orientation: R(1,0) = +boundary(R1)
INTERFACE_SIGN = 1
_ON_INTERFACE = 1e-12


@dataclass(frozen=True)
class HoneycombDisk:
    """
    A singular cell.

    Attributes:
        chart_id: chart of the cell (that of its covering disk)
        center: the mark
        radius: cell radius
        cover_index: index of the covering disk containing the cell
    """

    chart_id: str
    center: Tuple[complex, ...]
    radius: float
    cover_index: int

    def distance(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=complex))
        return np.sqrt(np.sum(np.abs(points - np.asarray(self.center)) ** 2, axis=1))


@dataclass(frozen=True)
class HoneycombSystem:
    """
    Regular cell plus singular disks over a covering.
    """

    covering: Covering
    disks: Tuple[HoneycombDisk, ...]

    def cell_of(self, chart_id: str, points: np.ndarray) -> np.ndarray:
        """
        Cell index of each point: 0 for the open regular cell, nu + 1 for the open singular
        cell nu, -1 on an interface.
        """
        points = np.atleast_2d(np.asarray(points, dtype=complex))
        cells = np.zeros(points.shape[0], dtype=int)
        for nu, disk in enumerate(self.disks):
            if disk.chart_id == chart_id:
                images = points
            else:
                images = self.covering.images_in(points, chart_id, disk.chart_id)
            with np.errstate(invalid="ignore"):
                gap = disk.distance(images) - disk.radius
            cells[gap < -_ON_INTERFACE] = nu + 1
            cells[np.abs(gap) <= _ON_INTERFACE] = -1
        return cells

    def interface(self, nu: int, segments: int = 16) -> Chain:
        """R(1,0)_nu: the counterclockwise circle bounding R1_nu."""
        disk = self.disks[nu]
        circle = link_of_point(disk.chart_id, disk.center, disk.radius, segments)
        return circle if INTERFACE_SIGN > 0 else -circle

    def singular_cell(self, nu: int, segments: int = 4) -> Chain:
        disk = self.disks[nu]
        return disk_chain(disk.chart_id, disk.center, disk.radius, segments)

    def with_radius(self, radius: float) -> "HoneycombSystem":
        marks = [(d.chart_id, d.center) for d in self.disks]
        return honeycomb_from_marks(self.covering, marks, radius)


def honeycomb_from_marks(covering: Covering, marks: Sequence[Tuple[str, Sequence[complex]]], radius: float) -> HoneycombSystem:
    """
    Honeycomb with one disk of the given radius per mark.

    Args:
        covering: covering whose V1 must contain the disks
        marks: (chart_id, coordinates) per singular cell
        radius: common cell radius

    Returns:
        HoneycombSystem

    Raises:
        HoneycombError: If two disks overlap, a disk escapes V1, or R0 would leave V0
    """
    atlas = covering.atlas
    for a in range(len(marks)):
        for b in range(a + 1, len(marks)):
            (chart_a, point_a), (chart_b, point_b) = marks[a], marks[b]
            other = np.asarray(point_b, dtype=complex).reshape(1, -1)
            if chart_a != chart_b:
                other = atlas.to_chart(other, chart_b, chart_a)
            if other is None:
                continue
            separation = float(np.linalg.norm(other[0] - np.asarray(point_a, dtype=complex)))
            if separation <= 2 * radius:
                raise HoneycombError(f"honeycomb disks {a} and {b} overlap (separation {separation:.3g}, radius {radius})")
    disks: List[HoneycombDisk] = []
    for chart_id, point in marks:
        point = np.asarray(point, dtype=complex).reshape(1, -1)
        placed = False
        for nu, cover in enumerate(covering.disks):
            if cover.chart_id == chart_id:
                image = point
            else:
                image = atlas.to_chart(point, chart_id, cover.chart_id)
                if image is None:
                    continue
            gap = cover.distance(image)[0]
            if gap + radius < cover.outer:
                disks.append(HoneycombDisk(cover.chart_id, tuple(complex(v) for v in image[0]), float(radius), nu))
                placed = True
                break
        if not placed:
            raise HoneycombError(f"disk of radius {radius} around {tuple(point[0])} in {chart_id!r} escapes V1")
    for nu, cover in enumerate(covering.disks):
        covered = any(
            d.cover_index == nu and d.distance(np.asarray(cover.center))[0] + cover.inner < d.radius for d in disks
        )
        if not covered:
            raise HoneycombError(f"regular cell meets the removed disk of covering disk {nu}; enlarge the honeycomb radius")
    logger.debug("[HONEYCOMB] disks=%d radius=%.3g", len(disks), radius)
    return HoneycombSystem(covering, tuple(disks))
