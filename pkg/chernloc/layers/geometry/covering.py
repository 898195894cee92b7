"""
Coverings
=========
Two-set coverings V = {V0, V1} of a scene.

V1 is a disjoint union of disks |z - c_nu| < outer_nu, each in its own chart; V0 is
the complement of the closed inner disks |z - c_nu| <= inner_nu. The overlap V0 ∩ V1
is the union of the annuli. An adapted set Z, when present, is a union of regions
that must lie in V0 and miss V1.
"""

import logging
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np
import sympy as sp

from chernloc.layers.fields_forms.scalar_field import conj, z
from chernloc.layers.geometry.atlas import Atlas
from chernloc.layers.geometry.regions import Region
from chernloc.models.data_models import RegionKind
from chernloc.utils.errors import DegenerateOverlapError, InvariantViolation

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SingularDisk:
    """
    One component of V1 and the hole it punches into V0.

    Attributes:
        chart_id: chart of the disk
        center: center coordinates
        inner: radius of the closed disk removed from V0
        outer: radius of the V1 disk
    """

    chart_id: str
    center: Tuple[complex, ...]
    inner: float
    outer: float

    def __post_init__(self):
        if not self.inner < self.outer:
            raise DegenerateOverlapError(
                f"covering disk at {self.center} in {self.chart_id!r}: inner radius {self.inner} >= outer radius {self.outer}"
            )

    def squared_distance(self) -> sp.Expr:
        """q = |z - c|^2 as a field on the disk's chart."""
        total = sp.S.Zero
        for i, c in enumerate(self.center, start=1):
            c_exact = sp.nsimplify(c, rational=True)
            total += (z(i) - c_exact) * conj(z(i) - c_exact)
        return sp.expand(total)

    def distance(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=complex))
        return np.sqrt(np.sum(np.abs(points - np.asarray(self.center)) ** 2, axis=1))

    def outer_region(self) -> Region:
        return Region(self.chart_id, RegionKind.DISK, self.center, 0.0, self.outer)

    def overlap_region(self) -> Region:
        return Region(self.chart_id, RegionKind.ANNULUS, self.center, self.inner, self.outer)


@dataclass(frozen=True)
class Covering:
    """
    Two-set covering with singular disks and an optional adapted set Z.
    """

    atlas: Atlas
    disks: Tuple[SingularDisk, ...]
    adapted_set: Tuple[Region, ...] = field(default=())

    def locate(self, chart_id: str, points: np.ndarray, radius: str = "outer") -> np.ndarray:
        """
        Index of the disk containing each point (by inner or outer radius), -1 if none.
        """
        points = np.atleast_2d(np.asarray(points, dtype=complex))
        result = np.full(points.shape[0], -1, dtype=int)
        for nu, disk in enumerate(self.disks):
            images = points if disk.chart_id == chart_id else self.images_in(points, chart_id, disk.chart_id)
            bound = disk.outer if radius == "outer" else disk.inner
            with np.errstate(invalid="ignore"):
                inside = disk.distance(images) < bound
            result[(result < 0) & inside] = nu
        return result

    def images_in(self, points: np.ndarray, source: str, target: str) -> np.ndarray:
        out = np.full(points.shape, np.nan, dtype=complex)
        for row, p in enumerate(points):
            image = self.atlas.to_chart(p.reshape(1, -1), source, target)
            if image is not None:
                out[row] = image[0]
        return out

    def check_disjoint(self, samples: int = 64) -> None:
        """
        The V1 disks must be pairwise disjoint.

        Raises:
            DegenerateOverlapError: If two outer disks meet
        """
        angles = np.linspace(0.0, 2 * np.pi, samples, endpoint=False)
        for mu, first in enumerate(self.disks):
            for nu, second in enumerate(self.disks):
                if mu == nu:
                    continue
                circle = np.zeros((samples, len(first.center)), dtype=complex) + np.asarray(first.center)
                circle[:, 0] += first.outer * np.exp(1j * angles)
                boundary_points = np.vstack([np.asarray(first.center).reshape(1, -1), circle])
                images = self.images_in(boundary_points, first.chart_id, second.chart_id)
                finite = np.all(np.isfinite(images), axis=1)
                if np.any(second.distance(images[finite]) < second.outer):
                    raise DegenerateOverlapError(f"covering disks {mu} and {nu} overlap")

    def check_adapted_set(self, rng: np.random.Generator, samples: int = 20) -> None:
        """
        Z must miss V1 (and so lie in V0), checked on samples of every Z region.

        Raises:
            InvariantViolation: On a Z sample inside some V1 disk
        """
        for region in self.adapted_set:
            points = region.sample(rng, samples)
            located = self.locate(region.chart_id, points)
            if np.any(located >= 0):
                bad = points[int(np.argmax(located >= 0))]
                raise InvariantViolation("adapted set Z misses V1", tuple(bad))
        logger.debug("[COVERING] adapted_regions=%d ok", len(self.adapted_set))
