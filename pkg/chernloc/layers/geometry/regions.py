"""
Chart Regions
=============
Membership and deterministic sampling for the region shapes of scene files.
Norms are Euclidean in C^n; boxes are products of coordinate squares.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from chernloc.models.data_models import RegionKind


@dataclass(frozen=True)
class Region:
    """
    Region of one chart.

    Attributes:
        chart_id: chart the region is described in
        kind: shape
        center: center point
        inner: inner radius (annulus, complement)
        outer: outer radius (disk, annulus), box half-width, sampling half-width (plane)
    """

    chart_id: str
    kind: RegionKind
    center: Tuple[complex, ...]
    inner: float = 0.0
    outer: float = 1.0

    def _offsets(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=complex))
        return points - np.asarray(self.center, dtype=complex)

    def contains(self, points: np.ndarray) -> np.ndarray:
        offsets = self._offsets(points)
        radius = np.sqrt(np.sum(np.abs(offsets) ** 2, axis=1))
        if self.kind == RegionKind.DISK:
            return radius < self.outer
        if self.kind == RegionKind.ANNULUS:
            return (radius > self.inner) & (radius < self.outer)
        if self.kind == RegionKind.COMPLEMENT:
            return radius > self.inner
        if self.kind == RegionKind.BOX:
            return np.all((np.abs(offsets.real) < self.outer) & (np.abs(offsets.imag) < self.outer), axis=1)
        return np.ones(offsets.shape[0], dtype=bool)

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """Deterministic (given rng) sample of `count` points inside the region."""
        n = len(self.center)
        center = np.asarray(self.center, dtype=complex)
        if self.kind in (RegionKind.DISK, RegionKind.ANNULUS):
            low = self.inner if self.kind == RegionKind.ANNULUS else 0.0
            direction = rng.normal(size=(count, n)) + 1j * rng.normal(size=(count, n))
            direction /= np.linalg.norm(direction, axis=1, keepdims=True)
            u = rng.uniform(size=(count, 1))
            radius = (low ** (2 * n) + u * (self.outer ** (2 * n) - low ** (2 * n))) ** (1.0 / (2 * n))
            return center + radius * direction
        half = self.outer if self.kind != RegionKind.COMPLEMENT else self.inner + self.outer
        out = []
        while len(out) < count:
            batch = center + rng.uniform(-half, half, size=(count, n)) + 1j * rng.uniform(-half, half, size=(count, n))
            keep = batch[self.contains(batch)]
            out.extend(keep.tolist())
        return np.asarray(out[:count], dtype=complex)
