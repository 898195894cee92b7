"""
Singular Locus Search
=====================
Isolated points where the components of an r-section become linearly dependent.

- F = sum |minor|^2 over the r x r minors is sampled on a grid per chart
- Strict local minima of F seed scipy least squares on the minors (real and imaginary
  parts against real coordinates, analytic Jacobian from the Wirtinger derivatives)
- Points are kept when every minor is below the residual bound, then deduplicated by
  their canonical representative across charts
"""

import logging
from dataclasses import dataclass
from itertools import product
from typing import List, Optional, Sequence, Tuple

import numpy as np
import sympy as sp
from scipy.ndimage import maximum_filter, minimum_filter
from scipy.optimize import least_squares

from chernloc.layers.bundles.bundle import SectionTuple
from chernloc.layers.fields_forms.scalar_field import evaluate_field, partial
from chernloc.layers.geometry.regions import Region
from chernloc.models.data_models import RegionKind
from chernloc.utils.errors import ChartMismatchError, NonIsolatedZeroError, PoleError

logger = logging.getLogger(__name__)

RESIDUAL_BOUND = 1e-10
# Grid samples where F is exactly zero; more than this means a curve of zeros
_EXACT_ZERO_LIMIT = 2
_MAX_POINTS = 12
# Grid side used in complex dimension >= 2
_COARSE_GRID = 9


@dataclass(frozen=True)
class LocatedPoint:
    """A located singular point and its largest minor modulus."""

    chart_id: str
    coords: Tuple[complex, ...]
    residual: float


class _MinorSystem:
    """Minors of one chart as a real least-squares system in (x_1, y_1, ..., x_n, y_n)."""

    def __init__(self, minors: Sequence[sp.Expr], dimension: int):
        self.minors = list(minors)
        self.dimension = dimension
        self.dz = [[partial(m, i) for i in range(1, dimension + 1)] for m in self.minors]
        self.dzbar = [[partial(m, i, anti=True) for i in range(1, dimension + 1)] for m in self.minors]

    @staticmethod
    def to_complex(x: np.ndarray) -> np.ndarray:
        return (x[0::2] + 1j * x[1::2]).reshape(1, -1)

    def values(self, points: np.ndarray) -> np.ndarray:
        return np.stack([evaluate_field(m, points, what="minor") for m in self.minors], axis=1)

    def residual(self, x: np.ndarray) -> np.ndarray:
        values = self.values(self.to_complex(x))[0]
        return np.concatenate([values.real, values.imag])

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        point = self.to_complex(x)
        rows = np.zeros((2 * len(self.minors), 2 * self.dimension))
        for k in range(len(self.minors)):
            for i in range(self.dimension):
                fz = evaluate_field(self.dz[k][i], point)[0]
                fzbar = evaluate_field(self.dzbar[k][i], point)[0]
                by_x = fz + fzbar
                by_y = 1j * (fz - fzbar)
                rows[k, 2 * i], rows[k, 2 * i + 1] = by_x.real, by_y.real
                rows[len(self.minors) + k, 2 * i], rows[len(self.minors) + k, 2 * i + 1] = by_x.imag, by_y.imag
        return rows


def _grid(region: Region, side: int) -> Tuple[np.ndarray, Tuple[int, ...]]:
    n = len(region.center)
    axis = np.linspace(-region.outer, region.outer, side)
    coords = np.array(list(product(axis, repeat=2 * n)))
    points = coords[:, 0::2] + 1j * coords[:, 1::2] + np.asarray(region.center)
    return points, (side,) * (2 * n)


def locate_in_chart(section: SectionTuple, chart_id: str, region: Region, side: int) -> List[LocatedPoint]:
    """
    Singular points of the section inside one chart region.

    Raises:
        NonIsolatedZeroError: If the minors vanish at too many grid samples
    """
    dimension = section.bundle.atlas.chart(chart_id).dimension
    system = _MinorSystem(section.minors(chart_id), dimension)
    if all(m == 0 for m in system.minors):
        raise NonIsolatedZeroError(f"section minors vanish identically on {chart_id!r}")
    side = side if dimension == 1 else min(side, _COARSE_GRID)
    points, shape = _grid(region, side)
    try:
        values = system.values(points)
    except PoleError:
        # Sections with poles are evaluated point by point, poles count as large
        values = np.full((points.shape[0], len(system.minors)), np.inf, dtype=complex)
        for row, p in enumerate(points):
            try:
                values[row] = system.values(p.reshape(1, -1))[0]
            except PoleError:
                continue
    F = np.sum(np.abs(values) ** 2, axis=1).reshape(shape)
    exact = int(np.count_nonzero(F == 0.0))
    if exact > _EXACT_ZERO_LIMIT:
        raise NonIsolatedZeroError(f"section minors vanish at {exact} grid samples of {chart_id!r}: zero set is not isolated")
    lowest = minimum_filter(F, size=3, mode="nearest")
    highest = maximum_filter(F, size=3, mode="nearest")
    seeds = points[((F == lowest) & (F < highest)).ravel()]
    found: List[LocatedPoint] = []
    method = "lm" if len(system.minors) >= dimension else "trf"
    for seed in seeds:
        start = np.empty(2 * dimension)
        start[0::2], start[1::2] = seed.real, seed.imag
        try:
            solution = least_squares(
                system.residual, start, jac=system.jacobian, method=method, xtol=1e-15, ftol=1e-15, gtol=1e-15
            )
        except PoleError:
            continue
        point = system.to_complex(solution.x)
        # Roots far outside the search box are found again from the chart that contains them
        if np.max(np.abs(point - np.asarray(region.center))) > 2 * region.outer:
            continue
        try:
            residual = float(np.max(np.abs(system.values(point))))
        except PoleError:
            continue
        if residual < RESIDUAL_BOUND:
            found.append(LocatedPoint(chart_id, tuple(complex(v) for v in point[0]), residual))
    logger.debug("[LOCUS] chart=%s seeds=%d roots=%d", chart_id, len(seeds), len(found))
    return found


def singular_locus(section: SectionTuple, radius: float, side: int, regions: Optional[dict] = None) -> List[LocatedPoint]:
    """
    Singular points of the section over every chart it reaches, deduplicated across charts.

    Args:
        section: the r-section
        radius: half-width of the default search box of each chart
        side: grid side of the seed search
        regions: optional per-chart search regions overriding the default box

    Returns:
        Points in canonical (chart, coordinates) form, sorted

    Raises:
        NonIsolatedZeroError: If the zero set is not isolated
    """
    atlas = section.bundle.atlas
    seen = {}
    for chart in atlas.charts:
        try:
            section.on(chart.id)
        except ChartMismatchError:
            continue
        region = (regions or {}).get(chart.id) or chart.domain
        if region is None:
            region = Region(chart.id, RegionKind.BOX, tuple(0j for _ in range(chart.dimension)), 0.0, radius)
        for located in locate_in_chart(section, chart.id, region, side):
            key = atlas.canonical(located.chart_id, located.coords)
            if key not in seen:
                chart_id, coords = key
                seen[key] = LocatedPoint(chart_id, coords, located.residual)
    if len(seen) > _MAX_POINTS:
        raise NonIsolatedZeroError(f"{len(seen)} singular points found: zero set is not isolated")
    points = [seen[key] for key in sorted(seen, key=lambda k: (k[0], [(c.real, c.imag) for c in k[1]]))]
    logger.info("[LOCUS] singular points=%d", len(points))
    return points
