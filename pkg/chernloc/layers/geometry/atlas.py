"""
Atlas
=====
Charts and holomorphic transition maps.

- transition(source, target) maps source coordinates to target coordinates
- Forms and fields move between charts by pullback through the reverse transition
- Points have a canonical representative: the first chart (in declaration order)
  reachable with a finite image, reduced modulo lattice periods on torus charts
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy as sp

from chernloc.layers.fields_forms.form import ChartMap, Form, compose, identity_map, pullback
from chernloc.layers.geometry.regions import Region
from chernloc.models.data_models import RegionKind
from chernloc.utils.errors import ChartMismatchError, InvariantViolation, PoleError, SceneError

logger = logging.getLogger(__name__)

# Images beyond this modulus count as "at infinity" for canonical points
_FAR = 1e8
_ROUND = 7


@dataclass(frozen=True)
class Chart:
    """
    A coordinate chart.

    Attributes:
        id: identifier
        dimension: complex dimension
        domain: region used for sampled checks
        periods: lattice periods (torus charts, dimension 1)
        singular_points: optional singular-locus markers
    """

    id: str
    dimension: int
    domain: Optional[Region] = None
    periods: Optional[Tuple[complex, complex]] = None
    singular_points: Tuple[Tuple[complex, ...], ...] = field(default=())

    def sampling_region(self) -> Region:
        if self.domain is not None:
            return self.domain
        return Region(self.id, RegionKind.BOX, tuple(0j for _ in range(self.dimension)), 0.0, 1.5)

    def reduce(self, points: np.ndarray) -> np.ndarray:
        """Reduce points modulo the period lattice (identity without periods)."""
        points = np.atleast_2d(np.asarray(points, dtype=complex))
        if not self.periods:
            return points
        w1, w2 = self.periods
        basis = np.array([[w1.real, w2.real], [w1.imag, w2.imag]])
        coords = np.linalg.solve(basis, np.stack([points[:, 0].real, points[:, 0].imag]))
        coords = coords - np.floor(coords + 1e-9)
        coords[np.abs(coords - 1.0) < 1e-9] = 0.0
        reduced = coords[0] * w1 + coords[1] * w2
        return reduced.reshape(-1, 1)


class Atlas:
    """
    Charts plus transition maps between them.
    """

    def __init__(self, charts: Sequence[Chart], transitions: Sequence[ChartMap] = ()):
        """
        Args:
            charts: charts in declaration order
            transitions: maps source -> target

        Raises:
            SceneError: On duplicate charts or dangling transition references
        """
        self.charts: Tuple[Chart, ...] = tuple(charts)
        self._by_id: Dict[str, Chart] = {}
        for chart in self.charts:
            if chart.id in self._by_id:
                raise SceneError(f"duplicate chart id {chart.id!r}")
            self._by_id[chart.id] = chart
        self._transitions: Dict[Tuple[str, str], ChartMap] = {}
        for m in transitions:
            for ref in (m.source, m.target):
                if ref not in self._by_id:
                    raise SceneError(f"transition references unknown chart {ref!r}")
            if len(m.components) != self._by_id[m.target].dimension:
                raise SceneError(f"transition {m.source}->{m.target} has the wrong number of components")
            self._transitions[(m.source, m.target)] = m

    @property
    def dimension(self) -> int:
        return self.charts[0].dimension if self.charts else 0

    def chart(self, chart_id: str) -> Chart:
        try:
            return self._by_id[chart_id]
        except KeyError:
            raise ChartMismatchError(f"unknown chart {chart_id!r}") from None

    def chart_ids(self) -> List[str]:
        return [c.id for c in self.charts]

    def transition(self, source: str, target: str) -> Optional[ChartMap]:
        if source == target:
            return identity_map(source, self.chart(source).dimension)
        return self._transitions.get((source, target))

    def transitions(self) -> List[ChartMap]:
        return [self._transitions[key] for key in sorted(self._transitions)]

    # -- moving objects -----------------------------------------------------

    def pull_form(self, form: Form, chart_id: str) -> Form:
        """
        Express a form given on form.chart_id in the coordinates of chart_id.

        Raises:
            ChartMismatchError: If no transition chart_id -> form.chart_id exists
        """
        if form.chart_id == chart_id:
            return form
        m = self.transition(chart_id, form.chart_id)
        if m is None:
            raise ChartMismatchError(f"no transition from {chart_id!r} to {form.chart_id!r}")
        return pullback(m, form)

    def pull_field(self, value, from_chart: str, to_chart: str) -> sp.Expr:
        if from_chart == to_chart:
            return sp.sympify(value)
        m = self.transition(to_chart, from_chart)
        if m is None:
            raise ChartMismatchError(f"no transition from {to_chart!r} to {from_chart!r}")
        return m.pull_field(value)

    def to_chart(self, points: np.ndarray, from_chart: str, to_chart: str) -> Optional[np.ndarray]:
        """Numeric images; None when no transition exists or some image is at a pole."""
        m = self.transition(from_chart, to_chart)
        if m is None:
            return None
        try:
            images = m.apply(points)
        except PoleError:
            return None
        if np.any(np.abs(images) > _FAR):
            return None
        return images

    def canonical(self, chart_id: str, point: Sequence[complex]) -> Tuple[str, Tuple[complex, ...]]:
        """Canonical (chart, rounded coordinates) of a point."""
        p = np.asarray(point, dtype=complex).reshape(1, -1)
        for chart in self.charts:
            images = p if chart.id == chart_id else self.to_chart(p, chart_id, chart.id)
            if images is None:
                continue
            reduced = chart.reduce(images)[0]
            return chart.id, tuple(complex(round(v.real, _ROUND) + 0.0, round(v.imag, _ROUND) + 0.0) for v in reduced)
        raise ChartMismatchError(f"point {tuple(point)} of {chart_id!r} has no canonical representative")

    # -- checks -------------------------------------------------------------

    def check_transitions(self, rng: np.random.Generator, samples: int = 20, tol: float = 1e-9) -> float:
        """
        Sampled holomorphy, inverse and cocycle checks of the transition maps.

        Returns:
            The largest relative residual seen

        Raises:
            InvariantViolation: On the first failing check
        """
        worst = 0.0
        for m in self.transitions():
            if not m.is_holomorphic():
                raise InvariantViolation(f"transition {m.source}->{m.target} is holomorphic")
        for (a, b), first in sorted(self._transitions.items()):
            for c in self.chart_ids():
                second = self.transition(b, c)
                direct = self.transition(a, c)
                if second is None or direct is None:
                    continue
                composed = compose(second, first)
                points = self.chart(a).sampling_region().sample(rng, samples)
                name = f"transition cocycle {a}->{b}->{c}"
                worst = max(worst, self._compare(composed, direct, points, name, tol))
        logger.debug("[ATLAS] transitions=%d cocycle_residual=%.3e", len(self._transitions), worst)
        return worst

    @staticmethod
    def _compare(left: ChartMap, right: ChartMap, points: np.ndarray, name: str, tol: float) -> float:
        worst = 0.0
        for p in points:
            try:
                lv = left.apply(p)
                rv = right.apply(p)
            except PoleError:
                continue
            if np.any(np.abs(lv) > _FAR) or np.any(np.abs(rv) > _FAR):
                continue
            residual = float(np.max(np.abs(lv - rv) / np.maximum(1.0, np.abs(rv))))
            if residual > tol:
                raise InvariantViolation(name, tuple(p), residual)
            worst = max(worst, residual)
        return worst
