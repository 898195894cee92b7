"""
Cech-de Rham Service
====================
This service handles the cechderham layer responsibilities:
- The operator D, restriction of global forms and collation by a partition of unity
- Honeycomb integration of cochains over chains, with the clipping of simplices
- Sampled checks: D o D = 0, collate o restrict = id, honeycomb against direct integration
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from chernloc.config.settings import Settings, get_settings
from chernloc.layers.cechderham.clipping import clip_simplex
from chernloc.layers.cechderham.cochain import CechCochain, apply_d, collate, piece_on, restrict_global
from chernloc.layers.fields_forms.form import SceneForm, exterior_derivative
from chernloc.layers.fields_forms.sampling import random_points, sampled_norm
from chernloc.layers.geometry.atlas import Atlas
from chernloc.layers.geometry.honeycomb import HoneycombSystem
from chernloc.layers.geometry.partition import PartitionOfUnity
from chernloc.layers.mesh.mesh_service import MeshService
from chernloc.layers.mesh.simplices import Chain, Simplex
from chernloc.models.data_models import QuadratureResult
from chernloc.utils.errors import DimensionMismatchError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HoneycombSplit:
    """A chain cut along a honeycomb: regular part, singular parts and interface arcs."""

    regular: Chain
    singular: Chain
    interface: Chain


@dataclass(frozen=True)
class HoneycombComparison:
    """Honeycomb integral of P(omega) against the direct integral of omega."""

    honeycomb: QuadratureResult
    direct: QuadratureResult

    @property
    def difference(self) -> float:
        return abs(self.honeycomb.value - self.direct.value)


class CechDeRhamService:
    """
    Service class for two-set Cech-de Rham cochains.
    """

    def __init__(self, settings: Optional[Settings] = None, atlas: Optional[Atlas] = None):
        """
        Initialize the Cech-de Rham service.

        Args:
            settings: Optional settings; defaults to the process-wide settings
            atlas: Atlas the cochains live on
        """
        self.settings = settings or get_settings()
        self.atlas = atlas
        self.mesh = MeshService(self.settings, atlas)

    def _rng(self) -> np.random.Generator:
        return np.random.default_rng(self.settings.seed)

    def apply_d(self, c: CechCochain) -> CechCochain:
        return apply_d(c)

    def restrict_global(self, form: SceneForm) -> CechCochain:
        return restrict_global(form)

    def collate(self, c: CechCochain, partition: PartitionOfUnity) -> SceneForm:
        return collate(c, partition, self.atlas or partition.covering.atlas)

    # -- honeycomb integration -----------------------------------------------

    def split(self, chain: Chain, honeycomb: HoneycombSystem) -> HoneycombSplit:
        """
        Clip every simplex of the chain against the honeycomb cells.

        Raises:
            ClippingError: If a simplex touches an interface tangentially, meets two
                interfaces, or is not an affine triangle where it crosses one
        """
        regular: List[Tuple[Simplex, int]] = []
        singular: List[Tuple[Simplex, int]] = []
        interface: List[Tuple[Simplex, int]] = []
        for simplex, weight in chain.simplices():
            pieces = clip_simplex(simplex, honeycomb)
            regular.extend((piece, weight) for piece in pieces.regular)
            for nu in sorted(pieces.singular):
                singular.extend((piece, weight) for piece in pieces.singular[nu])
            for nu in sorted(pieces.interface):
                interface.extend((arc, weight) for arc in pieces.interface[nu])
        logger.debug("[CECH] split regular=%d singular=%d arcs=%d", len(regular), len(singular), len(interface))
        return HoneycombSplit(
            Chain(chain.order, tuple(regular)),
            Chain(chain.order, tuple(singular)),
            Chain(chain.order - 1, tuple(interface)),
        )

    def honeycomb_integrate(
        self, c: CechCochain, chain: Chain, honeycomb: HoneycombSystem, tol: Optional[float] = None
    ) -> QuadratureResult:
        """
        Integral of omega0 over chain ^ R0, plus omega1 over chain ^ R1, minus omega01 over
        the interface arcs of the chain.

        Args:
            c: cochain of degree equal to the chain dimension
            chain: chain to integrate over
            honeycomb: cell system
            tol: quadrature tolerance per simplex

        Returns:
            QuadratureResult summed over the three terms

        Raises:
            DimensionMismatchError: If the degrees do not fit
            ClippingError: If the chain cannot be cut along the honeycomb
        """
        if chain.order != c.degree or c.degree < 1:
            raise DimensionMismatchError(f"degree-{c.degree} cochain integrated over a {chain.order}-chain")
        pieces = self.split(chain, honeycomb)
        total = self.mesh.integrate_over_chain(c.omega0, pieces.regular, tol)
        total = total + self.mesh.integrate_over_chain(c.omega1, pieces.singular, tol)
        if c.omega01 is not None and not all(piece.is_zero() for _, piece in c.omega01):
            total = total - self.mesh.integrate_over_chain(c.omega01, pieces.interface, tol)
        logger.info("[CECH] honeycomb value=%s error=%.3e cells=%d", total.value, total.error, total.cells)
        return total

    def honeycomb_vs_direct(
        self, form: SceneForm, chain: Chain, honeycomb: HoneycombSystem, tol: Optional[float] = None
    ) -> HoneycombComparison:
        honey = self.honeycomb_integrate(restrict_global(form), chain, honeycomb, tol)
        direct = self.mesh.integrate_over_chain(form, chain, tol)
        return HoneycombComparison(honey, direct)

    # -- sampled checks -------------------------------------------------------

    def _scene_norm(self, form: SceneForm, rng: np.random.Generator, count: int) -> float:
        worst = 0.0
        for chart_id, piece in form:
            if piece.is_zero():
                continue
            if self.atlas is not None:
                points = self.atlas.chart(chart_id).sampling_region().sample(rng, count)
            else:
                points = random_points(rng, count, piece.dimension)
            worst = max(worst, sampled_norm(piece, points, rng))
        return worst

    def check_dd(self, c: CechCochain, count: Optional[int] = None) -> float:
        """Largest sampled value of a component of D(D(c)); zero when D(D(c)) is structurally zero."""
        dd = apply_d(apply_d(c))
        if dd.is_zero():
            return 0.0
        rng = self._rng()
        count = count or self.settings.sample_count
        parts = [dd.omega0, dd.omega1] + ([dd.omega01] if dd.omega01 is not None else [])
        return max(self._scene_norm(part, rng, count) for part in parts)

    def check_cocycle(self, c: CechCochain, count: Optional[int] = None) -> float:
        """Largest sampled value of a component of D(c); points at poles are skipped."""
        dc = apply_d(c)
        if dc.is_zero():
            return 0.0
        rng = self._rng()
        count = count or self.settings.sample_count
        parts = [dc.omega0, dc.omega1] + ([dc.omega01] if dc.omega01 is not None else [])
        worst = max(self._scene_norm(part, rng, count) for part in parts)
        logger.debug("[CECH] cocycle residual=%.3e", worst)
        return worst

    def check_collate_restrict(self, form: SceneForm, partition: PartitionOfUnity, points: Dict[str, np.ndarray]) -> float:
        """max |collate(P(omega)) - omega| at the given points of each chart."""
        atlas = self.atlas or partition.covering.atlas
        glued = collate(restrict_global(form), partition, atlas)
        rng = self._rng()
        worst = 0.0
        for chart_id, chart_points in points.items():
            difference = glued.on(chart_id) - piece_on(form, chart_id, atlas)
            worst = max(worst, sampled_norm(difference, chart_points, rng))
        logger.debug("[CECH] collate_restrict_residual=%.3e", worst)
        return worst

    def collate_closed_residual(self, c: CechCochain, partition: PartitionOfUnity, points: Dict[str, np.ndarray]) -> float:
        """max |d collate(c)| at the given points; small whenever D(c) = 0."""
        glued = self.collate(c, partition)
        rng = self._rng()
        worst = 0.0
        for chart_id, chart_points in points.items():
            worst = max(worst, sampled_norm(exterior_derivative(glued.on(chart_id)), chart_points, rng))
        return worst
