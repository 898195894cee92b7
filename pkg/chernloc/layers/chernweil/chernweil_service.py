"""
Chern-Weil Service
==================
This service handles the chernweil layer responsibilities:
- Chern forms c^q of connections, singly or in all degrees
- Bott difference forms through the family connection and fibre integration
- The localized Chern cocycle (0, c^q(nabla1), bott(nabla0, nabla1)) of a section
- Sampled checks: closedness, reality, overlap agreement and d bott = c1 - c0
"""

import logging
from typing import Dict, Optional

import numpy as np

from chernloc.config.settings import Settings, get_settings
from chernloc.layers.bundles.bundle import (
    BundleData,
    ConnectionData,
    Domain,
    SectionTuple,
    complete_frame,
    trivial_connection,
)
from chernloc.layers.bundles.singular_locus import singular_locus
from chernloc.layers.cechderham.cochain import CechCochain
from chernloc.layers.chernweil.chern import bott_difference, chern_form, fibre_integrate
from chernloc.layers.fields_forms.form import Form, SceneForm, exterior_derivative
from chernloc.layers.fields_forms.sampling import sampled_norm, sampled_values
from chernloc.layers.geometry.atlas import Atlas
from chernloc.layers.geometry.covering import Covering
from chernloc.layers.mesh.mesh_service import MeshService
from chernloc.layers.mesh.triangulation import Triangulation
from chernloc.models.data_models import QuadratureResult
from chernloc.utils.errors import ChartMismatchError, DimensionMismatchError, FrameSingularError

logger = logging.getLogger(__name__)

# Imaginary parts above this are reported as non-real Chern samples
REALITY_TOLERANCE = 1e-9


class ChernWeilService:
    """
    Service class for Chern and Bott forms.
    """

    def __init__(self, settings: Optional[Settings] = None):
        """
        Initialize the Chern-Weil service.

        Args:
            settings: Optional settings; defaults to the process-wide settings
        """
        self.settings = settings or get_settings()

    def _rng(self) -> np.random.Generator:
        return np.random.default_rng(self.settings.seed)

    def _samples(self, atlas: Atlas, chart_id: str, rng: np.random.Generator, count: int, domain: Domain = Domain()) -> np.ndarray:
        region = atlas.chart(chart_id).sampling_region()
        # Oversample so that masking by the domain still leaves points
        points = region.sample(rng, 4 * count)
        return points[domain.mask(chart_id, points)][:count]

    # -- forms ----------------------------------------------------------------

    def chern_form(self, connection: ConnectionData, q: int) -> SceneForm:
        result = chern_form(connection, q)
        logger.debug("[CHERN] c^%d charts=%s", q, list(result.charts()))
        return result

    def chern_total(self, connection: ConnectionData) -> Dict[int, SceneForm]:
        """c^0, ..., c^e of a rank-e connection, keyed by q."""
        return {q: self.chern_form(connection, q) for q in range(connection.bundle.rank + 1)}

    def bott_difference(self, c0: ConnectionData, c1: ConnectionData, q: int, rule: Optional[str] = None) -> SceneForm:
        """
        Bott difference form bott^q(nabla0, nabla1).

        Args:
            c0: first connection
            c1: second connection, on the same bundle
            q: Chern degree, at least 1
            rule: 'exact' or 'gauss' fibre integration; defaults to the configured rule
        """
        if c0.bundle != c1.bundle:
            raise ChartMismatchError("Bott difference of connections on different bundles")
        return bott_difference(c0, c1, q, rule or self.settings.fibre_rule, self.settings.fibre_gauss_order)

    def fibre_integrate(self, form: Form, rule: Optional[str] = None) -> Form:
        return fibre_integrate(form, rule or self.settings.fibre_rule, self.settings.fibre_gauss_order)

    def localizing_connection(self, section: SectionTuple, q: int, covering: Covering) -> ConnectionData:
        """
        nabla0: the connection on V0 for which the section, completed to a frame with
        constant columns, is parallel.

        Raises:
            DimensionMismatchError: If the section does not have e - q + 1 components
            FrameSingularError: If the section is singular somewhere in V0
        """
        bundle = section.bundle
        if section.r != bundle.rank - q + 1:
            raise DimensionMismatchError(f"c^{q} of a rank-{bundle.rank} bundle is localized by {bundle.rank - q + 1}-sections, not {section.r}")
        domain = Domain("V0", covering)
        for located in singular_locus(section, self.settings.locus_search_radius, self.settings.locus_grid):
            if domain.mask(located.chart_id, np.asarray([located.coords]))[0]:
                raise FrameSingularError(f"section is singular at {located.coords} in chart {located.chart_id!r}, inside V0")
        rng = self._rng()
        samples = {
            chart.id: self._samples(bundle.atlas, chart.id, rng, self.settings.sample_count, domain) for chart in bundle.atlas.charts
        }
        frame, chosen = complete_frame(section, samples)
        try:
            nabla0 = trivial_connection(frame, domain, samples)
        except FrameSingularError:
            logger.error("[CHERN] section singular on V0 (completed with columns %s)", chosen)
            raise
        return nabla0

    def localized_chern_cocycle(
        self, bundle: BundleData, section: SectionTuple, c1: ConnectionData, q: int, covering: Covering
    ) -> CechCochain:
        """
        The Chern cocycle of degree 2q localized by a section nonsingular on V0:
        (0, c^q(nabla1), bott^q(nabla0, nabla1)) with nabla0 the localizing connection.

        Args:
            bundle: the bundle
            section: r-section with r = e - q + 1
            c1: connection used on V1
            q: Chern degree, at least 1
            covering: covering whose V0 the section frames

        Returns:
            CechCochain of degree 2q

        Raises:
            DimensionMismatchError: If the section has the wrong number of components
            FrameSingularError: If the section is singular somewhere in V0
        """
        if q < 1:
            raise ValueError(f"localized Chern cocycles exist for q >= 1 (got {q})")
        if section.bundle != bundle:
            raise ChartMismatchError("section belongs to another bundle")
        nabla0 = self.localizing_connection(section, q, covering)
        omega1 = self.chern_form(c1, q)
        omega0 = SceneForm.from_mapping(2 * q, {cid: Form.zero(cid, piece.dimension, 2 * q) for cid, piece in omega1})
        bott = self.bott_difference(nabla0, c1, q)
        logger.info("[CHERN] localized cocycle q=%d rank=%d charts=%s", q, bundle.rank, list(omega1.charts()))
        return CechCochain(2 * q, omega0, omega1, bott)

    def chern_integral(self, connection: ConnectionData, q: int, triangulation: Triangulation, tol: Optional[float] = None) -> QuadratureResult:
        """Integral of c^q over the fundamental class of a closed triangulated model of real dimension 2q."""
        if triangulation.order != 2 * q:
            raise DimensionMismatchError(f"c^{q} integrated over a {triangulation.order}-dimensional triangulation")
        mesh = MeshService(self.settings, triangulation.atlas)
        result = mesh.integrate_fundamental_class(self.chern_form(connection, q), triangulation, tol)
        logger.info("[CHERN] integral q=%d value=%s error=%.3e", q, result.value, result.error)
        return result

    # -- sampled checks -------------------------------------------------------

    def check_closed(self, form: SceneForm, atlas: Atlas, count: Optional[int] = None) -> float:
        """Largest sampled |d form| over the charts of the form."""
        rng = self._rng()
        count = count or self.settings.sample_count
        worst = 0.0
        for chart_id, piece in form:
            worst = max(worst, sampled_norm(exterior_derivative(piece), self._samples(atlas, chart_id, rng, count), rng))
        logger.debug("[CHERN] closedness residual=%.3e", worst)
        return worst

    def check_real(self, form: SceneForm, atlas: Atlas, count: Optional[int] = None) -> float:
        """Largest imaginary part of the form on real tangent vectors; warns above the reality tolerance."""
        rng = self._rng()
        count = count or self.settings.sample_count
        worst = 0.0
        for chart_id, piece in form:
            if piece.is_zero():
                continue
            values = sampled_values(piece, self._samples(atlas, chart_id, rng, count), rng)
            if len(values):
                worst = max(worst, float(np.max(np.abs(values.imag))))
        if worst > REALITY_TOLERANCE:
            logger.warning("[CHERN] non-real Chern samples: max imaginary part %.3e", worst)
        return worst

    def check_overlaps(self, form: SceneForm, atlas: Atlas, count: Optional[int] = None) -> float:
        """Largest sampled difference between a piece and the pullback of another chart's piece."""
        rng = self._rng()
        count = count or self.settings.sample_count
        worst = 0.0
        for target, piece in form:
            for source, other in form:
                if source == target or atlas.transition(target, source) is None:
                    continue
                difference = piece - atlas.pull_form(other, target)
                worst = max(worst, sampled_norm(difference, self._samples(atlas, target, rng, count), rng))
        return worst

    def check_difference_identity(self, c0: ConnectionData, c1: ConnectionData, q: int, count: Optional[int] = None) -> float:
        """Largest sampled |d bott(nabla0, nabla1) - (c^q(nabla1) - c^q(nabla0))|."""
        atlas = c0.bundle.atlas
        bott = self.bott_difference(c0, c1, q)
        first, second = self.chern_form(c0, q), self.chern_form(c1, q)
        rng = self._rng()
        count = count or self.settings.sample_count
        worst = 0.0
        for chart_id, piece in bott:
            defect = exterior_derivative(piece) - (second.on(chart_id) - first.on(chart_id))
            worst = max(worst, sampled_norm(defect, self._samples(atlas, chart_id, rng, count), rng))
        logger.debug("[CHERN] difference identity residual=%.3e", worst)
        return worst

    def check_antisymmetry(self, c0: ConnectionData, c1: ConnectionData, q: int, count: Optional[int] = None) -> float:
        """Largest sampled |bott(nabla1, nabla0) + bott(nabla0, nabla1)|."""
        atlas = c0.bundle.atlas
        forward, backward = self.bott_difference(c0, c1, q), self.bott_difference(c1, c0, q)
        rng = self._rng()
        count = count or self.settings.sample_count
        worst = 0.0
        for chart_id, piece in forward:
            worst = max(worst, sampled_norm(piece + backward.on(chart_id), self._samples(atlas, chart_id, rng, count), rng))
        return worst
