"""
Bundles Service
===============
This service handles the bundles layer responsibilities:
- Sampled checks of transition cocycles, sections and connection compatibility
- Curvature and the Bianchi residual
- Trivial connections of frames, frame completion and gluing by a partition of unity
- Whitney sums and gauge transport
- Location of the singular points of r-sections
"""

import logging
from typing import Callable, Dict, List, Optional

import numpy as np
import sympy as sp

from chernloc.config.settings import Settings, get_settings
from chernloc.layers.bundles.bundle import (
    BundleData,
    ConnectionData,
    Domain,
    SectionTuple,
    bianchi_defect,
    complete_frame,
    curvature_matrix,
    direct_sum,
    evaluate_matrix,
    glue_connections,
    trivial_connection,
)
from chernloc.layers.bundles.form_matrix import FormMatrix, gauge_transform
from chernloc.layers.bundles.singular_locus import LocatedPoint, singular_locus
from chernloc.layers.fields_forms.form import TangentVector
from chernloc.layers.geometry.partition import PartitionOfUnity
from chernloc.utils.errors import ChartMismatchError, InvariantViolation, PoleError

logger = logging.getLogger(__name__)

COCYCLE_TOLERANCE = 1e-9
CONNECTION_TOLERANCE = 1e-8


def evaluate_rows(fn: Callable[[np.ndarray], np.ndarray], points: np.ndarray) -> np.ndarray:
    """
    Apply a vectorised evaluation; on a pole fall back to point-wise evaluation with
    the pole rows left as nan.
    """
    try:
        return fn(points)
    except PoleError:
        rows = []
        for p in points:
            try:
                rows.append(fn(p.reshape(1, -1))[0])
            except PoleError:
                rows.append(None)
        shape = next((np.shape(r) for r in rows if r is not None), ())
        return np.stack([r if r is not None else np.full(shape, np.nan, dtype=complex) for r in rows])


class BundlesService:
    """
    Service class for bundles, sections and connections.
    """

    def __init__(self, settings: Optional[Settings] = None):
        """
        Initialize the bundles service.

        Args:
            settings: Optional settings; defaults to the process-wide settings
        """
        self.settings = settings or get_settings()

    def _rng(self) -> np.random.Generator:
        return np.random.default_rng(self.settings.seed)

    def _overlap_samples(self, bundle: BundleData, alpha: str, beta: str, rng: np.random.Generator):
        """Points of chart alpha with finite images in beta, and the images."""
        atlas = bundle.atlas
        points = atlas.chart(alpha).sampling_region().sample(rng, self.settings.sample_count)
        kept, images = [], []
        for p in points:
            image = atlas.to_chart(p.reshape(1, -1), alpha, beta)
            if image is not None:
                kept.append(p)
                images.append(image[0])
        return np.asarray(kept, dtype=complex), np.asarray(images, dtype=complex)

    # -- sampled checks -----------------------------------------------------

    def check_cocycle(self, bundle: BundleData) -> float:
        """
        g_ab(p) g_bc(phi_ab(p)) = g_ac(p) and det g_ab(p) != 0 at sample points.

        Returns:
            The largest residual seen

        Raises:
            InvariantViolation: On the first failing sample
        """
        rng = self._rng()
        worst = 0.0
        for alpha, beta in bundle.pairs():
            g_ab = bundle.matrix(alpha, beta)
            points, images = self._overlap_samples(bundle, alpha, beta, rng)
            if not len(points):
                continue
            first = evaluate_rows(lambda p: evaluate_matrix(g_ab, p, f"g[{alpha},{beta}]"), points)
            determinants = np.abs(np.linalg.det(first))
            if np.any(determinants < COCYCLE_TOLERANCE):
                bad = int(np.argmin(determinants))
                raise InvariantViolation(f"det g[{alpha},{beta}] != 0", tuple(points[bad]), float(determinants[bad]))
            for gamma in bundle.atlas.chart_ids():
                g_bc, g_ac = bundle.matrix(beta, gamma), bundle.matrix(alpha, gamma)
                if g_bc is None or g_ac is None:
                    continue
                second = evaluate_rows(lambda p: evaluate_matrix(g_bc, p), images)
                direct = evaluate_rows(lambda p: evaluate_matrix(g_ac, p), points)
                residual = np.max(np.abs(first @ second - direct), axis=(1, 2)) / np.maximum(1.0, np.max(np.abs(direct), axis=(1, 2)))
                residual = np.nan_to_num(residual, nan=0.0)
                if np.any(residual > COCYCLE_TOLERANCE):
                    bad = int(np.argmax(residual))
                    raise InvariantViolation(f"bundle cocycle {alpha}->{beta}->{gamma}", tuple(points[bad]), float(residual[bad]))
                worst = max(worst, float(np.max(residual)))
        logger.debug("[BUNDLES] cocycle_residual=%.3e", worst)
        return worst

    def check_section(self, section: SectionTuple) -> float:
        """
        S_a(p) = g_ab(p) S_b(phi_ab(p)) wherever two charts carry explicit section data.

        Raises:
            InvariantViolation: On the first failing sample
        """
        bundle = section.bundle
        rng = self._rng()
        worst = 0.0
        given = dict(section.pieces)
        for alpha, beta in bundle.pairs():
            if alpha not in given or beta not in given:
                continue
            g = bundle.matrix(alpha, beta)
            points, images = self._overlap_samples(bundle, alpha, beta, rng)
            if not len(points):
                continue
            left = evaluate_rows(lambda p: evaluate_matrix(sp.Matrix(given[alpha]), p, "section"), points)
            transition = evaluate_rows(lambda p: evaluate_matrix(g, p), points)
            right = evaluate_rows(lambda p: evaluate_matrix(sp.Matrix(given[beta]), p, "section"), images)
            residual = np.max(np.abs(left - transition @ right), axis=(1, 2)) / np.maximum(1.0, np.max(np.abs(left), axis=(1, 2)))
            residual = np.nan_to_num(residual, nan=0.0)
            if np.any(residual > COCYCLE_TOLERANCE):
                bad = int(np.argmax(residual))
                raise InvariantViolation(f"section compatible {alpha}<->{beta}", tuple(points[bad]), float(residual[bad]))
            worst = max(worst, float(np.max(residual)))
        return worst

    def check_connection(self, connection: ConnectionData, tol: float = CONNECTION_TOLERANCE) -> float:
        """
        theta_b (pulled to chart a) = g^-1 theta_a g + g^-1 dg at samples inside the connection's domain.

        Raises:
            InvariantViolation: On the first failing sample
        """
        bundle = connection.bundle
        atlas = bundle.atlas
        rng = self._rng()
        worst = 0.0
        for alpha, beta in bundle.pairs():
            try:
                expected = gauge_transform(connection.on(alpha), bundle.matrix(alpha, beta))
                pulled = connection.on(beta).map(lambda entry: atlas.pull_form(entry, alpha))
            except ChartMismatchError as exc:
                logger.debug("[BUNDLES] skip pair %s->%s: %s", alpha, beta, exc)
                continue
            points, _ = self._overlap_samples(bundle, alpha, beta, rng)
            if not len(points):
                continue
            points = points[connection.domain.mask(alpha, points)]
            if not len(points):
                continue
            holo = rng.normal(size=points.shape) + 1j * rng.normal(size=points.shape)
            for p, v in zip(points, holo):
                one = [TangentVector.real(v.reshape(1, -1))]
                try:
                    left = pulled.evaluate(p.reshape(1, -1), one)
                    right = expected.evaluate(p.reshape(1, -1), one)
                except PoleError:
                    continue
                residual = float(np.max(np.abs(left - right)) / max(1.0, float(np.max(np.abs(right)))))
                if residual > tol:
                    raise InvariantViolation(f"connection compatible {alpha}->{beta}", tuple(p), residual)
                worst = max(worst, residual)
        logger.debug("[BUNDLES] connection_residual=%.3e domain=%s", worst, connection.domain.kind)
        return worst

    # -- curvature ----------------------------------------------------------

    def curvature(self, connection: ConnectionData) -> Dict[str, FormMatrix]:
        """K = d theta + theta ^ theta on every chart the connection reaches."""
        out = {}
        for chart_id in connection.bundle.atlas.chart_ids():
            try:
                out[chart_id] = curvature_matrix(connection.on(chart_id))
            except ChartMismatchError as exc:
                logger.debug("[BUNDLES] no curvature on %s: %s", chart_id, exc)
        return out

    def bianchi_residual(self, connection: ConnectionData, chart_id: str, points: np.ndarray) -> float:
        """Largest value of dK - K ^ theta + theta ^ K on random real vectors at the points."""
        defect = bianchi_defect(connection.on(chart_id))
        rng = self._rng()
        points = np.atleast_2d(np.asarray(points, dtype=complex))
        vectors = [TangentVector.real(rng.normal(size=points.shape) + 1j * rng.normal(size=points.shape)) for _ in range(3)]
        values = defect.evaluate(points, vectors)
        return float(np.max(np.abs(values))) if values.size else 0.0

    # -- construction -------------------------------------------------------

    def trivial_connection(self, frame: SectionTuple, domain: Domain = Domain(), samples: Optional[Dict[str, np.ndarray]] = None) -> ConnectionData:
        return trivial_connection(frame, domain, samples)

    def complete_frame(self, section: SectionTuple, samples: Dict[str, np.ndarray]):
        return complete_frame(section, samples)

    def glue_connections(self, partition: PartitionOfUnity, c0: ConnectionData, c1: ConnectionData) -> ConnectionData:
        return glue_connections(partition, c0, c1)

    def direct_sum(self, c0: ConnectionData, c1: ConnectionData) -> ConnectionData:
        return direct_sum(c0, c1)

    def gauge_transform(self, theta: FormMatrix, g: sp.Matrix) -> FormMatrix:
        return gauge_transform(theta, g)

    def transport(self, connection: ConnectionData, chart_id: str) -> FormMatrix:
        return connection.on(chart_id)

    def singular_locus(self, section: SectionTuple, regions: Optional[dict] = None) -> List[LocatedPoint]:
        return singular_locus(section, self.settings.locus_search_radius, self.settings.locus_grid, regions)
