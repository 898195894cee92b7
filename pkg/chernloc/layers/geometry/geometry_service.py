"""
Geometry Service
================
This service handles the geometry layer responsibilities:
- Sampled checks of transition maps (holomorphy, inverses, cocycle)
- Partitions of unity subordinate to two-set coverings
- Honeycomb cell systems from marked points
- Links, disks and spheres as chains
- Adapted-set (Z) checks and Z-vanishing of relative forms
"""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from chernloc.config.settings import Settings, get_settings
from chernloc.layers.fields_forms.form import Form, TangentVector, evaluate
from chernloc.layers.geometry.atlas import Atlas
from chernloc.layers.geometry.chains import disk_chain, link_of_point, sphere_chain
from chernloc.layers.geometry.covering import Covering
from chernloc.layers.geometry.honeycomb import HoneycombSystem, honeycomb_from_marks
from chernloc.layers.geometry.partition import BumpProfile, PartitionOfUnity, build_partition_of_unity
from chernloc.layers.mesh.simplices import Chain
from chernloc.utils.errors import InvariantViolation

logger = logging.getLogger(__name__)


class GeometryService:
    """
    Service class for charts, coverings, partitions and honeycombs.
    """

    def __init__(self, settings: Optional[Settings] = None):
        """
        Initialize the geometry service.

        Args:
            settings: Optional settings; defaults to the process-wide settings
        """
        self.settings = settings or get_settings()

    def _rng(self) -> np.random.Generator:
        return np.random.default_rng(self.settings.seed)

    def check_atlas(self, atlas: Atlas) -> float:
        return atlas.check_transitions(self._rng(), self.settings.sample_count)

    def build_partition_of_unity(self, covering: Covering, profile: BumpProfile = BumpProfile()) -> PartitionOfUnity:
        covering.check_disjoint()
        return build_partition_of_unity(covering, profile)

    def honeycomb_from_marks(
        self, covering: Covering, marks: Sequence[Tuple[str, Sequence[complex]]], radius: float
    ) -> HoneycombSystem:
        return honeycomb_from_marks(covering, marks, radius)

    def link_of_point(self, chart_id: str, center: Sequence[complex], radius: float, segments: Optional[int] = None) -> Chain:
        segments = segments or self.settings.link_segments
        if segments < 8:
            raise ValueError(f"a link needs at least 8 segments (got {segments})")
        return link_of_point(chart_id, center, radius, segments)

    def disk_chain(self, chart_id: str, center: Sequence[complex], radius: float) -> Chain:
        return disk_chain(chart_id, center, radius)

    def sphere_chain(self, chart_id: str, center: Sequence[complex], radius: float, m: int) -> Chain:
        return sphere_chain(chart_id, center, radius, m, self.settings.link_segments)

    def check_adapted_set(self, covering: Covering) -> None:
        covering.check_adapted_set(self._rng(), self.settings.sample_count)

    def vanishes_on_z(self, form: Form, covering: Covering, tol: float = 1e-9) -> bool:
        """
        Whether a relative form vanishes along Z, on random tangent vectors at Z samples.

        Raises:
            InvariantViolation: If some sample gives a value above tol
        """
        rng = self._rng()
        for region in covering.adapted_set:
            if region.chart_id != form.chart_id:
                continue
            points = region.sample(rng, self.settings.sample_count)
            vectors = [
                TangentVector.real(rng.normal(size=points.shape) + 1j * rng.normal(size=points.shape))
                for _ in range(form.degree)
            ]
            values = evaluate(form, points, vectors)
            worst = int(np.argmax(np.abs(values)))
            if abs(values[worst]) > tol:
                raise InvariantViolation("form vanishes on Z", tuple(points[worst]), float(abs(values[worst])))
        return True

    def cell_census(self, honeycomb: HoneycombSystem, chart_id: str, points: np.ndarray) -> np.ndarray:
        """Counts of points per cell: index 0 regular, nu + 1 singular; interface hits excluded."""
        cells = honeycomb.cell_of(chart_id, points)
        counts = np.bincount(cells[cells >= 0], minlength=len(honeycomb.disks) + 1)
        logger.debug("[HONEYCOMB] census=%s", counts.tolist())
        return counts
