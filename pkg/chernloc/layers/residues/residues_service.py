"""
Residues Service
================
This service handles the residues layer responsibilities:
- Bochner-Martinelli kernels and indices of maps and of sections at isolated zeros
- Camacho-Sad residues, directly and as Bott residues of the induced normal connection
- Differential residues at singular points and the residue-theorem check
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import sympy as sp

from chernloc.config.settings import Settings, get_settings
from chernloc.layers.bundles.bundle import BundleData, ConnectionData, SectionTuple, connection_from_forms, glue_connections
from chernloc.layers.bundles.singular_locus import LocatedPoint, singular_locus
from chernloc.layers.chernweil.chernweil_service import ChernWeilService
from chernloc.layers.fields_forms.form import Form
from chernloc.layers.fields_forms.scalar_field import is_holomorphic
from chernloc.layers.geometry.atlas import Atlas, Chart
from chernloc.layers.geometry.chains import disk_chain, link_of_point, sphere_chain
from chernloc.layers.geometry.covering import Covering, SingularDisk
from chernloc.layers.geometry.honeycomb import honeycomb_from_marks
from chernloc.layers.geometry.partition import build_partition_of_unity
from chernloc.layers.mesh.mesh_service import MeshService
from chernloc.layers.mesh.simplices import Chain
from chernloc.layers.mesh.triangulation import Triangulation
from chernloc.layers.residues.foliation import LINE_CHART, FoliationGerm
from chernloc.layers.residues.kernel import INDEX_RESIDUAL, bochner_martinelli_kernel, pulled_kernel
from chernloc.models.data_models import QuadratureResult, ResiduePoint, ResidueReport
from chernloc.utils.errors import DimensionMismatchError, HoneycombError, ResidualTooLargeError

logger = logging.getLogger(__name__)

# Singular points must keep this fraction of the cell radius away from every interface
INTERFACE_MARGIN = 0.1


def _pair(value: complex) -> List[float]:
    return [float(np.real(value)), float(np.imag(value))]


@dataclass(frozen=True)
class LocalResidue:
    """Differential residue at one singular point: disk term minus link term."""

    point: LocatedPoint
    disk_term: QuadratureResult
    link_term: QuadratureResult

    @property
    def result(self) -> QuadratureResult:
        return self.disk_term - self.link_term

    @property
    def value(self) -> complex:
        return self.result.value

    def as_model(self) -> ResiduePoint:
        return ResiduePoint(
            chart=self.point.chart_id,
            point=[_pair(c) for c in self.point.coords],
            local=_pair(self.value),
            error=self.result.error,
            cells=self.result.cells,
            disk_term=_pair(self.disk_term.value),
            link_term=_pair(self.link_term.value),
        )


def nearest_integer(value: complex, residual: float = INDEX_RESIDUAL) -> int:
    """
    Raises:
        ResidualTooLargeError: If value is farther than residual from an integer
    """
    k = int(round(float(np.real(value))))
    distance = abs(value - k)
    if distance > residual:
        raise ResidualTooLargeError(f"{value} is {distance:.3e} away from the nearest integer {k}")
    return k


class ResiduesService:
    """
    Service class for indices and residues.
    """

    def __init__(self, settings: Optional[Settings] = None):
        """
        Initialize the residues service.

        Args:
            settings: Optional settings; defaults to the process-wide settings
        """
        self.settings = settings or get_settings()
        self.chern = ChernWeilService(self.settings)

    # -- Bochner-Martinelli ---------------------------------------------------

    def bochner_martinelli_kernel(self, m: int) -> Form:
        return bochner_martinelli_kernel(m)

    def bm_integral(self, components: Sequence, sphere: Chain, tol: Optional[float] = None) -> QuadratureResult:
        """
        Integral of f^* beta_m over the sphere chain, taken as the boundary of the regular cell.

        Raises:
            DimensionMismatchError: If the chain is not (2m-1)-dimensional
            PoleError: If f vanishes on the chain
        """
        m = len(components)
        if sphere.order != 2 * m - 1:
            raise DimensionMismatchError(f"a map into C^{m} is integrated over (2m-1)-spheres, not {sphere.order}-chains")
        first, _ = next(iter(sphere.simplices()))
        pulled = pulled_kernel(components, first.chart_id, first.dimension)
        return -MeshService(self.settings).integrate_over_chain(pulled, sphere, tol)

    def bm_index(self, components: Sequence, sphere: Chain, tol: Optional[float] = None) -> int:
        """
        Index of f at the zeros enclosed by the sphere.

        Raises:
            ResidualTooLargeError: If the integral is more than 1e-3 from an integer
        """
        result = self.bm_integral(components, sphere, tol)
        index = nearest_integer(result.value)
        logger.info("[RESIDUE] bm index=%d value=%s error=%.3e", index, result.value, result.error)
        return index

    def section_index(self, section: SectionTuple, point: LocatedPoint, radius: float) -> int:
        """BM index of the local representative of an n-component section of a rank-n bundle."""
        chart = section.bundle.atlas.chart(point.chart_id)
        matrix = section.on(point.chart_id)
        if section.r != 1 or matrix.rows != chart.dimension:
            raise DimensionMismatchError("section indices are defined for one section of a bundle of rank n = dim X")
        sphere = sphere_chain(point.chart_id, point.coords, radius, chart.dimension, self.settings.link_segments)
        return self.bm_index([matrix[i, 0] for i in range(matrix.rows)], sphere)

    # -- Camacho-Sad ----------------------------------------------------------

    def induced_connection(self, germ: FoliationGerm) -> ConnectionData:
        """The rank-1 normal connection theta0 = -(a/b)(0, y) dy on the y-line."""
        line = BundleData.trivial(Atlas([Chart(LINE_CHART, 1)]), 1)
        return connection_from_forms(line, {LINE_CHART: [[germ.normal_connection_form()]]})

    def camacho_sad_residue(self, germ: FoliationGerm, link: Chain, tol: Optional[float] = None) -> complex:
        """
        (1/2 pi i) times the integral of a(0, y)/b(0, y) dy over the link.

        Raises:
            PoleError: If a/b has a pole on the link
        """
        return self.camacho_sad_result(germ, link, tol).value

    def camacho_sad_result(self, germ: FoliationGerm, link: Chain, tol: Optional[float] = None) -> QuadratureResult:
        """camacho_sad_residue with its quadrature error and cell count."""
        result = MeshService(self.settings).integrate_over_chain(germ.residue_form(), link, tol)
        scaled = QuadratureResult(result.value / (2j * np.pi), result.error / (2 * np.pi), result.cells)
        logger.info("[RESIDUE] camacho-sad value=%s error=%.3e", scaled.value, scaled.error)
        return scaled

    def camacho_sad_via_bott(self, germ: FoliationGerm, link: Chain, tol: Optional[float] = None) -> complex:
        """-integral over the link of bott(nabla0, nabla1) with nabla0 induced and nabla1 = 0."""
        return self.camacho_sad_via_bott_result(germ, link, tol).value

    def camacho_sad_via_bott_result(self, germ: FoliationGerm, link: Chain, tol: Optional[float] = None) -> QuadratureResult:
        nabla0 = self.induced_connection(germ)
        flat = connection_from_forms(nabla0.bundle, {LINE_CHART: [[Form.zero(LINE_CHART, 1, 1)]]})
        bott = self.chern.bott_difference(nabla0, flat, 1)
        return -MeshService(self.settings).integrate_over_chain(bott, link, tol)

    # -- residue theorem --------------------------------------------------------

    def differential_residue(
        self,
        section: SectionTuple,
        c1: ConnectionData,
        q: int,
        point: LocatedPoint,
        covering: Covering,
        radius: float,
        nabla0: Optional[ConnectionData] = None,
    ) -> LocalResidue:
        """
        integral of c^q(nabla1) over the cell around the point, minus the integral of
        bott(nabla0, nabla1) over its boundary circle.

        Raises:
            DimensionMismatchError: If the point's chart is not one-dimensional
        """
        atlas = section.bundle.atlas
        if atlas.chart(point.chart_id).dimension != 1:
            raise DimensionMismatchError("differential residues are integrated over disks in one-dimensional charts")
        nabla0 = nabla0 or self.chern.localizing_connection(section, q, covering)
        mesh = MeshService(self.settings, atlas)
        disk = disk_chain(point.chart_id, point.coords, radius)
        link = link_of_point(point.chart_id, point.coords, radius, self.settings.link_segments)
        disk_term = mesh.integrate_over_chain(self.chern.chern_form(c1, q), disk)
        link_term = mesh.integrate_over_chain(self.chern.bott_difference(nabla0, c1, q), link)
        local = LocalResidue(point, disk_term, link_term)
        logger.info("[RESIDUE] point=%s chart=%s local=%s", point.coords, point.chart_id, local.value)
        return local

    def _check_interfaces(self, atlas: Atlas, points: Sequence[LocatedPoint], radius: float) -> None:
        for p in points:
            for other in points:
                image = np.asarray(other.coords, dtype=complex).reshape(1, -1)
                if other.chart_id != p.chart_id:
                    image = atlas.to_chart(image, other.chart_id, p.chart_id)
                    if image is None:
                        continue
                distance = float(np.linalg.norm(image[0] - np.asarray(p.coords)))
                if abs(distance - radius) < INTERFACE_MARGIN * radius:
                    raise HoneycombError(f"singular point {other.coords} lies on the interface around {p.coords}")

    def residue_theorem_check(
        self,
        section: SectionTuple,
        c1: ConnectionData,
        triangulation: Triangulation,
        q: int,
        radii: Tuple[float, float, float],
        tol: Optional[float] = None,
    ) -> ResidueReport:
        """
        Compare the sum of the differential residues with the global Chern integral.

        Args:
            section: section whose singular points localize c^q
            c1: connection used near the singular points
            triangulation: closed triangulation of the model
            q: Chern degree
            radii: (inner, outer) covering radii and the honeycomb radius
            tol: quadrature tolerance

        Returns:
            ResidueReport with per-point residues, global value and discrepancy

        Raises:
            HoneycombError: If a singular point lies on an interface or cells overlap
            NonCompactSceneError: If the triangulation is not closed
        """
        inner, outer, radius = radii
        atlas = section.bundle.atlas
        points = singular_locus(section, self.settings.locus_search_radius, self.settings.locus_grid)
        covering = Covering(atlas, tuple(SingularDisk(p.chart_id, p.coords, inner, outer) for p in points))
        honeycomb_from_marks(covering, [(p.chart_id, p.coords) for p in points], radius)
        self._check_interfaces(atlas, points, radius)

        nabla0 = self.chern.localizing_connection(section, q, covering)
        locals_ = [self.differential_residue(section, c1, q, p, covering, radius, nabla0) for p in points]
        glued = glue_connections(build_partition_of_unity(covering), nabla0, c1) if points else nabla0
        global_result = self.chern.chern_integral(glued, q, triangulation, tol)

        local_sum = sum((r.result for r in locals_), QuadratureResult.zero())
        discrepancy = abs(global_result.value - local_sum.value)
        integral_check = q == atlas.charts[0].dimension and self._holomorphic(section)
        logger.info("[RESIDUE] theorem q=%d points=%d global=%s sum=%s discrepancy=%.3e", q, len(points), global_result.value, local_sum.value, discrepancy)
        return ResidueReport(
            q=q,
            points=[r.as_model() for r in locals_],
            global_value=_pair(global_result.value),
            global_error=global_result.error,
            global_cells=global_result.cells,
            local_sum=_pair(local_sum.value),
            local_error=local_sum.error,
            local_cells=local_sum.cells,
            discrepancy=discrepancy,
            integral_check=integral_check,
        )

    @staticmethod
    def _holomorphic(section: SectionTuple) -> bool:
        atlas = section.bundle.atlas
        return all(
            is_holomorphic(entry, atlas.chart(chart_id).dimension) for chart_id, matrix in section.pieces for entry in sp.Matrix(matrix)
        )
