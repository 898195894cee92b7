"""
Mesh Service
============
This service handles the mesh layer responsibilities:
- Integration of forms over simplices and chains
- Boundaries and Stokes comparisons
- Integration over the fundamental class of a compact triangulated model
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Union

from chernloc.config.settings import Settings, get_settings
from chernloc.layers.fields_forms.form import Form, SceneForm, exterior_derivative
from chernloc.layers.geometry.atlas import Atlas
from chernloc.layers.mesh.quadrature import AdaptiveQuadrature
from chernloc.layers.mesh.simplices import Chain, Simplex, boundary
from chernloc.layers.mesh.triangulation import Triangulation
from chernloc.models.data_models import QuadratureResult, StokesReport
from chernloc.utils.errors import ChartMismatchError

logger = logging.getLogger(__name__)

Integrand = Union[Form, SceneForm]


class MeshService:
    """
    Service class for integration over chains.
    """

    def __init__(self, settings: Optional[Settings] = None, atlas: Optional[Atlas] = None):
        """
        Initialize the mesh service.

        Args:
            settings: Optional settings; defaults to the process-wide settings
            atlas: Optional atlas used to move forms onto the chart of a simplex
        """
        self.settings = settings or get_settings()
        self.atlas = atlas
        self.quadrature = AdaptiveQuadrature(self.settings.gauss_order, self.settings.max_cells)

    def _form_on(self, integrand: Integrand, chart_id: str) -> Form:
        if isinstance(integrand, Form):
            if integrand.chart_id == chart_id:
                return integrand
            if self.atlas is None:
                raise ChartMismatchError(f"form on {integrand.chart_id!r} integrated over a simplex in {chart_id!r}")
            return self.atlas.pull_form(integrand, chart_id)
        if chart_id in integrand.charts():
            return integrand.on(chart_id)
        if self.atlas is None:
            raise ChartMismatchError(f"scene form has no piece on chart {chart_id!r}")
        for source in integrand.charts():
            if self.atlas.transition(chart_id, source) is not None:
                return self.atlas.pull_form(integrand.on(source), chart_id)
        raise ChartMismatchError(f"scene form cannot be moved onto chart {chart_id!r}")

    def integrate_over_simplex(self, integrand: Integrand, simplex: Simplex, tol: Optional[float] = None) -> QuadratureResult:
        """
        Integrate a form over one oriented simplex.

        Args:
            integrand: Form, or SceneForm (the piece on the simplex chart is used)
            simplex: oriented simplex
            tol: absolute tolerance; defaults to settings.quadrature_tol

        Returns:
            QuadratureResult carrying the simplex orientation sign

        Raises:
            ChartMismatchError: If the form cannot be expressed on the simplex chart
            QuadratureError: If the cell budget runs out
            PoleError: If the form has a pole on the simplex
        """
        tol = self.settings.quadrature_tol if tol is None else tol
        return self.quadrature.integrate_form(self._form_on(integrand, simplex.chart_id), simplex, tol)

    def integrate_over_chain(self, integrand: Integrand, chain: Chain, tol: Optional[float] = None) -> QuadratureResult:
        """
        Sum of weight * integral over the chain's simplices.

        The summation order is the chain order regardless of the worker count, so the
        result is reproducible.
        """
        items = list(chain.simplices())
        if not items:
            return QuadratureResult.zero()

        def one(item):
            simplex, weight = item
            return self.integrate_over_simplex(integrand, simplex, tol).scaled(weight)

        if self.settings.workers > 1 and len(items) > 1:
            with ThreadPoolExecutor(max_workers=self.settings.workers) as pool:
                parts: List[QuadratureResult] = list(pool.map(one, items))
        else:
            parts = [one(item) for item in items]
        total = QuadratureResult.zero()
        for part in parts:
            total = total + part
        logger.debug("[MESH] chain simplices=%d value=%s error=%.3e", len(items), total.value, total.error)
        return total

    def boundary(self, chain: Chain) -> Chain:
        return boundary(chain)

    def stokes_check(self, form: Form, chain: Chain, tol: Optional[float] = None) -> StokesReport:
        """
        Compare the integral of d(form) over a chain with the integral of form over its boundary.
        """
        tol = self.settings.acceptance_tol if tol is None else tol
        interior = self.integrate_over_chain(exterior_derivative(form), chain)
        edge = self.integrate_over_chain(form, boundary(chain))
        difference = abs(interior.value - edge.value)
        logger.info("[STOKES] simplices=%d difference=%.3e", len(chain), difference)
        return StokesReport(
            interior=[interior.value.real, interior.value.imag],
            boundary=[edge.value.real, edge.value.imag],
            difference=difference,
            passed=difference < tol,
        )

    def integrate_fundamental_class(self, integrand: Integrand, triangulation: Triangulation, tol: Optional[float] = None) -> QuadratureResult:
        """
        Integral of a top-degree form over [X].

        Raises:
            NonCompactSceneError: If the triangulation has unmatched faces
            NonCoherentTriangulationError: If it is not coherently oriented
        """
        triangulation.check_compact()
        return self.integrate_over_chain(integrand, triangulation.chain(), tol)

    def refine(self, triangulation: Triangulation) -> Triangulation:
        return triangulation.refine()

    def is_closed(self, chain: Chain) -> bool:
        return boundary(chain).is_empty()
