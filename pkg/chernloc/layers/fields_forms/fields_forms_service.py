"""
Fields & Forms Service
======================
Entry point of the exterior-calculus layer:
- Parsing fields and forms from the scene grammar
- wedge, exterior derivative, pullback and evaluation
- Finite-difference cross-checks of the symbolic Wirtinger derivatives

Everything here is pure; the service only carries parsing parameters and the
finite-difference step.
"""

import logging
from typing import Mapping, Optional, Sequence

import numpy as np
import sympy as sp

from chernloc.layers.fields_forms.form import (
    ChartMap,
    Form,
    TangentVector,
    evaluate,
    exterior_derivative,
    field_differential,
    parse_form,
    pullback,
    wedge,
)
from chernloc.layers.fields_forms.scalar_field import (
    conj,
    evaluate_field,
    is_holomorphic,
    parse_field,
    partial,
)

logger = logging.getLogger(__name__)


class FieldsFormsService:
    """
    Service class for symbolic fields and exterior forms.
    """

    def __init__(self, params: Optional[Mapping[str, object]] = None, fd_step: float = 1e-5):
        """
        Initialize the service.

        Args:
            params: Scene parameters available to the expression grammar (e.g. {"d": 3})
            fd_step: Step of the central finite differences used by the derivative check
        """
        self.params = dict(params or {})
        self.fd_step = fd_step

    # -- parsing ------------------------------------------------------------

    def parse_field(self, text: str, dimension: int) -> sp.Expr:
        return parse_field(text, dimension, self.params)

    def parse_form(self, text: str, chart_id: str, dimension: int) -> Form:
        return parse_form(text, chart_id, dimension, self.params)

    # -- algebra --------------------------------------------------------------

    def wedge(self, a: Form, b: Form) -> Form:
        return wedge(a, b)

    def exterior_derivative(self, a: Form) -> Form:
        return exterior_derivative(a)

    def pullback(self, m: ChartMap, a: Form) -> Form:
        return pullback(m, a)

    def evaluate(self, a: Form, points, vectors: Sequence[TangentVector]) -> np.ndarray:
        return evaluate(a, points, vectors)

    def field_derivative(self, value, i: int, anti: bool = False) -> sp.Expr:
        return partial(value, i, anti)

    def differential(self, value, chart_id: str, dimension: int) -> Form:
        return field_differential(value, chart_id, dimension)

    def is_holomorphic(self, value, dimension: int) -> bool:
        return is_holomorphic(value, dimension)

    def conj(self, value) -> sp.Expr:
        return conj(value)

    # -- checks ---------------------------------------------------------------

    def derivative_residual(self, value, points: np.ndarray) -> float:
        """
        Largest relative gap between the symbolic Wirtinger derivatives of a field and
        central finite differences, over the given points.

        Args:
            value: scalar field
            points: complex array (N, n) of non-pole points

        Returns:
            max over points and coordinates of |symbolic - numeric| / max(1, |symbolic|)
        """
        points = np.atleast_2d(np.asarray(points, dtype=complex))
        n = points.shape[1]
        h = self.fd_step
        worst = 0.0
        for i in range(1, n + 1):
            e = np.zeros(n, dtype=complex)
            e[i - 1] = 1.0
            dx = (evaluate_field(value, points + h * e) - evaluate_field(value, points - h * e)) / (2 * h)
            dy = (evaluate_field(value, points + 1j * h * e) - evaluate_field(value, points - 1j * h * e)) / (2 * h)
            numeric_z = 0.5 * (dx - 1j * dy)
            numeric_zbar = 0.5 * (dx + 1j * dy)
            symbolic_z = evaluate_field(partial(value, i), points)
            symbolic_zbar = evaluate_field(partial(value, i, anti=True), points)
            for symbolic, numeric in ((symbolic_z, numeric_z), (symbolic_zbar, numeric_zbar)):
                gap = np.abs(symbolic - numeric) / np.maximum(1.0, np.abs(symbolic))
                worst = max(worst, float(gap.max()))
        logger.debug("[FIELDS] derivative_residual points=%d worst=%.3e", points.shape[0], worst)
        return worst
