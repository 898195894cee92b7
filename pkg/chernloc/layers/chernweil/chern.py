"""
Chern and Bott Forms
====================
Chern forms of connections and Bott difference forms of connection pairs.

- c^q(nabla) is the degree-2q part of det(I + (i/2pi) K): (i/2pi)^q times the sum of the
  principal q x q minors of K (Leibniz expansion; even forms commute)
- The family connection (1 - varsigma) theta0 + varsigma theta1 lives on chart x [0, 1];
  its Chern form is dvarsigma ^ alpha + beta and bott(nabla0, nabla1) = int_0^1 alpha dvarsigma,
  so that d bott = c(nabla1) - c(nabla0)
- The fibre integral is taken coefficient-wise from the polynomial moments in varsigma,
  exactly (1/(k+1)) or by Gauss-Legendre on [0, 1]
"""

import logging
from functools import lru_cache
from itertools import combinations
from typing import Dict, Optional, Tuple

import numpy as np
import sympy as sp

from chernloc.layers.bundles.bundle import ConnectionData, curvature_matrix, family_connection
from chernloc.layers.bundles.form_matrix import FormMatrix, wedge_determinant
from chernloc.layers.fields_forms.form import SIGMA, Form, SceneForm
from chernloc.layers.fields_forms.scalar_field import VARSIGMA
from chernloc.utils.errors import ChartMismatchError, DimensionMismatchError

logger = logging.getLogger(__name__)

FIBRE_RULES = ("exact", "gauss")


def chern_normalization(q: int) -> sp.Expr:
    return (sp.I / (2 * sp.pi)) ** q


def fits(dimension: int, degree: int) -> bool:
    """Whether a form of this degree can be nonzero on chart x [0, 1]."""
    return degree <= 2 * dimension + 1


def chern_polynomial(K: FormMatrix, q: int) -> Form:
    """
    (i/2pi)^q sigma_q(K) for a curvature matrix K.

    Zero when 2q exceeds the degrees the chart carries or q exceeds the rank.
    """
    if q == 0:
        return Form.scalar(K.chart_id, K.dimension, 1)
    total = Form.zero(K.chart_id, K.dimension, 2 * q)
    if q > K.size or not fits(K.dimension, 2 * q):
        return total
    for rows in combinations(range(K.size), q):
        total = total + wedge_determinant(K.block(rows))
    return total.scale(chern_normalization(q))


@lru_cache(maxsize=None)
def _gauss_moments(order: int, count: int) -> Tuple[float, ...]:
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes = 0.5 * (nodes + 1.0)
    weights = 0.5 * weights
    return tuple(float(np.sum(weights * nodes ** k)) for k in range(count))


def _moment_integral(coeff: sp.Expr, rule: str, order: int) -> sp.Expr:
    if VARSIGMA not in coeff.free_symbols:
        return coeff
    poly = sp.Poly(coeff, VARSIGMA)
    terms = poly.terms()
    top = max(k for (k,), _ in terms)
    if rule == "exact":
        moments = [sp.Rational(1, k + 1) for k in range(top + 1)]
    else:
        if top >= 2 * order:
            raise DimensionMismatchError(f"Gauss order {order} cannot integrate varsigma^{top} exactly")
        moments = [sp.Float(m, 17) for m in _gauss_moments(order, top + 1)]
    return sp.Add(*[value * moments[k] for (k,), value in terms])


def fibre_integrate(form: Form, rule: str = "gauss", order: int = 16) -> Form:
    """
    int_0^1 alpha dvarsigma for form = dvarsigma ^ alpha + beta.

    Args:
        form: form on chart x [0, 1] with coefficients polynomial in varsigma
        rule: 'exact' (rational moments) or 'gauss' (Gauss-Legendre moments)
        order: Gauss-Legendre order

    Returns:
        Form of one degree less, free of varsigma

    Raises:
        ValueError: On an unknown rule
    """
    if rule not in FIBRE_RULES:
        raise ValueError(f"unknown fibre rule {rule!r}; expected one of {FIBRE_RULES}")
    terms = []
    for basis, coeff in form.terms:
        # SIGMA sorts first, so the dvarsigma part of a basis is always its leading label
        if not basis or basis[0] != SIGMA:
            continue
        terms.append((basis[1:], _moment_integral(coeff, rule, order)))
    return Form.from_terms(form.chart_id, form.dimension, form.degree - 1, terms)


def _reachable(connection: ConnectionData, chart_id: str) -> Optional[FormMatrix]:
    try:
        return connection.on(chart_id)
    except ChartMismatchError:
        return None


def chern_form(connection: ConnectionData, q: int) -> SceneForm:
    """
    c^q(nabla) on every chart the connection reaches; the zero form above the top
    degree of a chart.
    """
    if q < 0:
        raise ValueError(f"Chern degree must be non-negative (got {q})")
    pieces: Dict[str, Form] = {}
    for chart in connection.bundle.atlas.charts:
        theta = _reachable(connection, chart.id)
        if theta is None:
            continue
        pieces[chart.id] = chern_polynomial(curvature_matrix(theta), q)
    return SceneForm.from_mapping(2 * q, pieces)


def bott_difference(c0: ConnectionData, c1: ConnectionData, q: int, rule: str = "gauss", order: int = 16) -> SceneForm:
    """
    bott^q(nabla0, nabla1) on every chart both connections reach.

    Raises:
        ValueError: If q < 1
    """
    if q < 1:
        raise ValueError(f"Bott difference forms exist for q >= 1 (got {q})")
    pieces: Dict[str, Form] = {}
    for chart in c0.bundle.atlas.charts:
        if _reachable(c0, chart.id) is None or _reachable(c1, chart.id) is None:
            continue
        if not fits(chart.dimension, 2 * q):
            pieces[chart.id] = Form.zero(chart.id, chart.dimension, 2 * q - 1)
            continue
        family = family_connection(c0, c1, chart.id)
        total = chern_polynomial(curvature_matrix(family), q)
        pieces[chart.id] = fibre_integrate(total, rule, order)
        logger.debug("[CHERN] bott q=%d chart=%s terms=%d", q, chart.id, len(pieces[chart.id].terms))
    return SceneForm.from_mapping(2 * q - 1, pieces)
