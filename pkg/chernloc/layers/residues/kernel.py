"""
Bochner-Martinelli Kernel
=========================
The kernel beta_m on C^m minus the origin and indices of maps into C^m.

- beta_m = ((m-1)! / (2 pi i)^m) ((-1)^{m(m-1)/2} / |z|^{2m}) sum_h conj(Theta_h) ^ Theta,
  Theta = dz_1 ^ ... ^ dz_m, Theta_h = (-1)^h z_h dz_1 ^ ... (dz_h omitted) ... ^ dz_m
- With this sign the integral of beta_m over an outward sphere around 0 is -1; the index
  integrates over the sphere as the boundary of the regular cell, which reverses it
"""

import logging
from math import factorial
from typing import Sequence

import sympy as sp

from chernloc.layers.fields_forms.form import ChartMap, Form, dz_label, dzbar_label, pullback, wedge
from chernloc.layers.fields_forms.scalar_field import z, zbar

logger = logging.getLogger(__name__)

KERNEL_CHART = "C^m"
# Distance from the nearest integer tolerated in an index
INDEX_RESIDUAL = 1e-3


def bochner_martinelli_kernel(m: int, chart_id: str = KERNEL_CHART) -> Form:
    """
    The (2m-1)-form beta_m on C^m.

    Raises:
        ValueError: If m < 1
    """
    if m < 1:
        raise ValueError(f"the Bochner-Martinelli kernel needs m >= 1 (got {m})")
    theta = Form.from_terms(chart_id, m, m, [(tuple(dz_label(i) for i in range(1, m + 1)), 1)])
    total = Form.zero(chart_id, m, 2 * m - 1)
    for h in range(1, m + 1):
        basis = tuple(dzbar_label(i) for i in range(1, m + 1) if i != h)
        conj_theta_h = Form.from_terms(chart_id, m, m - 1, [(basis, (-1) ** h * zbar(h))])
        total = total + wedge(conj_theta_h, theta)
    norm_squared = sp.Add(*[z(i) * zbar(i) for i in range(1, m + 1)])
    scale = sp.Integer(factorial(m - 1)) / (2 * sp.pi * sp.I) ** m * (-1) ** (m * (m - 1) // 2) / norm_squared ** m
    return total.scale(scale)


def pulled_kernel(components: Sequence[sp.Expr], chart_id: str, dimension: int) -> Form:
    """f^* beta_m for a map f given by m component fields on a chart."""
    m = len(components)
    f = ChartMap(chart_id, KERNEL_CHART, dimension, tuple(sp.sympify(c) for c in components))
    return pullback(f, bochner_martinelli_kernel(m))
