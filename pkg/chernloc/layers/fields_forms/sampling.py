"""
Random fields and forms for property suites, drawn from a seeded numpy Generator.
Coefficients are exact small Gaussian rationals so symbolic identities stay exact.
"""

from itertools import combinations
from typing import List

import numpy as np
import sympy as sp

from chernloc.layers.fields_forms.form import Form, TangentVector, dz_label, dzbar_label, evaluate
from chernloc.layers.fields_forms.scalar_field import z, zbar
from chernloc.utils.errors import PoleError


def random_rational(rng: np.random.Generator) -> sp.Expr:
    re_part = sp.Rational(int(rng.integers(-4, 5)), 4)
    im_part = sp.Rational(int(rng.integers(-4, 5)), 4)
    return re_part + sp.I * im_part


def random_polynomial(rng: np.random.Generator, dimension: int, max_degree: int = 2, terms: int = 3) -> sp.Expr:
    """Polynomial in z_i, zbar_i with `terms` random monomials of total degree <= max_degree."""
    value = sp.S.Zero
    for _ in range(terms):
        monomial = random_rational(rng)
        budget = int(rng.integers(0, max_degree + 1))
        for _ in range(budget):
            i = int(rng.integers(1, dimension + 1))
            monomial *= z(i) if rng.random() < 0.5 else zbar(i)
        value += monomial
    return sp.expand(value)


def all_bases(dimension: int, degree: int) -> List[tuple]:
    labels = [dz_label(i) for i in range(1, dimension + 1)] + [dzbar_label(i) for i in range(1, dimension + 1)]
    return list(combinations(labels, degree))


def random_polynomial_form(
    rng: np.random.Generator, chart_id: str, dimension: int, degree: int, max_degree: int = 2
) -> Form:
    """Random form whose every basis element gets a random polynomial coefficient."""
    terms = [(basis, random_polynomial(rng, dimension, max_degree)) for basis in all_bases(dimension, degree)]
    return Form.from_terms(chart_id, dimension, degree, terms)


def random_points(rng: np.random.Generator, count: int, dimension: int, radius: float = 1.0) -> np.ndarray:
    """Complex points with coordinates uniform in the square [-radius, radius]^2."""
    real = rng.uniform(-radius, radius, size=(count, dimension))
    imag = rng.uniform(-radius, radius, size=(count, dimension))
    return real + 1j * imag


def sampled_values(form: Form, points: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """form(v_1, ..., v_k) at the points for random real tangent vectors; points at a pole are skipped."""
    points = np.atleast_2d(np.asarray(points, dtype=complex))
    vectors = [
        TangentVector.real(rng.normal(size=points.shape) + 1j * rng.normal(size=points.shape)) for _ in range(form.degree)
    ]
    try:
        values = evaluate(form, points, vectors)
    except PoleError:
        kept = []
        for row, p in enumerate(points):
            one = [TangentVector.real(v.holo[row : row + 1]) for v in vectors]
            try:
                kept.append(evaluate(form, p.reshape(1, -1), one)[0])
            except PoleError:
                continue
        values = np.asarray(kept, dtype=complex)
    return values


def sampled_norm(form: Form, points: np.ndarray, rng: np.random.Generator) -> float:
    """Largest |form(v_1, ..., v_k)| over the points, with random real tangent vectors."""
    if form.is_zero():
        return 0.0
    values = sampled_values(form, points, rng)
    return float(np.max(np.abs(values))) if len(values) else 0.0
