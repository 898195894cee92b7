"""
Form Matrices
=============
Square matrices of forms on one chart: connection matrices (1-forms), curvature
matrices (2-forms) and field matrices (0-forms).

- Products are matrix products with the wedge as multiplication
- Field matrices (sympy Matrix) act from either side by coefficient scaling
"""

from dataclasses import dataclass
from itertools import permutations
from typing import Callable, Sequence, Tuple

import numpy as np
import sympy as sp

from chernloc.layers.fields_forms.form import Form, TangentVector, evaluate, exterior_derivative, wedge
from chernloc.layers.mesh.simplices import permutation_sign
from chernloc.utils.errors import DimensionMismatchError


def simplify_entry(value) -> sp.Expr:
    """Cancel rational-function entries; leave other expressions as they are."""
    value = sp.sympify(value)
    if value.is_Number:
        return value
    if value.is_rational_function():
        return sp.cancel(value)
    return value


@dataclass(frozen=True)
class FormMatrix:
    """
    Square matrix of equal-degree forms on one chart.

    Attributes:
        chart_id: chart of every entry
        dimension: complex dimension of the chart
        degree: common degree of the entries
        entries: rows of forms
    """

    chart_id: str
    dimension: int
    degree: int
    entries: Tuple[Tuple[Form, ...], ...]

    def __post_init__(self):
        size = len(self.entries)
        for row in self.entries:
            if len(row) != size:
                raise DimensionMismatchError("form matrices must be square")
            for entry in row:
                if entry.degree != self.degree or entry.chart_id != self.chart_id:
                    raise DimensionMismatchError(
                        f"entry of degree {entry.degree} on {entry.chart_id!r} in a degree-{self.degree} matrix on {self.chart_id!r}"
                    )

    # -- constructors -----------------------------------------------------------

    @classmethod
    def from_forms(cls, rows: Sequence[Sequence[Form]], chart_id: str, dimension: int, degree: int) -> "FormMatrix":
        return cls(chart_id, dimension, degree, tuple(tuple(row) for row in rows))

    @classmethod
    def zeros(cls, chart_id: str, dimension: int, size: int, degree: int) -> "FormMatrix":
        zero = Form.zero(chart_id, dimension, degree)
        return cls(chart_id, dimension, degree, tuple(tuple(zero for _ in range(size)) for _ in range(size)))

    @classmethod
    def from_fields(cls, chart_id: str, dimension: int, matrix: sp.Matrix) -> "FormMatrix":
        rows = tuple(
            tuple(Form.scalar(chart_id, dimension, matrix[i, j]) for j in range(matrix.cols)) for i in range(matrix.rows)
        )
        return cls(chart_id, dimension, 0, rows)

    @classmethod
    def identity(cls, chart_id: str, dimension: int, size: int) -> "FormMatrix":
        return cls.from_fields(chart_id, dimension, sp.eye(size))

    # -- algebra ----------------------------------------------------------------

    @property
    def size(self) -> int:
        return len(self.entries)

    def __getitem__(self, index: Tuple[int, int]) -> Form:
        i, j = index
        return self.entries[i][j]

    def _check(self, other: "FormMatrix") -> None:
        if other.chart_id != self.chart_id or other.size != self.size:
            raise DimensionMismatchError(
                f"form matrices of size {self.size} on {self.chart_id!r} and {other.size} on {other.chart_id!r}"
            )

    def map(self, fn: Callable[[Form], Form]) -> "FormMatrix":
        """Apply fn entrywise; the result lives where fn puts the entries (pullback may change chart)."""
        rows = tuple(tuple(fn(entry) for entry in row) for row in self.entries)
        if not rows:
            return self
        first = rows[0][0]
        return FormMatrix(first.chart_id, first.dimension, first.degree, rows)

    def __add__(self, other: "FormMatrix") -> "FormMatrix":
        self._check(other)
        rows = tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries))
        return FormMatrix(self.chart_id, self.dimension, self.degree, rows)

    def __neg__(self) -> "FormMatrix":
        return self.map(lambda entry: -entry)

    def __sub__(self, other: "FormMatrix") -> "FormMatrix":
        return self + (-other)

    def scale(self, value) -> "FormMatrix":
        return self.map(lambda entry: entry.scale(value))

    def wedge(self, other: "FormMatrix") -> "FormMatrix":
        """(A ^ B)_ij = sum_k A_ik ^ B_kj."""
        self._check(other)
        degree = self.degree + other.degree
        rows = []
        for i in range(self.size):
            row = []
            for j in range(self.size):
                total = Form.zero(self.chart_id, self.dimension, degree)
                for k in range(self.size):
                    total = total + wedge(self.entries[i][k], other.entries[k][j])
                row.append(total)
            rows.append(tuple(row))
        return FormMatrix(self.chart_id, self.dimension, degree, tuple(rows))

    def left_fields(self, matrix: sp.Matrix) -> "FormMatrix":
        """M . A for a field matrix M."""
        return self._field_product(matrix, left=True)

    def right_fields(self, matrix: sp.Matrix) -> "FormMatrix":
        """A . M for a field matrix M."""
        return self._field_product(matrix, left=False)

    def _field_product(self, matrix: sp.Matrix, left: bool) -> "FormMatrix":
        rows = []
        for i in range(self.size):
            row = []
            for j in range(self.size):
                total = Form.zero(self.chart_id, self.dimension, self.degree)
                for k in range(self.size):
                    if left:
                        factor, entry = matrix[i, k], self.entries[k][j]
                    else:
                        factor, entry = matrix[k, j], self.entries[i][k]
                    if factor != 0:
                        total = total + entry.scale(factor)
                row.append(total)
            rows.append(tuple(row))
        return FormMatrix(self.chart_id, self.dimension, self.degree, tuple(rows))

    def d(self) -> "FormMatrix":
        return self.map(exterior_derivative)

    def trace(self) -> Form:
        total = Form.zero(self.chart_id, self.dimension, self.degree)
        for i in range(self.size):
            total = total + self.entries[i][i]
        return total

    def is_zero(self) -> bool:
        return all(entry.is_zero() for row in self.entries for entry in row)

    def block(self, indices: Sequence[int]) -> "FormMatrix":
        rows = tuple(tuple(self.entries[i][j] for j in indices) for i in indices)
        return FormMatrix(self.chart_id, self.dimension, self.degree, rows)

    # -- numerics ---------------------------------------------------------------

    def evaluate(self, points: np.ndarray, vectors: Sequence[TangentVector], varsigma: float = 0.0) -> np.ndarray:
        """Entry values, shape (N, size, size)."""
        points = np.atleast_2d(np.asarray(points, dtype=complex))
        out = np.zeros((points.shape[0], self.size, self.size), dtype=complex)
        for i in range(self.size):
            for j in range(self.size):
                if not self.entries[i][j].is_zero():
                    out[:, i, j] = evaluate(self.entries[i][j], points, vectors, varsigma)
        return out

    def __str__(self) -> str:
        return "[" + "; ".join(", ".join(str(entry) for entry in row) for row in self.entries) + "]"


def field_inverse(matrix: sp.Matrix) -> sp.Matrix:
    """Inverse of a field matrix with rational-function entries cancelled."""
    if matrix.shape == (1, 1):
        return sp.Matrix([[simplify_entry(1 / matrix[0, 0])]])
    return matrix.inv().applyfunc(simplify_entry)


def gauge_transform(theta: FormMatrix, g: sp.Matrix) -> FormMatrix:
    """
    Connection matrix in the frame e . g: g^-1 theta g + g^-1 dg, with g given on theta's chart.
    """
    inverse = field_inverse(g)
    dg = FormMatrix.from_fields(theta.chart_id, theta.dimension, g).d()
    return theta.right_fields(g).left_fields(inverse) + dg.left_fields(inverse)


def wedge_determinant(matrix: FormMatrix) -> Form:
    """Leibniz determinant of a matrix of even-degree forms (entries commute)."""
    size = matrix.size
    total = Form.zero(matrix.chart_id, matrix.dimension, matrix.degree * size)
    for perm in permutations(range(size)):
        product = None
        for column, row in enumerate(perm):
            entry = matrix[row, column]
            product = entry if product is None else wedge(product, entry)
            if product.is_zero():
                break
        if product is not None and not product.is_zero():
            total = total + product.scale(permutation_sign(perm))
    return total
