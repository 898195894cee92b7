"""
Differential Forms
==================
Graded exterior forms on a chart with sympy coefficients.

- A basis covector is a label (kind, index): (0, 0) = dvarsigma, (1, i) = dz_i, (2, i) = dzbar_i
- A term is (sorted label tuple, coefficient); terms are normalized eagerly
  (sorted labels, merged duplicates, structurally-zero coefficients dropped)
- Polynomial coefficients are expanded; everything else is kept as parsed
- Evaluation on tangent vectors is the determinant of the covector/vector pairing matrix
"""

import re
from dataclasses import dataclass, field
from functools import reduce
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import sympy as sp
from sympy.parsing.sympy_parser import parse_expr

from chernloc.layers.fields_forms.scalar_field import (
    VARSIGMA,
    TRANSFORMATIONS,
    grammar_namespace,
    chart_symbols,
    conj,
    evaluate_field,
    z,
    zbar,
)
from chernloc.utils.errors import (
    ChartMismatchError,
    DimensionMismatchError,
    ExpressionParseError,
)

Label = Tuple[int, int]
Basis = Tuple[Label, ...]
Term = Tuple[Basis, sp.Expr]

SIGMA: Label = (0, 0)


def dz_label(i: int) -> Label:
    return (1, i)


def dzbar_label(i: int) -> Label:
    return (2, i)


def label_name(label: Label) -> str:
    kind, index = label
    if kind == 0:
        return "dvarsigma"
    return f"dz{index}" if kind == 1 else f"dzbar{index}"


def label_symbol(label: Label) -> sp.Symbol:
    """The coordinate a basis covector differentiates."""
    kind, index = label
    if kind == 0:
        return VARSIGMA
    return z(index) if kind == 1 else zbar(index)


def _sort_with_sign(labels: Sequence[Label]) -> Tuple[int, Basis]:
    """Sort labels, returning the permutation parity; repeated labels give sign 0."""
    if len(set(labels)) != len(labels):
        return 0, ()
    inversions = sum(1 for a in range(len(labels)) for b in range(a + 1, len(labels)) if labels[a] > labels[b])
    return (-1 if inversions % 2 else 1), tuple(sorted(labels))


def normalize_coefficient(coeff) -> sp.Expr:
    coeff = sp.sympify(coeff)
    if coeff.is_Number:
        return coeff
    if coeff.is_polynomial():
        return sp.expand(coeff)
    return coeff


def _normalize(terms: Iterable[Term]) -> Tuple[Term, ...]:
    merged: Dict[Basis, sp.Expr] = {}
    for basis, coeff in terms:
        merged[basis] = merged.get(basis, sp.S.Zero) + sp.sympify(coeff)
    out = []
    for basis in sorted(merged):
        coeff = normalize_coefficient(merged[basis])
        if coeff == 0:
            continue
        out.append((basis, coeff))
    return tuple(out)


@dataclass(frozen=True)
class Form:
    """
    Exterior form of fixed degree on one chart.

    Attributes:
        chart_id: chart the coefficients live on
        dimension: complex dimension n of the chart
        degree: form degree
        terms: normalized (basis, coefficient) pairs
    """

    chart_id: str
    dimension: int
    degree: int
    terms: Tuple[Term, ...] = field(default=())

    def __post_init__(self):
        # Above the top degree 2n+1 only the zero form exists
        if self.degree < 0 or (self.degree > self.top_degree and self.terms):
            raise DimensionMismatchError(f"degree {self.degree} out of range for dimension {self.dimension}")
        for basis, _ in self.terms:
            if len(basis) != self.degree:
                raise DimensionMismatchError(f"term {basis} does not have degree {self.degree}")

    @property
    def top_degree(self) -> int:
        """2n chart directions plus the fibre direction dvarsigma."""
        return 2 * self.dimension + 1

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_terms(cls, chart_id: str, dimension: int, degree: int, terms: Iterable[Tuple[Sequence[Label], object]]) -> "Form":
        """Build a form from possibly unsorted, repeated label lists."""
        prepared = []
        for labels, coeff in terms:
            sign, basis = _sort_with_sign(tuple(labels))
            if sign == 0:
                continue
            prepared.append((basis, sign * sp.sympify(coeff)))
        return cls(chart_id, dimension, degree, _normalize(prepared))

    @classmethod
    def zero(cls, chart_id: str, dimension: int, degree: int) -> "Form":
        return cls(chart_id, dimension, degree, ())

    @classmethod
    def scalar(cls, chart_id: str, dimension: int, value) -> "Form":
        return cls(chart_id, dimension, 0, _normalize([((), value)]))

    @classmethod
    def covector(cls, chart_id: str, dimension: int, label: Label, coeff=1) -> "Form":
        return cls(chart_id, dimension, 1, _normalize([((label,), coeff)]))

    # -- algebra ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, labels: Sequence[Label]) -> sp.Expr:
        sign, basis = _sort_with_sign(tuple(labels))
        for b, coeff in self.terms:
            if b == basis:
                return sign * coeff
        return sp.S.Zero

    def as_scalar(self) -> sp.Expr:
        if self.degree != 0:
            raise DimensionMismatchError(f"form of degree {self.degree} is not a scalar field")
        return self.terms[0][1] if self.terms else sp.S.Zero

    def _check_compatible(self, other: "Form") -> None:
        if self.chart_id != other.chart_id:
            raise ChartMismatchError(f"forms live on charts {self.chart_id!r} and {other.chart_id!r}")
        if self.dimension != other.dimension:
            raise DimensionMismatchError(f"chart dimensions {self.dimension} and {other.dimension} differ")

    def __add__(self, other: "Form") -> "Form":
        self._check_compatible(other)
        if self.degree != other.degree:
            raise DimensionMismatchError(f"cannot add forms of degree {self.degree} and {other.degree}")
        return Form(self.chart_id, self.dimension, self.degree, _normalize(self.terms + other.terms))

    def __neg__(self) -> "Form":
        return Form(self.chart_id, self.dimension, self.degree, tuple((b, -c) for b, c in self.terms))

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def scale(self, value) -> "Form":
        """Multiply every coefficient by a scalar field."""
        value = sp.sympify(value)
        if value == 0:
            return Form.zero(self.chart_id, self.dimension, self.degree)
        return Form(self.chart_id, self.dimension, self.degree, _normalize((b, value * c) for b, c in self.terms))

    def map_coefficients(self, fn) -> "Form":
        return Form(self.chart_id, self.dimension, self.degree, _normalize((b, fn(c)) for b, c in self.terms))

    def free_symbols(self) -> set:
        out = set()
        for _, coeff in self.terms:
            out |= coeff.free_symbols
        return out

    def has_sigma(self) -> bool:
        return any(SIGMA in basis for basis, _ in self.terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for basis, coeff in self.terms:
            if not basis:
                parts.append(f"({sp.sstr(coeff)})")
            else:
                parts.append(f"({sp.sstr(coeff)})*" + "^".join(label_name(l) for l in basis))
        return " + ".join(parts)


def wedge(a: Form, b: Form) -> Form:
    """
    Exterior product a ^ b.

    Raises:
        ChartMismatchError: If the forms live on different charts
    """
    a._check_compatible(b)
    out = []
    for basis_a, coeff_a in a.terms:
        for basis_b, coeff_b in b.terms:
            sign, basis = _sort_with_sign(basis_a + basis_b)
            if sign == 0:
                continue
            out.append((basis, sign * coeff_a * coeff_b))
    return Form(a.chart_id, a.dimension, a.degree + b.degree, _normalize(out))


def wedge_all(forms: Sequence[Form]) -> Form:
    return reduce(wedge, forms)


def _differentials(dimension: int) -> List[Tuple[sp.Symbol, Label]]:
    pairs = [(z(i), dz_label(i)) for i in range(1, dimension + 1)]
    pairs += [(zbar(i), dzbar_label(i)) for i in range(1, dimension + 1)]
    pairs.append((VARSIGMA, SIGMA))
    return pairs


def field_differential(value, chart_id: str, dimension: int) -> Form:
    """df = sum df/dz_i dz_i + df/dzbar_i dzbar_i (+ df/dvarsigma dvarsigma)."""
    value = sp.sympify(value)
    terms = []
    symbols = value.free_symbols
    for symbol, label in _differentials(dimension):
        if symbol in symbols:
            terms.append(((label,), sp.diff(value, symbol)))
    return Form(chart_id, dimension, 1, _normalize(terms))


def exterior_derivative(a: Form) -> Form:
    """Exterior derivative, including the fibre direction dvarsigma."""
    out = []
    for basis, coeff in a.terms:
        symbols = coeff.free_symbols
        for symbol, label in _differentials(a.dimension):
            if symbol not in symbols:
                continue
            sign, new_basis = _sort_with_sign((label,) + basis)
            if sign == 0:
                continue
            out.append((new_basis, sign * sp.diff(coeff, symbol)))
    return Form(a.chart_id, a.dimension, a.degree + 1, _normalize(out))


# ---------------------------------------------------------------------------
# Chart maps and pullback
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChartMap:
    """
    Map from a source chart to a target chart: target z_i = components[i-1](source z, zbar).
    """

    source: str
    target: str
    source_dimension: int
    components: Tuple[sp.Expr, ...]

    @property
    def target_dimension(self) -> int:
        return len(self.components)

    def substitution(self) -> Dict[sp.Symbol, sp.Expr]:
        mapping: Dict[sp.Symbol, sp.Expr] = {}
        for i, comp in enumerate(self.components, start=1):
            mapping[z(i)] = comp
            mapping[zbar(i)] = conj(comp)
        return mapping

    def pull_field(self, value) -> sp.Expr:
        """Coordinate substitution f -> f o m (simultaneous)."""
        value = sp.sympify(value)
        return value.xreplace(self.substitution())

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Numeric image of source points, shape (N, target_dimension)."""
        points = np.atleast_2d(np.asarray(points, dtype=complex))
        columns = [evaluate_field(c, points, what=f"map {self.source}->{self.target}") for c in self.components]
        return np.stack(columns, axis=1)

    def is_holomorphic(self) -> bool:
        return all(
            sp.diff(c, zbar(i)) == 0 for c in self.components for i in range(1, self.source_dimension + 1)
        )


def identity_map(chart_id: str, dimension: int) -> ChartMap:
    return ChartMap(chart_id, chart_id, dimension, tuple(z(i) for i in range(1, dimension + 1)))


def compose(outer: ChartMap, inner: ChartMap) -> ChartMap:
    """outer o inner: inner maps A -> B, outer maps B -> C."""
    if inner.target != outer.source or inner.target_dimension != outer.source_dimension:
        raise ChartMismatchError(f"cannot compose {inner.source}->{inner.target} with {outer.source}->{outer.target}")
    components = tuple(inner.pull_field(c) for c in outer.components)
    return ChartMap(inner.source, outer.target, inner.source_dimension, components)


def pullback(m: ChartMap, a: Form) -> Form:
    """
    Pull a form on m.target back to m.source.

    Raises:
        ChartMismatchError: If the form does not live on the map's target
        DimensionMismatchError: If the map and the chart disagree on dimension
    """
    if a.chart_id != m.target:
        raise ChartMismatchError(f"form on {a.chart_id!r} cannot be pulled back through a map into {m.target!r}")
    if a.dimension != m.target_dimension:
        raise DimensionMismatchError(f"map has {m.target_dimension} components, form chart has dimension {a.dimension}")
    substitution = m.substitution()
    covectors: Dict[Label, Form] = {SIGMA: Form.covector(m.source, m.source_dimension, SIGMA)}
    for i, comp in enumerate(m.components, start=1):
        covectors[dz_label(i)] = field_differential(comp, m.source, m.source_dimension)
        covectors[dzbar_label(i)] = field_differential(conj(comp), m.source, m.source_dimension)
    result = Form.zero(m.source, m.source_dimension, a.degree)
    for basis, coeff in a.terms:
        piece = Form.scalar(m.source, m.source_dimension, coeff.xreplace(substitution))
        for label in basis:
            piece = wedge(piece, covectors[label])
        result = result + piece
    return result


def restrict_to_coordinates(a: Form, target_chart: str, fixed: Mapping[int, object], keep: Sequence[int]) -> Form:
    """
    Restrict a form to a coordinate slice: coordinates in `fixed` are frozen at the given
    values, coordinates in `keep` become z1..zk of the slice chart `target_chart`.
    """
    components = []
    for i in range(1, a.dimension + 1):
        if i in fixed:
            components.append(sp.sympify(fixed[i]))
        else:
            components.append(z(list(keep).index(i) + 1))
    inclusion = ChartMap(target_chart, a.chart_id, len(keep), tuple(components))
    return pullback(inclusion, a)


# ---------------------------------------------------------------------------
# Numeric evaluation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TangentVector:
    """
    Tangent vector of the (complexified) real tangent space, as its pairings with
    dz_i (holo), dzbar_i (anti) and dvarsigma (param). Arrays may carry a leading
    sample axis of length N.
    """

    holo: np.ndarray
    anti: np.ndarray
    param: object = 0.0

    @classmethod
    def real(cls, holo, param=0.0) -> "TangentVector":
        holo = np.asarray(holo, dtype=complex)
        return cls(holo, np.conj(holo), param)

    @classmethod
    def partial_z(cls, dimension: int, i: int) -> "TangentVector":
        e = np.zeros(dimension, dtype=complex)
        e[i - 1] = 1.0
        return cls(e, np.zeros(dimension, dtype=complex))

    @classmethod
    def partial_zbar(cls, dimension: int, i: int) -> "TangentVector":
        e = np.zeros(dimension, dtype=complex)
        e[i - 1] = 1.0
        return cls(np.zeros(dimension, dtype=complex), e)

    @classmethod
    def partial_x(cls, dimension: int, i: int) -> "TangentVector":
        e = np.zeros(dimension, dtype=complex)
        e[i - 1] = 1.0
        return cls.real(e)

    @classmethod
    def partial_y(cls, dimension: int, i: int) -> "TangentVector":
        e = np.zeros(dimension, dtype=complex)
        e[i - 1] = 1.0j
        return cls.real(e)

    def pairing(self, label: Label, count: int) -> np.ndarray:
        kind, index = label
        if kind == 0:
            value = np.asarray(self.param, dtype=complex)
        else:
            source = self.holo if kind == 1 else self.anti
            value = np.asarray(source, dtype=complex)[..., index - 1]
        return np.broadcast_to(value, (count,))


def evaluate(a: Form, points: np.ndarray, vectors: Sequence[TangentVector], varsigma: float = 0.0) -> np.ndarray:
    """
    Evaluate a form at N points on `degree` tangent vectors.

    Args:
        a: form
        points: complex array (N, n) or a single point (n,)
        vectors: exactly a.degree tangent vectors
        varsigma: value of the fibre parameter

    Returns:
        complex array of shape (N,)

    Raises:
        DimensionMismatchError: If the number of vectors differs from the degree
        PoleError: If a coefficient is not finite at some point
    """
    if len(vectors) != a.degree:
        raise DimensionMismatchError(f"form of degree {a.degree} evaluated on {len(vectors)} vectors")
    points = np.atleast_2d(np.asarray(points, dtype=complex))
    count = points.shape[0]
    total = np.zeros(count, dtype=complex)
    for basis, coeff in a.terms:
        values = evaluate_field(coeff, points, varsigma=varsigma, what=f"coefficient of {basis or 'scalar'}")
        if not basis:
            total += values
            continue
        k = len(basis)
        matrix = np.empty((count, k, k), dtype=complex)
        for row, label in enumerate(basis):
            for col, vector in enumerate(vectors):
                matrix[:, row, col] = vector.pairing(label, count)
        total += values * np.linalg.det(matrix)
    return total


# ---------------------------------------------------------------------------
# Form grammar
# ---------------------------------------------------------------------------

_BASIS_NAME = re.compile(r"^d(z|zbar)(\d+)$|^dvarsigma$")


def _basis_symbols(dimension: int) -> Dict[str, sp.Symbol]:
    names = [f"dz{i}" for i in range(1, dimension + 1)] + [f"dzbar{i}" for i in range(1, dimension + 1)] + ["dvarsigma"]
    return {name: sp.Symbol(name, commutative=False) for name in names}


def _label_of(symbol: sp.Symbol) -> Label:
    match = _BASIS_NAME.match(symbol.name)
    if symbol.name == "dvarsigma":
        return SIGMA
    kind = 1 if match.group(1) == "z" else 2
    return (kind, int(match.group(2)))


def parse_form(text: str, chart_id: str, dimension: int, params: Optional[Mapping[str, object]] = None) -> Form:
    """
    Parse "coeff * dz1^dzbar1 + ..." into a Form; '^' is the wedge.

    Raises:
        ExpressionParseError: On bad syntax, unknown names or mixed degrees
    """
    namespace = grammar_namespace(dimension, params)
    basis_symbols = _basis_symbols(dimension)
    namespace.update(basis_symbols)
    try:
        expr = parse_expr(text.replace("^", "*"), local_dict=namespace, global_dict={"__builtins__": {}}, transformations=TRANSFORMATIONS)
    except Exception as exc:
        raise ExpressionParseError(f"cannot parse form {text!r}: {exc}") from exc
    expr = sp.expand(sp.sympify(expr), deep=False, mul=True, multinomial=False, power_exp=False, power_base=False, log=False)
    allowed = set(chart_symbols(dimension)) | set(basis_symbols.values())
    unknown = sorted(s.name for s in expr.free_symbols if s not in allowed)
    if unknown:
        raise ExpressionParseError(f"unknown names {unknown} in form {text!r}")
    terms = []
    degree: Optional[int] = None
    for summand in sp.Add.make_args(expr):
        commutative, noncommutative = summand.args_cnc()
        labels: List[Label] = []
        vanishes = False
        for factor in noncommutative:
            if factor.is_Pow:
                vanishes = True
                break
            if not (factor.is_Symbol and factor.name in basis_symbols):
                raise ExpressionParseError(f"cannot read basis factor {factor} in form {text!r}")
            labels.append(_label_of(factor))
        if degree is None:
            degree = len(labels)
        elif degree != len(labels):
            raise ExpressionParseError(f"form {text!r} mixes degrees {degree} and {len(labels)}")
        if vanishes:
            continue
        terms.append((labels, sp.Mul(*commutative)))
    return Form.from_terms(chart_id, dimension, degree or 0, terms)


@dataclass(frozen=True)
class SceneForm:
    """A form given chart-wise: one Form per chart of the scene."""

    degree: int
    pieces: Tuple[Tuple[str, Form], ...]

    @classmethod
    def from_mapping(cls, degree: int, pieces: Mapping[str, Form]) -> "SceneForm":
        for chart_id, piece in pieces.items():
            if piece.degree != degree:
                raise DimensionMismatchError(f"piece on {chart_id!r} has degree {piece.degree}, expected {degree}")
        return cls(degree, tuple(sorted(pieces.items())))

    def on(self, chart_id: str) -> Form:
        for cid, piece in self.pieces:
            if cid == chart_id:
                return piece
        raise ChartMismatchError(f"scene form has no piece on chart {chart_id!r}")

    def charts(self) -> Tuple[str, ...]:
        return tuple(cid for cid, _ in self.pieces)

    def __iter__(self) -> Iterator[Tuple[str, Form]]:
        return iter(self.pieces)

    def map(self, fn) -> "SceneForm":
        mapped = {cid: fn(piece) for cid, piece in self.pieces}
        degree = next(iter(mapped.values())).degree if mapped else self.degree
        return SceneForm.from_mapping(degree, mapped)

    def __add__(self, other: "SceneForm") -> "SceneForm":
        return SceneForm.from_mapping(self.degree, {cid: piece + other.on(cid) for cid, piece in self.pieces})

    def __sub__(self, other: "SceneForm") -> "SceneForm":
        return SceneForm.from_mapping(self.degree, {cid: piece - other.on(cid) for cid, piece in self.pieces})
