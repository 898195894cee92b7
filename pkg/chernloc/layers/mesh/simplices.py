"""
Simplices and Chains
====================
Parametrized simplices into a chart and integer chains of them.

- A k-simplex maps the standard simplex {t_j >= 0, sum t_j <= 1} into a chart through
  sympy components z_i(t1..tk); affine simplices also remember their vertices
- Faces follow the standard vertex order e0 = 0, e_j = unit vectors; face i carries (-1)^i
- Cube-parametrized cells are split into k! simplices (Kuhn split) before use
- Chains merge simplices with the same numeric signature
"""

from dataclasses import dataclass, field
from itertools import permutations
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import sympy as sp

from chernloc.layers.fields_forms.scalar_field import compile_expression, param
from chernloc.utils.errors import DimensionMismatchError, PoleError

# Fixed parameter points used for numeric signatures of simplices
_SIGNATURE_WEIGHTS = (0.137, 0.291, 0.083, 0.219)


def params(k: int) -> Tuple[sp.Symbol, ...]:
    return tuple(param(j) for j in range(1, k + 1))


def permutation_sign(perm: Sequence[int]) -> int:
    inversions = sum(1 for a in range(len(perm)) for b in range(a + 1, len(perm)) if perm[a] > perm[b])
    return -1 if inversions % 2 else 1


@dataclass(frozen=True)
class Simplex:
    """
    Oriented parametrized k-simplex in a chart.

    Attributes:
        chart_id: target chart
        dimension: complex dimension n of the chart
        order: simplex dimension k
        components: z_1..z_n as expressions in t_1..t_k
        sign: orientation sign
        vertices: vertex coordinates of an affine simplex, else None
        label: identifier used in diagnostics
    """

    chart_id: str
    dimension: int
    order: int
    components: Tuple[sp.Expr, ...]
    sign: int = 1
    vertices: Optional[Tuple[Tuple[complex, ...], ...]] = None
    label: str = ""

    def __post_init__(self):
        if len(self.components) != self.dimension:
            raise DimensionMismatchError(f"simplex has {len(self.components)} components in a {self.dimension}-dimensional chart")
        if self.order > 2 * self.dimension:
            raise DimensionMismatchError(f"{self.order}-simplex cannot live in complex dimension {self.dimension}")

    @classmethod
    def affine(cls, chart_id: str, vertices: Sequence[Sequence[complex]], sign: int = 1, label: str = "") -> "Simplex":
        """Affine simplex through the given vertices (k+1 points of C^n)."""
        verts = tuple(tuple(complex(c) for c in v) for v in vertices)
        k = len(verts) - 1
        n = len(verts[0])
        t = params(k)
        exact = [[sp.nsimplify(c, rational=True) for c in v] for v in verts]
        components = []
        for i in range(n):
            expr = exact[0][i] + sum(t[j - 1] * (exact[j][i] - exact[0][i]) for j in range(1, k + 1))
            components.append(sp.expand(expr))
        return cls(chart_id, n, k, tuple(components), sign, verts, label)

    @classmethod
    def point(cls, chart_id: str, coords: Sequence[complex], sign: int = 1) -> "Simplex":
        return cls.affine(chart_id, [coords], sign)

    @property
    def is_affine(self) -> bool:
        return self.vertices is not None

    def with_sign(self, sign: int) -> "Simplex":
        return Simplex(self.chart_id, self.dimension, self.order, self.components, sign, self.vertices, self.label)

    def reversed(self) -> "Simplex":
        return self.with_sign(-self.sign)

    def reparametrize(self, inner: Sequence[sp.Expr], order: int, sign: int = 1, label: str = "") -> "Simplex":
        """Compose with a parameter map t -> inner(s) from an order-dimensional parameter domain."""
        substitution = {param(j): sp.sympify(inner[j - 1]) for j in range(1, self.order + 1)}
        components = tuple(sp.expand(c.xreplace(substitution)) if c.is_polynomial() else c.xreplace(substitution) for c in self.components)
        return Simplex(self.chart_id, self.dimension, order, components, self.sign * sign, None, label or self.label)

    def face(self, i: int) -> "Simplex":
        """
        Face opposite vertex i with its induced sign (-1)^i.
        """
        k = self.order
        if k == 0:
            raise DimensionMismatchError("a 0-simplex has no faces")
        s = params(k - 1)
        standard = [tuple(sp.S.Zero for _ in range(k))]
        for j in range(k):
            standard.append(tuple(sp.S.One if m == j else sp.S.Zero for m in range(k)))
        kept = [standard[j] for j in range(k + 1) if j != i]
        inner = []
        for coord in range(k):
            expr = kept[0][coord] + sum(s[j - 1] * (kept[j][coord] - kept[0][coord]) for j in range(1, k))
            inner.append(expr)
        face = self.reparametrize(inner, k - 1, (-1) ** i, label=f"{self.label}/{i}" if self.label else "")
        if self.vertices is not None:
            vertices = tuple(v for j, v in enumerate(self.vertices) if j != i)
            face = Simplex(face.chart_id, face.dimension, face.order, face.components, face.sign, vertices, face.label)
        return face

    def faces(self) -> List["Simplex"]:
        return [self.face(i) for i in range(self.order + 1)]

    # -- numerics ---------------------------------------------------------------

    def map_points(self, t: np.ndarray) -> np.ndarray:
        """Chart points phi(t) for parameter points t of shape (N, k)."""
        t = np.asarray(t, dtype=float).reshape(-1, self.order) if self.order else np.zeros((1, 0))
        columns = []
        for comp in self.components:
            fn = compile_expression(comp, params(self.order))
            with np.errstate(all="ignore"):
                values = np.asarray(fn(*[t[:, j] for j in range(self.order)]), dtype=complex)
            columns.append(np.broadcast_to(values, (t.shape[0],)))
        points = np.stack(columns, axis=1)
        if not np.all(np.isfinite(points)):
            raise PoleError(f"parametrization of simplex {self.describe()} is not finite", None)
        return points

    def tangents(self, t: np.ndarray) -> List[np.ndarray]:
        """Holomorphic parts d phi / d t_j, each of shape (N, n)."""
        t = np.asarray(t, dtype=float).reshape(-1, self.order)
        out = []
        for j in range(1, self.order + 1):
            columns = []
            for comp in self.components:
                fn = compile_expression(sp.diff(comp, param(j)), params(self.order))
                with np.errstate(all="ignore"):
                    values = np.asarray(fn(*[t[:, m] for m in range(self.order)]), dtype=complex)
                columns.append(np.broadcast_to(values, (t.shape[0],)))
            out.append(np.stack(columns, axis=1))
        return out

    def vertex_points(self) -> np.ndarray:
        """Images of the standard vertices, shape (k+1, n)."""
        k = self.order
        standard = np.zeros((k + 1, k))
        for j in range(k):
            standard[j + 1, j] = 1.0
        return self.map_points(standard)

    def signature(self) -> Tuple:
        """Numeric identity of the oriented-free simplex: chart plus sampled images."""
        k = self.order
        if k == 0:
            samples = self.map_points(np.zeros((1, 0)))
        else:
            weights = np.array(_SIGNATURE_WEIGHTS[:k])
            sample_params = np.stack([weights, weights[::-1] / 2, np.full(k, 1.0 / (k + 2))])
            samples = self.map_points(sample_params)
        rounded = tuple(complex(round(v.real, 8) + 0.0, round(v.imag, 8) + 0.0) for v in samples.ravel())
        return (self.chart_id, k, rounded)

    def describe(self) -> str:
        if self.label:
            return self.label
        if self.vertices is not None:
            return f"{self.chart_id}{[tuple(v) for v in self.vertices]}"
        return f"{self.chart_id}:{','.join(sp.sstr(c) for c in self.components)}"


def kuhn_simplices(order: int) -> List[Tuple[Tuple[sp.Expr, ...], int]]:
    """
    Kuhn split of the unit cube [0,1]^k: for each permutation pi, the simplex with vertices
    v_j = sum_{i<=j} e_pi(i), as (cube coordinates in t, orientation sign(pi)).
    """
    t = params(order)
    out = []
    for perm in permutations(range(order)):
        vertices = [np.zeros(order, dtype=int)]
        for j in range(order):
            nxt = vertices[-1].copy()
            nxt[perm[j]] = 1
            vertices.append(nxt)
        coords = []
        for coord in range(order):
            expr = sum(int(vertices[j][coord] - vertices[0][coord]) * t[j - 1] for j in range(1, order + 1))
            coords.append(sp.sympify(expr + int(vertices[0][coord])))
        out.append((tuple(coords), permutation_sign(perm)))
    return out


def cube_cell(chart_id: str, components: Sequence[sp.Expr], order: int, sign: int = 1, label: str = "") -> List["Simplex"]:
    """Split a cube-parametrized cell into oriented simplices."""
    dimension = len(components)
    cell = Simplex(chart_id, dimension, order, tuple(sp.sympify(c) for c in components), sign, None, label)
    out = []
    for index, (coords, perm_sign) in enumerate(kuhn_simplices(order)):
        out.append(cell.reparametrize(coords, order, perm_sign, label=f"{label}#{index}" if label else ""))
    return out


@dataclass(frozen=True)
class Chain:
    """
    Formal integer combination of simplices of one dimension.
    """

    order: int
    items: Tuple[Tuple[Simplex, int], ...] = field(default=())

    @classmethod
    def of(cls, simplices: Iterable[Simplex], order: Optional[int] = None) -> "Chain":
        simplices = list(simplices)
        if order is None:
            order = simplices[0].order if simplices else 0
        return cls(order, ()).plus(cls(order, tuple((s, 1) for s in simplices)), normalize=False)

    def plus(self, other: "Chain", normalize: bool = True) -> "Chain":
        if self.items and other.items and self.order != other.order:
            raise DimensionMismatchError(f"cannot add chains of dimension {self.order} and {other.order}")
        for simplex, _ in other.items:
            if simplex.order != self.order:
                raise DimensionMismatchError(f"simplex of dimension {simplex.order} in a {self.order}-chain")
        combined = Chain(self.order, self.items + other.items)
        return combined.normalized() if normalize else combined

    def __add__(self, other: "Chain") -> "Chain":
        return self.plus(other)

    def __neg__(self) -> "Chain":
        return Chain(self.order, tuple((s, -w) for s, w in self.items))

    def normalized(self) -> "Chain":
        """Merge simplices with equal signatures; drop zero weights."""
        weights: Dict[Tuple, int] = {}
        representative: Dict[Tuple, Simplex] = {}
        for simplex, weight in self.items:
            key = simplex.signature()
            signed = weight * simplex.sign
            if key not in representative:
                representative[key] = simplex.with_sign(1)
                weights[key] = 0
            weights[key] += signed
        items = tuple((representative[key], weights[key]) for key in sorted(weights, key=repr) if weights[key] != 0)
        return Chain(self.order, items)

    def is_empty(self) -> bool:
        return not self.normalized().items

    def simplices(self) -> Iterator[Tuple[Simplex, int]]:
        return iter(self.items)

    def __len__(self) -> int:
        return len(self.items)


def boundary(chain: Chain) -> Chain:
    """Alternating-sign boundary, normalized; faces carry (-1)^i in their sign."""
    if chain.order == 0:
        raise DimensionMismatchError("the boundary of a 0-chain is not defined")
    items = []
    for simplex, weight in chain.items:
        for face in simplex.faces():
            items.append((face, weight))
    return Chain(chain.order - 1, tuple(items)).normalized()
