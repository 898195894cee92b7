"""
Bundles, Sections and Connections
=================================
Vector bundles given by transition matrices, r-sections and connection matrices.

Conventions:
- Frames change by e_beta = e_alpha . g_alpha_beta, with g_alpha_beta written in the
  coordinates of chart alpha; section components then satisfy S_alpha = g_alpha_beta . S_beta
- A connection acts by nabla e = e . theta, so theta_beta = g^-1 theta_alpha g + g^-1 dg and
  the connection trivial along a frame s = e . G has theta = -dG . G^-1
- Curvature is K = d theta + theta ^ theta
"""

import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy as sp

from chernloc.layers.bundles.form_matrix import FormMatrix, field_inverse, gauge_transform, simplify_entry
from chernloc.layers.fields_forms.form import Form
from chernloc.layers.fields_forms.scalar_field import VARSIGMA, evaluate_field
from chernloc.layers.geometry.atlas import Atlas
from chernloc.layers.geometry.covering import Covering
from chernloc.layers.geometry.partition import PartitionOfUnity
from chernloc.utils.errors import ChartMismatchError, DimensionMismatchError, FrameSingularError

logger = logging.getLogger(__name__)

# Smallest singular value accepted for a frame at a sample point
FRAME_TOLERANCE = 1e-9


def evaluate_matrix(matrix: sp.Matrix, points: np.ndarray, what: str = "matrix") -> np.ndarray:
    """Values of a field matrix at N points, shape (N, rows, cols)."""
    points = np.atleast_2d(np.asarray(points, dtype=complex))
    out = np.empty((points.shape[0], matrix.rows, matrix.cols), dtype=complex)
    for i in range(matrix.rows):
        for j in range(matrix.cols):
            out[:, i, j] = evaluate_field(matrix[i, j], points, what=f"{what}[{i},{j}]")
    return out


@dataclass(frozen=True)
class Domain:
    """
    Where an object lives: the whole model, V0 (outside the closed inner disks) or V1
    (inside the outer disks).
    """

    kind: str = "all"
    covering: Optional[Covering] = None

    def mask(self, chart_id: str, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=complex))
        if self.kind == "all" or self.covering is None:
            return np.ones(points.shape[0], dtype=bool)
        if self.kind == "V0":
            return self.covering.locate(chart_id, points, radius="inner") < 0
        if self.kind == "V1":
            return self.covering.locate(chart_id, points, radius="outer") >= 0
        raise ValueError(f"unknown domain {self.kind!r}")


@dataclass(frozen=True)
class BundleData:
    """
    Rank-e bundle over an atlas.

    Attributes:
        rank: fibre rank e
        atlas: charts and coordinate transitions
        transitions: (alpha, beta, g_alpha_beta) with g in alpha coordinates
    """

    rank: int
    atlas: Atlas
    transitions: Tuple[Tuple[str, str, sp.ImmutableMatrix], ...] = ()

    def __post_init__(self):
        for alpha, beta, g in self.transitions:
            if g.shape != (self.rank, self.rank):
                raise DimensionMismatchError(f"transition {alpha}->{beta} is {g.shape}, bundle rank is {self.rank}")

    @classmethod
    def trivial(cls, atlas: Atlas, rank: int) -> "BundleData":
        pairs = [(m.source, m.target) for m in atlas.transitions()]
        return cls(rank, atlas, tuple((a, b, sp.ImmutableMatrix(sp.eye(rank))) for a, b in pairs))

    def matrix(self, alpha: str, beta: str) -> Optional[sp.Matrix]:
        """g_alpha_beta in alpha coordinates; derived from g_beta_alpha when only that is given."""
        if alpha == beta:
            return sp.eye(self.rank)
        for a, b, g in self.transitions:
            if (a, b) == (alpha, beta):
                return sp.Matrix(g)
        for a, b, g in self.transitions:
            if (a, b) == (beta, alpha) and self.atlas.transition(alpha, beta) is not None:
                pulled = sp.Matrix(g).applyfunc(lambda entry: self.atlas.pull_field(entry, beta, alpha))
                return field_inverse(pulled)
        return None

    def pairs(self) -> List[Tuple[str, str]]:
        out = []
        for alpha in self.atlas.chart_ids():
            for beta in self.atlas.chart_ids():
                if alpha != beta and self.atlas.transition(alpha, beta) is not None and self.matrix(alpha, beta) is not None:
                    out.append((alpha, beta))
        return out

    def direct_sum(self, other: "BundleData") -> "BundleData":
        keys = sorted({(a, b) for a, b, _ in self.transitions} | {(a, b) for a, b, _ in other.transitions})
        transitions = []
        for alpha, beta in keys:
            first, second = self.matrix(alpha, beta), other.matrix(alpha, beta)
            if first is None or second is None:
                continue
            transitions.append((alpha, beta, sp.ImmutableMatrix(sp.diag(first, second))))
        return BundleData(self.rank + other.rank, self.atlas, tuple(transitions))


@dataclass(frozen=True)
class SectionTuple:
    """
    An r-section: per chart, an e x r matrix whose columns are the component sections.
    Charts without explicit data get transported components.
    """

    bundle: BundleData
    pieces: Tuple[Tuple[str, sp.ImmutableMatrix], ...]

    def __post_init__(self):
        for chart_id, matrix in self.pieces:
            if matrix.rows != self.bundle.rank:
                raise DimensionMismatchError(f"section on {chart_id!r} has {matrix.rows} rows, bundle rank is {self.bundle.rank}")
            if matrix.cols > self.bundle.rank:
                raise DimensionMismatchError(f"{matrix.cols}-section of a rank-{self.bundle.rank} bundle")

    @classmethod
    def standard(cls, bundle: BundleData, chart_id: str) -> "SectionTuple":
        """The coordinate frame of one chart."""
        return cls(bundle, ((chart_id, sp.ImmutableMatrix(sp.eye(bundle.rank))),))

    @property
    def r(self) -> int:
        return self.pieces[0][1].cols

    def charts(self) -> Tuple[str, ...]:
        return tuple(chart_id for chart_id, _ in self.pieces)

    def on(self, chart_id: str) -> sp.Matrix:
        """
        Components in chart_id: S_beta = g_beta_alpha . (S_alpha o phi).

        Raises:
            ChartMismatchError: If no chart with data can be reached
        """
        for cid, matrix in self.pieces:
            if cid == chart_id:
                return sp.Matrix(matrix)
        atlas = self.bundle.atlas
        for cid, matrix in self.pieces:
            g = self.bundle.matrix(chart_id, cid)
            if g is None or atlas.transition(chart_id, cid) is None:
                continue
            pulled = sp.Matrix(matrix).applyfunc(lambda entry: atlas.pull_field(entry, cid, chart_id))
            return (g * pulled).applyfunc(simplify_entry)
        raise ChartMismatchError(f"section has no data reachable from chart {chart_id!r}")

    def minors(self, chart_id: str) -> List[sp.Expr]:
        """All r x r minors of the component matrix."""
        matrix = self.on(chart_id)
        return [sp.expand(matrix.extract(list(rows), list(range(self.r))).det()) for rows in combinations(range(matrix.rows), self.r)]

    def with_columns(self, extra: sp.Matrix, home: str) -> "SectionTuple":
        """Append constant columns given in chart `home`, transported to every other chart."""
        pieces = []
        for chart_id in self.bundle.atlas.chart_ids():
            try:
                base = self.on(chart_id)
            except ChartMismatchError:
                continue
            if chart_id == home:
                complement = extra
            else:
                g = self.bundle.matrix(chart_id, home)
                if g is None:
                    continue
                complement = (g * extra).applyfunc(simplify_entry)
            pieces.append((chart_id, sp.ImmutableMatrix(base.row_join(complement))))
        return SectionTuple(self.bundle, tuple(pieces))


def complete_frame(section: SectionTuple, samples: Dict[str, np.ndarray]) -> Tuple[SectionTuple, List[int]]:
    """
    Complete an r-section to an e-frame with constant standard basis columns of its first chart.

    Args:
        section: the r-section
        samples: per chart, points of the region where the frame must be nonsingular

    Returns:
        (completed frame, indices of the standard basis vectors added)

    Raises:
        FrameSingularError: If no choice of standard columns gives a frame at the samples
    """
    e, r = section.bundle.rank, section.r
    if r == e:
        return section, []
    home = section.charts()[0]
    points = samples.get(home)
    base = section.on(home)
    chosen: List[int] = []
    for k in range(e):
        if len(chosen) == e - r:
            break
        trial = base.row_join(sp.Matrix([[1 if i == c else 0 for c in chosen + [k]] for i in range(e)]))
        values = evaluate_matrix(trial, points, "frame") if points is not None and len(points) else None
        if values is None or np.all(np.linalg.svd(values, compute_uv=False)[:, -1] > FRAME_TOLERANCE):
            chosen.append(k)
    if len(chosen) != e - r:
        raise FrameSingularError(f"cannot complete the {r}-section to a frame with constant columns on {home!r}")
    extra = sp.Matrix([[1 if i == c else 0 for c in chosen] for i in range(e)])
    logger.warning("[BUNDLES] completed %d-section with standard columns %s of chart %s", r, chosen, home)
    return section.with_columns(extra, home), chosen


@dataclass(frozen=True)
class ConnectionData:
    """
    A connection: per chart, the e x e matrix of 1-forms in the chart frame.
    Charts without explicit data are reached through the gauge rule.
    """

    bundle: BundleData
    pieces: Tuple[Tuple[str, FormMatrix], ...]
    domain: Domain = Domain()

    def charts(self) -> Tuple[str, ...]:
        return tuple(chart_id for chart_id, _ in self.pieces)

    def on(self, chart_id: str) -> FormMatrix:
        """
        Connection matrix in chart_id, transported when needed.

        Raises:
            ChartMismatchError: If no chart with data can be reached
        """
        for cid, theta in self.pieces:
            if cid == chart_id:
                return theta
        atlas = self.bundle.atlas
        for cid, theta in self.pieces:
            g = self.bundle.matrix(cid, chart_id)
            if g is None or atlas.transition(chart_id, cid) is None:
                continue
            moved = gauge_transform(theta, g)
            return moved.map(lambda entry: atlas.pull_form(entry, chart_id))
        raise ChartMismatchError(f"connection has no data reachable from chart {chart_id!r}")

    def restricted(self, domain: Domain) -> "ConnectionData":
        return ConnectionData(self.bundle, self.pieces, domain)


def connection_from_forms(bundle: BundleData, forms: Dict[str, Sequence[Sequence[Form]]], domain: Domain = Domain()) -> ConnectionData:
    pieces = []
    for chart_id, rows in forms.items():
        dimension = bundle.atlas.chart(chart_id).dimension
        pieces.append((chart_id, FormMatrix.from_forms(rows, chart_id, dimension, 1)))
    return ConnectionData(bundle, tuple(pieces), domain)


def trivial_connection(frame: SectionTuple, domain: Domain = Domain(), samples: Optional[Dict[str, np.ndarray]] = None) -> ConnectionData:
    """
    The connection for which the frame is parallel: theta = -dG . G^-1 in every chart.

    Args:
        frame: e-frame (r = e)
        domain: where the connection is used
        samples: per chart, region points at which the frame is checked for singularity

    Raises:
        FrameSingularError: If the frame is singular at a sample point
    """
    bundle = frame.bundle
    if frame.r != bundle.rank:
        raise DimensionMismatchError(f"a {frame.r}-section is not a frame of a rank-{bundle.rank} bundle; complete it first")
    pieces = []
    for chart in bundle.atlas.charts:
        try:
            G = frame.on(chart.id)
        except ChartMismatchError:
            continue
        points = (samples or {}).get(chart.id)
        if points is not None and len(points):
            values = evaluate_matrix(G, points, "frame")
            smallest = np.linalg.svd(values, compute_uv=False)[:, -1]
            if np.any(smallest <= FRAME_TOLERANCE):
                bad = points[int(np.argmin(smallest))]
                raise FrameSingularError(f"frame is singular at {tuple(bad)} in chart {chart.id!r}")
        dG = FormMatrix.from_fields(chart.id, chart.dimension, G).d()
        theta = -dG.right_fields(field_inverse(G))
        pieces.append((chart.id, theta))
    logger.debug("[BUNDLES] trivial connection charts=%s domain=%s", [c for c, _ in pieces], domain.kind)
    return ConnectionData(bundle, tuple(pieces), domain)


def glue_connections(partition: PartitionOfUnity, c0: ConnectionData, c1: ConnectionData) -> ConnectionData:
    """
    rho0 . theta0 + sum_nu rho1_nu . theta1 per chart; a term is dropped where its
    partition function is identically zero on the chart.
    """
    bundle = c0.bundle
    pieces = []
    for chart in bundle.atlas.charts:
        dimension = chart.dimension
        total = FormMatrix.zeros(chart.id, dimension, bundle.rank, 1)
        rho0 = partition.rho0_on(chart.id)
        if rho0 != 0:
            total = total + c0.on(chart.id).scale(rho0)
        for nu in range(len(partition.rho1)):
            rho1 = partition.rho1_on(nu, chart.id)
            if rho1 != 0:
                total = total + c1.on(chart.id).scale(rho1)
        pieces.append((chart.id, total))
    return ConnectionData(bundle, tuple(pieces), Domain("all", partition.covering))


def direct_sum(c0: ConnectionData, c1: ConnectionData) -> ConnectionData:
    """Block-diagonal connection on the Whitney sum."""
    bundle = c0.bundle.direct_sum(c1.bundle)
    pieces = []
    for chart_id in sorted(set(c0.charts()) | set(c1.charts())):
        first, second = c0.on(chart_id), c1.on(chart_id)
        zero = Form.zero(chart_id, first.dimension, 1)
        rows = [list(row) + [zero] * second.size for row in first.entries]
        rows += [[zero] * first.size + list(row) for row in second.entries]
        pieces.append((chart_id, FormMatrix.from_forms(rows, chart_id, first.dimension, 1)))
    return ConnectionData(bundle, tuple(pieces), c0.domain)


def family_connection(c0: ConnectionData, c1: ConnectionData, chart_id: str) -> FormMatrix:
    """(1 - varsigma) theta0 + varsigma theta1 on chart x [0, 1]."""
    return c0.on(chart_id).scale(1 - VARSIGMA) + c1.on(chart_id).scale(VARSIGMA)


def curvature_matrix(theta: FormMatrix) -> FormMatrix:
    """K = d theta + theta ^ theta."""
    return theta.d() + theta.wedge(theta)


def bianchi_defect(theta: FormMatrix) -> FormMatrix:
    """dK - K ^ theta + theta ^ K, which vanishes identically."""
    K = curvature_matrix(theta)
    return K.d() - K.wedge(theta) + theta.wedge(K)

