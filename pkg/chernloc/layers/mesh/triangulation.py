"""
Triangulations
==============
Top-dimensional simplices of a compact model with their face incidence table.

Faces are identified across charts by the canonical images of a few interior points
(one near each face vertex plus the barycenter), so identifications through transition
maps and lattice periods are found without vertex bookkeeping. A face whose sample
points collapse (e.g. the edge of a fan cell mapped to one point) is degenerate and
takes no part in the incidence.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np
import sympy as sp

from chernloc.layers.geometry.atlas import Atlas
from chernloc.layers.mesh.simplices import Chain, Simplex, permutation_sign, params
from chernloc.utils.errors import NonCoherentTriangulationError, NonCompactSceneError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FaceRecord:
    simplex_index: int
    face_index: int
    induced_sign: int
    samples: Tuple[Tuple[str, Tuple[complex, ...]], ...]
    center: Tuple[str, Tuple[complex, ...]]


def _sample_parameters(m: int) -> np.ndarray:
    """Interior points of the standard m-simplex, one near each vertex, then the barycenter."""
    rows = []
    for j in range(m + 1):
        bary = np.full(m + 1, 1.0 / (2 * (m + 1)))
        bary[j] += 0.5
        rows.append(bary[1:])
    rows.append(np.full(m, 1.0 / (m + 1)))
    return np.asarray(rows).reshape(m + 2, m)


class Triangulation:
    """
    Coherently oriented top simplices over an atlas.
    """

    def __init__(self, atlas: Atlas, simplices: Sequence[Simplex]):
        self.atlas = atlas
        self.simplices: Tuple[Simplex, ...] = tuple(simplices)
        self._incidence = None

    @property
    def order(self) -> int:
        return self.simplices[0].order if self.simplices else 0

    def chain(self) -> Chain:
        return Chain(self.order, tuple((s, 1) for s in self.simplices))

    def _face_record(self, index: int, face_index: int, face: Simplex):
        m = face.order
        points = face.map_points(_sample_parameters(m))
        canon = [self.atlas.canonical(face.chart_id, p) for p in points]
        vertex_samples = canon[:-1]
        if len(set(vertex_samples)) < len(vertex_samples):
            return None
        return FaceRecord(index, face_index, face.sign, tuple(vertex_samples), canon[-1])

    def incidence(self) -> Dict[Tuple, List[FaceRecord]]:
        """Faces grouped by their geometric identity."""
        if self._incidence is None:
            groups: Dict[Tuple, List[FaceRecord]] = defaultdict(list)
            for index, simplex in enumerate(self.simplices):
                for face_index, face in enumerate(simplex.faces()):
                    record = self._face_record(index, face_index, face)
                    if record is None:
                        continue
                    key = (frozenset(record.samples), record.center)
                    groups[key].append(record)
            self._incidence = dict(groups)
        return self._incidence

    def unmatched_faces(self) -> List[FaceRecord]:
        return [records[0] for records in self.incidence().values() if len(records) == 1]

    def is_closed(self) -> bool:
        return not self.unmatched_faces()

    def check_coherent(self) -> None:
        """
        Raises:
            NonCoherentTriangulationError: If a face is shared by more than two simplices or
                twice with the same induced orientation
        """
        for records in self.incidence().values():
            if len(records) > 2:
                raise NonCoherentTriangulationError(
                    f"face shared by {len(records)} simplices: {[self.simplices[r.simplex_index].describe() for r in records]}"
                )
            if len(records) != 2:
                continue
            first, second = records
            permutation = [first.samples.index(s) for s in second.samples]
            parity = permutation_sign(permutation)
            if first.induced_sign * second.induced_sign * parity != -1:
                raise NonCoherentTriangulationError(
                    "face shared with equal induced orientations by "
                    f"{self.simplices[first.simplex_index].describe()} and {self.simplices[second.simplex_index].describe()}"
                )

    def check_compact(self) -> None:
        """
        Raises:
            NonCompactSceneError: If some face is unmatched
            NonCoherentTriangulationError: If the orientation is not coherent
        """
        self.check_coherent()
        unmatched = self.unmatched_faces()
        if unmatched:
            first = unmatched[0]
            raise NonCompactSceneError(
                f"triangulation has {len(unmatched)} unmatched faces, e.g. face {first.face_index} of "
                f"{self.simplices[first.simplex_index].describe()}"
            )
        logger.info("[MESH] triangulation simplices=%d closed=True", len(self.simplices))

    def refine(self) -> "Triangulation":
        return Triangulation(self.atlas, [child for s in self.simplices for child in refine_simplex(s)])


def _midpoint_children(order: int) -> List[List[Tuple[float, ...]]]:
    if order == 1:
        return [[(0.0,), (0.5,)], [(0.5,), (1.0,)]]
    a, b, c = (0.0, 0.0), (1.0, 0.0), (0.0, 1.0)
    ab, ac, bc = (0.5, 0.0), (0.0, 0.5), (0.5, 0.5)
    return [[a, ab, ac], [ab, b, bc], [ac, bc, c], [ab, bc, ac]]


def refine_simplex(simplex: Simplex) -> List[Simplex]:
    """
    Uniform midpoint refinement: 2 children for 1-simplices, 4 for 2-simplices,
    each positively oriented in parameter space. Other dimensions are returned unchanged.
    """
    if simplex.order not in (1, 2):
        return [simplex]
    children = []
    for corners in _midpoint_children(simplex.order):
        if simplex.is_affine:
            images = simplex.map_points(np.asarray(corners))
            children.append(Simplex.affine(simplex.chart_id, images, simplex.sign, simplex.label))
            continue
        t = params(simplex.order)
        base = [sp.Rational(str(v)) for v in corners[0]]
        inner = []
        for coord in range(simplex.order):
            expr = base[coord] + sum(
                t[j - 1] * (sp.Rational(str(corners[j][coord])) - base[coord]) for j in range(1, simplex.order + 1)
            )
            inner.append(expr)
        children.append(simplex.reparametrize(inner, simplex.order, 1, simplex.label))
    return children
