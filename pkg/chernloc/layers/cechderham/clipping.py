"""
Honeycomb Clipping
==================
Splits the simplices of a chain along the cells of a honeycomb system.

- Affine 2-simplices in a plane chart are clipped in polar coordinates (rho, alpha) about
  the disk center: on each angular interval between breakpoints the simplex is
  {L(alpha) <= rho <= U(alpha)} with L, U given by single edges (L = 0 when the center lies
  in the closed simplex); breakpoints are vertex angles and edge/circle crossings
- Pieces are (rho, alpha) squares, Kuhn split; arcs of the circle run counterclockwise
- Any other simplex must lie entirely inside or entirely outside every disk
- A simplex may meet the interface of at most one disk
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
import sympy as sp

from chernloc.layers.geometry.honeycomb import HoneycombDisk, HoneycombSystem
from chernloc.layers.mesh.simplices import Simplex, cube_cell, params
from chernloc.utils.errors import ClippingError

logger = logging.getLogger(__name__)

TANGENCY_TOL = 1e-12
_ANGLE_EPS = 1e-13
# Parameter grid used to classify non-affine simplices
_CLASSIFY_STEPS = 8


@dataclass
class ClippedSimplex:
    """
    Pieces of one simplex: in the regular cell, per singular cell, and interface arcs per cell.
    """

    regular: List[Simplex] = field(default_factory=list)
    singular: Dict[int, List[Simplex]] = field(default_factory=dict)
    interface: Dict[int, List[Simplex]] = field(default_factory=dict)


def _cross(a: complex, b: complex) -> float:
    return (a.conjugate() * b).imag


def _exact_point(value: complex) -> sp.Expr:
    return sp.Float(value.real, 17) + sp.I * sp.Float(value.imag, 17)


def _classification_params(order: int) -> np.ndarray:
    """Points of the standard simplex on a regular barycentric grid, vertices and edges included."""
    rows = []
    steps = _CLASSIFY_STEPS
    for idx in np.ndindex(*(steps + 1,) * order):
        if sum(idx) <= steps:
            rows.append(np.asarray(idx, dtype=float) / steps)
    return np.asarray(rows).reshape(-1, order)


def _distances(simplex: Simplex, disk: HoneycombDisk, honeycomb: HoneycombSystem) -> np.ndarray:
    points = simplex.map_points(_classification_params(simplex.order)) if simplex.order else simplex.map_points(np.zeros((1, 0)))
    if simplex.chart_id != disk.chart_id:
        points = honeycomb.covering.images_in(points, simplex.chart_id, disk.chart_id)
    with np.errstate(invalid="ignore"):
        distances = disk.distance(points)
    # Points without an image in the disk chart are far from the disk
    return np.where(np.isfinite(distances), distances, np.inf)


def _affine_distance_range(simplex: Simplex, disk: HoneycombDisk) -> Tuple[float, float]:
    """(min, max) distance from the disk center to an affine plane triangle."""
    c = disk.center[0]
    verts = [v[0] for v in simplex.vertices]
    far = max(abs(v - c) for v in verts)
    if _contains(verts, c, closed=True):
        return 0.0, far
    near = far
    for p, q in zip(verts, verts[1:] + verts[:1]):
        d = q - p
        lam = min(1.0, max(0.0, ((c - p).conjugate() * d).real / abs(d) ** 2))
        near = min(near, abs(p + lam * d - c))
    return near, far


def _contains(verts: List[complex], c: complex, closed: bool) -> bool:
    signs = [_cross(q - p, c - p) for p, q in zip(verts, verts[1:] + verts[:1])]
    area = _cross(verts[1] - verts[0], verts[2] - verts[0])
    scaled = [s * np.sign(area) for s in signs]
    if closed:
        return all(s >= -TANGENCY_TOL for s in scaled)
    return all(s > TANGENCY_TOL for s in scaled)


def classify(simplex: Simplex, disk: HoneycombDisk, honeycomb: HoneycombSystem) -> str:
    """'inside', 'outside' or 'partial' with respect to one singular cell."""
    if simplex.is_affine and simplex.order == 2 and simplex.dimension == 1 and simplex.chart_id == disk.chart_id:
        near, far = _affine_distance_range(simplex, disk)
    else:
        distances = _distances(simplex, disk, honeycomb)
        near, far = float(np.min(distances)), float(np.max(distances))
    if far < disk.radius - TANGENCY_TOL:
        return "inside"
    if near > disk.radius + TANGENCY_TOL:
        return "outside"
    return "partial"


# ---------------------------------------------------------------------------
# Polar clipping of affine triangles
# ---------------------------------------------------------------------------


class _Edge:
    """Straight edge p -> p + d seen from the center c."""

    def __init__(self, p: complex, q: complex, c: complex):
        self.p, self.d, self.f = p, q - p, p - c

    def hit(self, alpha: float) -> Optional[float]:
        """Distance along the ray at angle alpha to the edge, None when the ray misses it."""
        e = complex(np.cos(alpha), np.sin(alpha))
        denominator = _cross(e, self.d)
        if abs(denominator) < TANGENCY_TOL:
            return None
        rho = _cross(self.f, self.d) / denominator
        lam = -_cross(e, self.f) / denominator
        if lam < -1e-9 or lam > 1 + 1e-9 or rho <= TANGENCY_TOL:
            return None
        return rho

    def radius_expr(self, alpha: sp.Expr) -> sp.Expr:
        numerator = sp.Float(_cross(self.f, self.d), 17)
        return numerator / (sp.Float(self.d.imag, 17) * sp.cos(alpha) - sp.Float(self.d.real, 17) * sp.sin(alpha))

    def crossings(self, r: float, c: complex, label: str) -> List[complex]:
        """Points where the edge meets the circle |z - c| = r."""
        a = abs(self.d) ** 2
        height = abs(_cross(self.f, self.d)) / np.sqrt(a)
        foot = -(self.f.conjugate() * self.d).real / a
        if abs(height - r) <= TANGENCY_TOL * max(1.0, r) and -1e-9 <= foot <= 1 + 1e-9:
            raise ClippingError(f"interface circle of radius {r} is tangent to an edge", label)
        if height > r:
            return []
        half = np.sqrt(max(r * r - height * height, 0.0)) / np.sqrt(a)
        out = []
        for lam in (foot - half, foot + half):
            if TANGENCY_TOL < lam < 1 - TANGENCY_TOL:
                out.append(self.p + lam * self.d)
        return out


def _wrap(angle: float, base: float) -> float:
    """Representative of angle in (base - pi, base + pi]."""
    return base - np.pi + ((angle - base + np.pi) % (2 * np.pi) or 2 * np.pi)


def polar_clip(simplex: Simplex, disk: HoneycombDisk, nu: int) -> ClippedSimplex:
    """
    Clip an affine plane triangle against one singular disk.

    Raises:
        ClippingError: If a vertex lies on the interface or an edge is tangent to it
    """
    label = simplex.describe()
    c = disk.center[0]
    r = disk.radius
    verts = [v[0] for v in simplex.vertices]
    area = _cross(verts[1] - verts[0], verts[2] - verts[0])
    result = ClippedSimplex()
    if abs(area) < TANGENCY_TOL:
        return result
    orientation = simplex.sign * (1 if area > 0 else -1)
    for v in verts:
        if abs(abs(v - c) - r) <= TANGENCY_TOL * max(1.0, r):
            raise ClippingError(f"vertex {v} lies on the interface circle", label)
    edges = [_Edge(p, q, c) for p, q in zip(verts, verts[1:] + verts[:1])]
    crossing_points = [x for edge in edges for x in edge.crossings(r, c, label)]

    center_in = _contains(verts, c, closed=True)
    corner_angles = [np.angle(v - c) for v in verts if abs(v - c) > TANGENCY_TOL]
    if _contains(verts, c, closed=False):
        base = corner_angles[0] + np.pi
        low, high = base - np.pi, base + np.pi
    else:
        base = float(np.angle(sum(verts) / 3 - c))
        wrapped = [_wrap(a, base) for a in corner_angles]
        low, high = min(wrapped), max(wrapped)
    breaks = {low, high}
    for a in corner_angles + [np.angle(x - c) for x in crossing_points]:
        w = _wrap(a, base)
        if low < w < high:
            breaks.add(w)
    ordered = sorted(breaks)

    t1, t2 = params(2)
    cells, arcs = [], []
    for a, b in zip(ordered, ordered[1:]):
        if b - a < _ANGLE_EPS:
            continue
        mid = 0.5 * (a + b)
        hits = [(edge.hit(mid), edge) for edge in edges]
        hits = sorted(((rho, edge) for rho, edge in hits if rho is not None), key=lambda item: item[0])
        if not hits:
            continue
        alpha = sp.Float(a, 17) + (sp.Float(b, 17) - sp.Float(a, 17)) * t2
        upper_value, upper_edge = hits[-1]
        if center_in:
            lower_value, lower_expr = 0.0, sp.S.Zero
        else:
            lower_value, lower_edge = hits[0]
            lower_expr = lower_edge.radius_expr(alpha)
        upper_expr = upper_edge.radius_expr(alpha)
        radius = sp.Float(r, 17)
        if lower_value < r:
            hi = upper_expr if upper_value < r else radius
            cells.append(("singular", lower_expr, hi, alpha))
        if upper_value > r:
            lo = lower_expr if lower_value > r else radius
            cells.append(("regular", lo, upper_expr, alpha))
        if lower_value < r < upper_value:
            arcs.append((a, b))

    center = _exact_point(c)
    for index, (kind, lo, hi, alpha) in enumerate(cells):
        rho = lo + t1 * (hi - lo)
        point = center + rho * (sp.cos(alpha) + sp.I * sp.sin(alpha))
        pieces = cube_cell(simplex.chart_id, (point,), 2, orientation, f"{label}|{kind}[{index}]")
        if kind == "regular":
            result.regular.extend(pieces)
        else:
            result.singular.setdefault(nu, []).extend(pieces)
    (s,) = params(1)
    for index, (a, b) in enumerate(arcs):
        alpha = sp.Float(a, 17) + (sp.Float(b, 17) - sp.Float(a, 17)) * s
        point = center + sp.Float(r, 17) * (sp.cos(alpha) + sp.I * sp.sin(alpha))
        arc = Simplex(simplex.chart_id, 1, 1, (point,), orientation, None, f"{label}|arc[{index}]")
        result.interface.setdefault(nu, []).append(arc)
    logger.debug("[CLIP] simplex=%s cells=%d arcs=%d", label, len(cells), len(arcs))
    return result


def clip_simplex(simplex: Simplex, honeycomb: HoneycombSystem) -> ClippedSimplex:
    """
    Pieces of a simplex in the regular cell, the singular cells and on the interfaces.

    Raises:
        ClippingError: If the simplex meets two interfaces, or cannot be clipped
    """
    kinds = [classify(simplex, disk, honeycomb) for disk in honeycomb.disks]
    partial = [nu for nu, kind in enumerate(kinds) if kind == "partial"]
    inside = [nu for nu, kind in enumerate(kinds) if kind == "inside"]
    if len(partial) > 1:
        raise ClippingError(f"simplex meets the interfaces of cells {partial}", simplex.describe())
    if inside:
        return ClippedSimplex(singular={inside[0]: [simplex]})
    if not partial:
        return ClippedSimplex(regular=[simplex])
    nu = partial[0]
    disk = honeycomb.disks[nu]
    if not (simplex.is_affine and simplex.order == 2 and simplex.dimension == 1 and simplex.chart_id == disk.chart_id):
        raise ClippingError("only affine triangles in the chart of the cell can cross an interface", simplex.describe())
    return polar_clip(simplex, disk, nu)
