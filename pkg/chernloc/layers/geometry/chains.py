"""
Standard Chains
===============
Links, disks and spheres as parametrized chains.

- Links and circles run counterclockwise
- Disk cells are (radius, angle) squares, positively oriented
- The 3-sphere uses Hopf coordinates (xi1, eta, xi2) -> (r cos(eta) e^{i xi1}, r sin(eta) e^{i xi2})
  in the cube order (xi1, eta, xi2), which is the outward orientation
"""

from typing import Sequence

import sympy as sp

from chernloc.layers.mesh.simplices import Chain, Simplex, cube_cell, params


def _exact(value) -> sp.Expr:
    return sp.nsimplify(value, rational=True)


def link_of_point(chart_id: str, center: Sequence[complex], radius: float, segments: int = 16, coordinate: int = 1) -> Chain:
    """
    Closed counterclockwise 1-chain tracing |z_coordinate - p| = radius, other coordinates fixed.
    """
    if segments < 1:
        raise ValueError("segments must be positive")
    (t,) = params(1)
    c = [_exact(v) for v in center]
    r = _exact(radius)
    simplices = []
    for j in range(segments):
        components = list(c)
        components[coordinate - 1] = c[coordinate - 1] + r * sp.exp(2 * sp.pi * sp.I * (j + t) / segments)
        simplices.append(Simplex(chart_id, len(c), 1, tuple(components), 1, None, f"{chart_id}:link[{j}]"))
    return Chain(1, tuple((s, 1) for s in simplices))


def disk_chain(chart_id: str, center: Sequence[complex], radius: float, segments: int = 4, coordinate: int = 1) -> Chain:
    """
    Positively oriented 2-chain covering the closed disk |z_coordinate - p| <= radius.
    """
    t1, t2 = params(2)
    c = [_exact(v) for v in center]
    r = _exact(radius)
    simplices = []
    for j in range(segments):
        components = list(c)
        components[coordinate - 1] = c[coordinate - 1] + r * t1 * sp.exp(2 * sp.pi * sp.I * (j + t2) / segments)
        simplices.extend(cube_cell(chart_id, components, 2, 1, f"{chart_id}:disk[{j}]"))
    return Chain(2, tuple((s, 1) for s in simplices))


def sphere_chain(chart_id: str, center: Sequence[complex], radius: float, m: int, segments: int = 16) -> Chain:
    """
    Outward-oriented sphere S^{2m-1} of the given radius, m = 1 or 2.
    """
    if m == 1:
        return link_of_point(chart_id, center, radius, segments)
    if m != 2:
        raise ValueError(f"sphere chains exist for m = 1, 2 (got {m})")
    t1, t2, t3 = params(3)
    c = [_exact(v) for v in center]
    r = _exact(radius)
    xi1 = 2 * sp.pi * t1
    eta = sp.pi / 2 * t2
    xi2 = 2 * sp.pi * t3
    components = (
        c[0] + r * sp.cos(eta) * sp.exp(sp.I * xi1),
        c[1] + r * sp.sin(eta) * sp.exp(sp.I * xi2),
    )
    return Chain(3, tuple((s, 1) for s in cube_cell(chart_id, components, 3, 1, f"{chart_id}:sphere")))


def cube_chain(chart_id: str, components: Sequence[sp.Expr], order: int, sign: int = 1, label: str = "") -> Chain:
    """Kuhn split of a cube-parametrized cell as a chain."""
    return Chain(order, tuple((s, 1) for s in cube_cell(chart_id, components, order, sign, label)))
