"""
Partitions of Unity
===================
Extendable partition of unity subordinate to a two-set covering, built from the bump B.

For a disk with q = |z - c|^2, q_in = inner^2, q_out = outer^2:

    x = A (q - q_in) / (q + q_out),   A = 2 q_out / (q_out - q_in)

so x = 0 on the inner circle, x = 1 on the outer circle and x < A everywhere, also in
other charts after cancellation. With h(x) = B(2x/(A+1) - 1)^sharpness (positive exactly
for 0 < x < A+1):

    rho1_nu = h(1 - x) / (h(1 - x) + h(x)),   rho0 = 1 - sum_nu rho1_nu

rho1_nu is 1 on the closed inner disk and 0 outside the outer disk.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np
import sympy as sp

from chernloc.layers.fields_forms.form import Form, field_differential
from chernloc.layers.fields_forms.scalar_field import Bump, evaluate_field
from chernloc.layers.geometry.covering import Covering, SingularDisk

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BumpProfile:
    """Family of transition profiles; different sharpness values give different partitions."""

    sharpness: int = 1

    def h(self, x: sp.Expr, width: sp.Expr) -> sp.Expr:
        return Bump(2 * x / width - 1) ** self.sharpness


def _transition_variable(disk: SingularDisk, q: sp.Expr) -> Tuple[sp.Expr, sp.Expr]:
    q_in = sp.nsimplify(disk.inner, rational=True) ** 2
    q_out = sp.nsimplify(disk.outer, rational=True) ** 2
    scale = 2 * q_out / (q_out - q_in)
    x = sp.cancel(scale * (q - q_in) / (q + q_out))
    return x, scale + 1


@dataclass(frozen=True)
class PartitionOfUnity:
    """
    rho1 per disk and chart; rho0 is derived.

    Attributes:
        covering: the covering
        profile: bump profile used
        rho1: per disk, a tuple of (chart_id, field)
    """

    covering: Covering
    profile: BumpProfile
    rho1: Tuple[Tuple[Tuple[str, sp.Expr], ...], ...]

    def rho1_on(self, nu: int, chart_id: str) -> sp.Expr:
        for cid, value in self.rho1[nu]:
            if cid == chart_id:
                return value
        return sp.S.Zero

    def rho0_on(self, chart_id: str) -> sp.Expr:
        return 1 - sum((self.rho1_on(nu, chart_id) for nu in range(len(self.rho1))), sp.S.Zero)

    def d_rho1(self, nu: int, chart_id: str, dimension: int) -> Form:
        return field_differential(self.rho1_on(nu, chart_id), chart_id, dimension)

    def d_rho0(self, chart_id: str, dimension: int) -> Form:
        return field_differential(self.rho0_on(chart_id), chart_id, dimension)

    def evaluate_rho1(self, nu: int, chart_id: str, points: np.ndarray) -> np.ndarray:
        return evaluate_field(self.rho1_on(nu, chart_id), points, what=f"rho1[{nu}]").real

    def evaluate_rho0(self, chart_id: str, points: np.ndarray) -> np.ndarray:
        return evaluate_field(self.rho0_on(chart_id), points, what="rho0").real

    def sum_residual(self, chart_id: str, points: np.ndarray) -> float:
        """max |rho0 + sum rho1 - 1| at the points."""
        total = self.evaluate_rho0(chart_id, points)
        for nu in range(len(self.rho1)):
            total = total + self.evaluate_rho1(nu, chart_id, points)
        return float(np.max(np.abs(total - 1.0)))


def build_partition_of_unity(covering: Covering, profile: BumpProfile = BumpProfile()) -> PartitionOfUnity:
    """
    Partition of unity subordinate to the covering.

    Raises:
        DegenerateOverlapError: Raised when the covering's disks were built with inner >= outer
    """
    atlas = covering.atlas
    per_disk = []
    for disk in covering.disks:
        q_home = disk.squared_distance()
        pieces: Dict[str, sp.Expr] = {}
        for chart in atlas.charts:
            if chart.id == disk.chart_id:
                q = q_home
            elif atlas.transition(chart.id, disk.chart_id) is not None:
                q = atlas.pull_field(q_home, disk.chart_id, chart.id)
            else:
                continue
            x, width = _transition_variable(disk, q)
            inside = profile.h(1 - x, width)
            outside = profile.h(x, width)
            pieces[chart.id] = inside / (inside + outside)
        per_disk.append(tuple(sorted(pieces.items())))
    logger.debug("[PARTITION] disks=%d sharpness=%d", len(per_disk), profile.sharpness)
    return PartitionOfUnity(covering, profile, tuple(per_disk))
