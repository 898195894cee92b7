"""
Cech-de Rham Cochains
=====================
Cochains of the two-set covering {V0, V1}: (omega0 on V0, omega1 on V1, omega01 on V01).

- delta(omega0, omega1) = omega1 - omega0 on the overlap
- D(c) = (d omega0, d omega1, omega1 - omega0 - d omega01)
- collate(c) = rho0 omega0 + sum_nu (rho1_nu omega1 + d rho1_nu ^ omega01), which equals
  rho0 omega0 + rho1 omega1 - d rho0 ^ omega01
"""

from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from chernloc.layers.fields_forms.form import Form, SceneForm, exterior_derivative, wedge
from chernloc.layers.fields_forms.sampling import random_polynomial_form
from chernloc.layers.geometry.atlas import Atlas
from chernloc.layers.geometry.partition import PartitionOfUnity
from chernloc.utils.errors import ChartMismatchError, DimensionMismatchError


def piece_on(form: SceneForm, chart_id: str, atlas: Atlas) -> Form:
    """The piece of a scene form on a chart, pulled from another chart when missing."""
    if chart_id in form.charts():
        return form.on(chart_id)
    for source in form.charts():
        if atlas.transition(chart_id, source) is not None:
            return atlas.pull_form(form.on(source), chart_id)
    raise ChartMismatchError(f"scene form cannot be moved onto chart {chart_id!r}")


def _zero_like(form: SceneForm, degree: int) -> SceneForm:
    return SceneForm.from_mapping(degree, {cid: Form.zero(cid, piece.dimension, degree) for cid, piece in form})


@dataclass(frozen=True)
class CechCochain:
    """
    Two-set Cech-de Rham cochain of total degree r.

    Attributes:
        degree: r
        omega0: r-form on V0
        omega1: r-form on V1
        omega01: (r-1)-form on V01, None in degree 0
    """

    degree: int
    omega0: SceneForm
    omega1: SceneForm
    omega01: Optional[SceneForm] = None

    def __post_init__(self):
        if self.omega0.degree != self.degree or self.omega1.degree != self.degree:
            raise DimensionMismatchError(f"cochain of degree {self.degree} with components of degree {self.omega0.degree}, {self.omega1.degree}")
        if self.degree > 0 and self.omega01 is None:
            raise DimensionMismatchError(f"degree-{self.degree} cochain needs an overlap component")
        if self.omega01 is not None and self.omega01.degree != self.degree - 1:
            raise DimensionMismatchError(f"overlap component of degree {self.omega01.degree} in a degree-{self.degree} cochain")

    def is_zero(self) -> bool:
        parts = [self.omega0, self.omega1] + ([self.omega01] if self.omega01 is not None else [])
        return all(piece.is_zero() for part in parts for _, piece in part)

    def components(self) -> Dict[str, Optional[SceneForm]]:
        return {"omega0": self.omega0, "omega1": self.omega1, "omega01": self.omega01}


def cochain_from_forms(omega0: SceneForm, omega1: SceneForm, omega01: Optional[SceneForm] = None) -> CechCochain:
    if omega01 is None and omega0.degree > 0:
        omega01 = _zero_like(omega0, omega0.degree - 1)
    return CechCochain(omega0.degree, omega0, omega1, omega01)


def delta(omega0: SceneForm, omega1: SceneForm) -> SceneForm:
    """Cech difference on the overlap: omega1 - omega0 (same charts)."""
    return omega1 - omega0


def apply_d(c: CechCochain) -> CechCochain:
    """D(c) = (d omega0, d omega1, omega1 - omega0 - d omega01)."""
    d0 = c.omega0.map(exterior_derivative)
    d1 = c.omega1.map(exterior_derivative)
    overlap = delta(c.omega0, c.omega1)
    if c.omega01 is not None:
        overlap = overlap - c.omega01.map(exterior_derivative)
    return CechCochain(c.degree + 1, d0, d1, overlap)


def restrict_global(form: SceneForm) -> CechCochain:
    """(omega|V0, omega|V1, 0)."""
    return cochain_from_forms(form, form)


def collate(c: CechCochain, partition: PartitionOfUnity, atlas: Atlas) -> SceneForm:
    """
    The global form rho0 omega0 + sum_nu (rho1_nu omega1 + d rho1_nu ^ omega01), chart-wise;
    terms whose partition function is identically zero on a chart are dropped.
    """
    pieces = {}
    for chart in atlas.charts:
        total = Form.zero(chart.id, chart.dimension, c.degree)
        rho0 = partition.rho0_on(chart.id)
        if rho0 != 0:
            total = total + piece_on(c.omega0, chart.id, atlas).scale(rho0)
        for nu in range(len(partition.rho1)):
            rho1 = partition.rho1_on(nu, chart.id)
            if rho1 == 0:
                continue
            total = total + piece_on(c.omega1, chart.id, atlas).scale(rho1)
            if c.omega01 is not None:
                overlap = piece_on(c.omega01, chart.id, atlas)
                total = total + wedge(partition.d_rho1(nu, chart.id, chart.dimension), overlap)
        pieces[chart.id] = total
    return SceneForm.from_mapping(c.degree, pieces)


def random_cochain(rng: np.random.Generator, chart_id: str, dimension: int, degree: int, max_degree: int = 2) -> CechCochain:
    """Cochain with random polynomial components on a single chart."""

    def draw(k: int) -> SceneForm:
        return SceneForm.from_mapping(k, {chart_id: random_polynomial_form(rng, chart_id, dimension, k, max_degree)})

    omega01 = draw(degree - 1) if degree > 0 else None
    return CechCochain(degree, draw(degree), draw(degree), omega01)
