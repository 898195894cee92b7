"""
Foliation Germs
===============
Germs a(h, y) h d/dh + b(h, y) d/dy of holomorphic vector fields on a two-variable chart
(h = z1, y = z2) leaving the divisor {h = 0} invariant.

- Fields restricted to the divisor are expressed on the y-line chart as functions of its z1
- The induced normal connection along the divisor is theta0 = -(a(0, y) / b(0, y)) dy
"""

from dataclasses import dataclass

import sympy as sp

from chernloc.layers.fields_forms.form import Form, dz_label
from chernloc.layers.fields_forms.scalar_field import is_holomorphic, z, zbar
from chernloc.utils.errors import InvariantViolation

LINE_CHART = "Y"


def on_divisor(expr) -> sp.Expr:
    """f(0, y) written in the coordinate z1 of the y-line."""
    # A bare symbol xreplaces to the mapped value itself, which must stay a sympy object
    expr = sp.sympify(expr).xreplace({z(1): sp.S.Zero, zbar(1): sp.S.Zero})
    return sp.sympify(expr).xreplace({z(2): z(1), zbar(2): zbar(1)})


@dataclass(frozen=True)
class FoliationGerm:
    """
    Generator of a foliation near an invariant line.

    Attributes:
        a: coefficient of h d/dh
        b: coefficient of d/dy
    """

    a: sp.Expr
    b: sp.Expr

    def __post_init__(self):
        for name, value in (("a", self.a), ("b", self.b)):
            if not is_holomorphic(value, 2):
                raise InvariantViolation(f"{name}(h, y) is holomorphic")
        if sp.simplify(on_divisor(self.b)) == 0:
            raise InvariantViolation("b(0, y) is not identically zero")

    @classmethod
    def from_text(cls, a, b) -> "FoliationGerm":
        return cls(sp.sympify(a), sp.sympify(b))

    def ratio(self) -> sp.Expr:
        """a(0, y) / b(0, y) on the y-line."""
        return sp.cancel(on_divisor(self.a) / on_divisor(self.b))

    def normal_connection_form(self, chart_id: str = LINE_CHART) -> Form:
        return Form.covector(chart_id, 1, dz_label(1), -self.ratio())

    def residue_form(self, chart_id: str = LINE_CHART) -> Form:
        """(a(0, y) / b(0, y)) dy."""
        return Form.covector(chart_id, 1, dz_label(1), self.ratio())
