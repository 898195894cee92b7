"""
Truncated Subalgebra Membership
===============================
Decide whether h is, up to a constant and modulo z^(N+1), a polynomial in the pullback
generators f_1, ..., f_m of a parametrization.

- Unknowns are the coefficients c_a of the monomials f^a with weight <= N
- Constraints match degrees 1..N; degree 0 absorbs the constant
- Consistency is decided by exact sympy rank; no floating point enters
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import sympy as sp

from chernloc.layers.extendability.series import Monomial, TruncatedSeries, generator_monomials, pullback_series
from chernloc.models.data_models import Feasibility, MembershipResult

logger = logging.getLogger(__name__)


def certificate_key(monomial: Monomial) -> str:
    return "c_" + "_".join(str(a) for a in monomial)


@dataclass(frozen=True)
class Membership:
    """
    Outcome of one truncated membership test.

    Attributes:
        status: FEASIBLE or INFEASIBLE
        max_degree: truncation degree N
        obstruction_degree: lowest degree at which the system is inconsistent
        certificate: exact coefficients of a solution when FEASIBLE
    """

    status: Feasibility
    max_degree: int
    obstruction_degree: Optional[int] = None
    certificate: Dict[Monomial, sp.Expr] = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return self.status == Feasibility.FEASIBLE

    def as_model(self) -> MembershipResult:
        return MembershipResult(
            status=self.status,
            max_degree=self.max_degree,
            obstruction_degree=self.obstruction_degree,
            certificate={certificate_key(m): str(c) for m, c in self.certificate.items()},
        )


class _System:
    """Rows 1..D of the matching system, for any D up to N."""

    def __init__(self, h: TruncatedSeries, f: Sequence[TruncatedSeries], max_degree: int):
        self.max_degree = max_degree
        self.target = h.at_degree(max_degree)
        self.monomials: List[Monomial] = generator_monomials(f, max_degree)
        self.columns = [pullback_series(m, f, max_degree) for m in self.monomials]

    def matrices(self, degree: int):
        a = sp.Matrix(degree, len(self.columns), lambda i, j: self.columns[j].coefficient(i + 1))
        b = sp.Matrix(degree, 1, lambda i, _: self.target.coefficient(i + 1))
        return a, b

    def consistent(self, degree: int) -> bool:
        if degree < 1:
            return True
        if not self.columns:
            return all(self.target.coefficient(n) == 0 for n in range(1, degree + 1))
        a, b = self.matrices(degree)
        return a.rank() == a.row_join(b).rank()

    def solve(self) -> Dict[Monomial, sp.Expr]:
        if not self.columns:
            return {}
        a, b = self.matrices(self.max_degree)
        solution, parameters = a.gauss_jordan_solve(b)
        solution = solution.xreplace({p: 0 for p in parameters})
        return {m: c for m, c in zip(self.monomials, solution) if c != 0}


def subalgebra_membership(h: TruncatedSeries, f: Sequence[TruncatedSeries], max_degree: int) -> Membership:
    """
    Truncated membership of h in the algebra generated by the components of f.

    Args:
        h: series to express; terms above max_degree are dropped
        f: component series of the parametrization
        max_degree: truncation degree N >= 1

    Returns:
        Membership with an exact certificate, or the lowest inconsistent degree
    """
    if max_degree < 1:
        raise ValueError(f"truncation degree must be >= 1 (got {max_degree})")
    if h.degree() is not None and h.degree() > max_degree:
        logger.debug("[EXTEND] truncating h of degree %d at N=%d", h.degree(), max_degree)
    system = _System(h, f, max_degree)
    if system.consistent(max_degree):
        certificate = system.solve()
        logger.debug("[EXTEND] N=%d FEASIBLE monomials=%d", max_degree, len(system.monomials))
        return Membership(Feasibility.FEASIBLE, max_degree, certificate=certificate)
    # Consistency of rows 1..D is monotone in D, so the first failure is found by bisection
    low, high = 1, max_degree
    while low < high:
        middle = (low + high) // 2
        if system.consistent(middle):
            low = middle + 1
        else:
            high = middle
    logger.debug("[EXTEND] N=%d INFEASIBLE at degree %d", max_degree, low)
    return Membership(Feasibility.INFEASIBLE, max_degree, obstruction_degree=low)


def certificate_residual(
    h: TruncatedSeries, f: Sequence[TruncatedSeries], certificate: Dict[Monomial, sp.Expr], max_degree: int
) -> TruncatedSeries:
    """sum_a c_a f^a - h modulo constants and z^(N+1); the zero series when the certificate holds."""
    total = TruncatedSeries(max_degree)
    for monomial, c in certificate.items():
        total = total + pullback_series(monomial, f, max_degree).scale(c)
    return (total - h.at_degree(max_degree)).without_constant()
