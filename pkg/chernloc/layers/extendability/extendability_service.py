"""
Extendability Service
=====================
This service handles the extendability layer responsibilities:
- Pullbacks of ambient holomorphic 1-forms to a parametrized curve germ
- Power-series primitives of the pulled-back forms
- Truncated membership of a primitive in the algebra generated by the map's components
- Certificate checks, truncation sweeps and the obstruction report
"""

import logging
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import sympy as sp

from chernloc.config.settings import Settings, get_settings
from chernloc.layers.extendability.membership import Membership, certificate_residual, subalgebra_membership
from chernloc.layers.extendability.series import (
    Monomial,
    TruncatedSeries,
    parametrization,
    primitive_1d,
    pullback_series,
)
from chernloc.layers.fields_forms.form import ChartMap, Form, parse_form, pullback
from chernloc.layers.fields_forms.scalar_field import parse_field
from chernloc.models.data_models import ObstructionReport, SweepEntry
from chernloc.utils.errors import InvariantViolation

logger = logging.getLogger(__name__)

CURVE_CHART = "curve"
AMBIENT_CHART = "ambient"

# z -> (z^5, z^6 + z^7) and the closed holomorphic form z1 dz2
CUSP_MAP = ("z1**5", "z1**6 + z1**7")
CUSP_FORM = "z1*dz2"


class ExtendabilityService:
    """
    Service class for the truncated extendability obstruction.
    """

    def __init__(self, settings: Optional[Settings] = None):
        """
        Initialize the extendability service.

        Args:
            settings: Optional settings; defaults to the process-wide settings
        """
        self.settings = settings or get_settings()

    def parametrization(self, components: Sequence, max_degree: int) -> Tuple[TruncatedSeries, ...]:
        """Component series of a map given as expressions (or text) in z1."""
        fields = [parse_field(c, 1) if isinstance(c, str) else sp.sympify(c) for c in components]
        return parametrization(fields, max_degree)

    def pullback_series(self, monomial: Monomial, f: Sequence[TruncatedSeries], max_degree: int) -> TruncatedSeries:
        return pullback_series(monomial, f, max_degree)

    def pull_back_form(self, omega: Form, components: Sequence) -> Form:
        """f^*(omega) on the curve chart, for omega on C^m and f with m components in z1."""
        fields = tuple(parse_field(c, 1) if isinstance(c, str) else sp.sympify(c) for c in components)
        return pullback(ChartMap(CURVE_CHART, omega.chart_id, 1, fields), omega)

    def primitive_1d(self, form: Form, max_degree: Optional[int] = None) -> TruncatedSeries:
        return primitive_1d(form, max_degree)

    def subalgebra_membership(self, h: TruncatedSeries, f: Sequence[TruncatedSeries], max_degree: int) -> Membership:
        return subalgebra_membership(h, f, max_degree)

    def verify_certificate(self, h: TruncatedSeries, f: Sequence[TruncatedSeries], membership: Membership) -> bool:
        """
        Whether a FEASIBLE certificate reproduces h exactly, up to a constant, mod z^(N+1).

        Raises:
            ValueError: If the membership is not FEASIBLE
        """
        if not membership.feasible:
            raise ValueError("only FEASIBLE outcomes carry a certificate")
        residual = certificate_residual(h, f, membership.certificate, membership.max_degree)
        if not residual.is_zero():
            logger.error("[EXTEND] certificate residual %s at N=%d", residual.as_expr(), membership.max_degree)
        return residual.is_zero()

    def sweep(self, h: TruncatedSeries, components: Sequence, degrees: Iterable[int]) -> Dict[int, Membership]:
        """Membership at each truncation degree, with the map's series re-truncated per degree."""
        outcomes = {}
        for n in degrees:
            outcomes[n] = self.subalgebra_membership(h, self.parametrization(components, n), n)
        return outcomes

    def sweep_entries(self, h: TruncatedSeries, components: Sequence, max_degree: int) -> List[SweepEntry]:
        """Sweep 1..N in ascending order, re-checking the certificate of every FEASIBLE truncation."""
        entries = []
        for n, outcome in self.sweep(h, components, range(1, max_degree + 1)).items():
            verified = self.verify_certificate(h, self.parametrization(components, n), outcome) if outcome.feasible else None
            entries.append(SweepEntry(degree=n, status=outcome.status, certificate_verified=verified))
        return entries

    def bloom_herrera(
        self, max_degree: int, omega: Optional[str] = None, components: Optional[Sequence[str]] = None
    ) -> ObstructionReport:
        """
        Pull omega back through the curve germ, integrate, and test the primitive for membership.

        Args:
            max_degree: truncation degree N
            omega: holomorphic 1-form on C^m in the form grammar; defaults to z1*dz2
            components: the germ z -> (f_1, ..., f_m) in z1; defaults to (z1^5, z1^6 + z1^7)

        Returns:
            ObstructionReport with the pulled-back form, primitive, membership and the ascending sweep 1..N

        Raises:
            LogarithmicTermError: If the pulled-back form has a z^-1 term
            ExpressionParseError: If omega or the map does not parse
        """
        components = tuple(components or CUSP_MAP)
        form = parse_form(omega or CUSP_FORM, AMBIENT_CHART, len(components))
        pulled = self.pull_back_form(form, components)
        h = self.primitive_1d(pulled, max_degree)
        f = self.parametrization(components, max_degree)

        membership = self.subalgebra_membership(h, f, max_degree)
        if membership.feasible and not self.verify_certificate(h, f, membership):
            raise InvariantViolation(f"FEASIBLE certificates reproduce the primitive (N={max_degree})")
        sweep = self.sweep_entries(h, components, max_degree)

        if membership.feasible:
            conclusion = (
                f"no obstruction up to degree {max_degree}: the primitive is a polynomial in the map's "
                "components modulo constants; the test is only necessary, so [omega] is not shown to vanish"
            )
        else:
            conclusion = (
                f"obstruction at degree {membership.obstruction_degree}: the primitive is not a power series "
                "in the map's components, so [omega] is a nonzero extendable class and the Poincare lemma fails"
            )
        logger.info("[EXTEND] N=%d status=%s obstruction=%s", max_degree, membership.status.value, membership.obstruction_degree)
        return ObstructionReport(
            pulled_back=str(pulled),
            primitive=h.as_strings(),
            membership=membership.as_model(),
            sweep=sweep,
            conclusion=conclusion,
        )

