"""
Truncated Series
================
Exact power series in one variable, truncated at a degree N.

- Coefficients are sympy numbers (rationals, Gaussian rationals); no floating point
- Products truncate at the smaller of the two truncation degrees
- Generators of a parametrization's pullback algebra come from the component valuations
"""

from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import sympy as sp

from chernloc.layers.fields_forms.form import Form, dz_label
from chernloc.layers.fields_forms.scalar_field import z
from chernloc.utils.errors import DimensionMismatchError, InputError, LogarithmicTermError

Monomial = Tuple[int, ...]


def _laurent_terms(expr, variable: sp.Symbol) -> Iterator[Tuple[int, sp.Expr]]:
    """(exponent, coefficient) pairs of a Laurent polynomial with constant coefficients."""
    for term in sp.Add.make_args(sp.expand(sp.sympify(expr))):
        if term == 0:
            continue
        coeff, exponent = term.as_coeff_exponent(variable)
        if coeff.free_symbols or not exponent.is_Integer:
            raise InputError(f"{term} is not a constant multiple of an integer power of {variable}")
        yield int(exponent), coeff


@dataclass(frozen=True)
class TruncatedSeries:
    """
    sum_n c_n z^n for 0 <= n <= max_degree.

    Attributes:
        max_degree: truncation degree N
        coefficients: nonzero coefficients keyed by degree
    """

    max_degree: int
    coefficients: Dict[int, sp.Expr] = field(default_factory=dict)

    def __post_init__(self):
        if self.max_degree < 0:
            raise ValueError(f"truncation degree must be >= 0 (got {self.max_degree})")
        cleaned = {}
        for n, c in self.coefficients.items():
            c = sp.expand(sp.sympify(c))
            if n < 0:
                raise ValueError(f"power series have no degree {n} term")
            if n <= self.max_degree and c != 0:
                cleaned[n] = c
        object.__setattr__(self, "coefficients", dict(sorted(cleaned.items())))

    @classmethod
    def from_expr(cls, expr, max_degree: int, variable: Optional[sp.Symbol] = None) -> "TruncatedSeries":
        """
        Series of a polynomial expression in one variable (z1 by default).

        Raises:
            InputError: If the expression is not a polynomial with constant coefficients
        """
        variable = variable if variable is not None else z(1)
        coefficients: Dict[int, sp.Expr] = {}
        for n, c in _laurent_terms(expr, variable):
            if n < 0:
                raise InputError(f"{expr} has a pole at 0")
            coefficients[n] = coefficients.get(n, sp.Integer(0)) + c
        return cls(max_degree, coefficients)

    @classmethod
    def one(cls, max_degree: int) -> "TruncatedSeries":
        return cls(max_degree, {0: sp.Integer(1)})

    def coefficient(self, n: int) -> sp.Expr:
        return self.coefficients.get(n, sp.Integer(0))

    def is_zero(self) -> bool:
        return not self.coefficients

    def valuation(self) -> Optional[int]:
        """Lowest degree with a nonzero coefficient; None for the zero series."""
        return next(iter(self.coefficients), None)

    def degree(self) -> Optional[int]:
        return max(self.coefficients) if self.coefficients else None

    def truncate(self, max_degree: int) -> "TruncatedSeries":
        return TruncatedSeries(min(max_degree, self.max_degree), self.coefficients)

    def at_degree(self, max_degree: int) -> "TruncatedSeries":
        """The same coefficients read at truncation max_degree; absent degrees count as zero."""
        return TruncatedSeries(max_degree, self.coefficients)

    def without_constant(self) -> "TruncatedSeries":
        return TruncatedSeries(self.max_degree, {n: c for n, c in self.coefficients.items() if n != 0})

    def scale(self, value) -> "TruncatedSeries":
        value = sp.sympify(value)
        return TruncatedSeries(self.max_degree, {n: value * c for n, c in self.coefficients.items()})

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        coefficients = dict(self.coefficients)
        for n, c in other.coefficients.items():
            coefficients[n] = coefficients.get(n, sp.Integer(0)) + c
        return TruncatedSeries(min(self.max_degree, other.max_degree), coefficients)

    def __neg__(self) -> "TruncatedSeries":
        return self.scale(-1)

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return self + (-other)

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        top = min(self.max_degree, other.max_degree)
        coefficients: Dict[int, sp.Expr] = {}
        for n, a in self.coefficients.items():
            for k, b in other.coefficients.items():
                if n + k <= top:
                    coefficients[n + k] = coefficients.get(n + k, sp.Integer(0)) + a * b
        return TruncatedSeries(top, coefficients)

    def __pow__(self, exponent: int) -> "TruncatedSeries":
        if exponent < 0:
            raise ValueError("negative powers of truncated series are not supported")
        result = TruncatedSeries.one(self.max_degree)
        for _ in range(exponent):
            result = result * self
        return result

    def as_expr(self, variable: Optional[sp.Symbol] = None) -> sp.Expr:
        variable = variable if variable is not None else z(1)
        return sp.Add(*[c * variable**n for n, c in self.coefficients.items()])

    def as_strings(self) -> Dict[str, str]:
        return {str(n): str(c) for n, c in self.coefficients.items()}


def parametrization(components: Sequence, max_degree: int) -> Tuple[TruncatedSeries, ...]:
    """
    Truncated component series of a map germ z -> (f_1(z), ..., f_m(z)) with f(0) = 0.

    Raises:
        InputError: If a component is not a polynomial or the map does not pass through 0
    """
    series = tuple(TruncatedSeries.from_expr(c, max_degree) for c in components)
    if any(s.coefficient(0) != 0 for s in series):
        raise InputError("the parametrization must send 0 to the origin")
    return series


def pullback_series(monomial: Sequence[int], f: Sequence[TruncatedSeries], max_degree: int) -> TruncatedSeries:
    """
    f_1^a_1 * ... * f_m^a_m truncated at max_degree.

    Raises:
        DimensionMismatchError: If the monomial and the map have different lengths
        ValueError: If an exponent is negative
    """
    if len(monomial) != len(f):
        raise DimensionMismatchError(f"monomial {tuple(monomial)} for a map with {len(f)} components")
    result = TruncatedSeries.one(max_degree)
    for exponent, component in zip(monomial, f):
        if exponent < 0:
            raise ValueError(f"monomial exponents are >= 0 (got {tuple(monomial)})")
        result = result * component.truncate(max_degree) ** exponent
    return result


def generator_monomials(f: Sequence[TruncatedSeries], max_degree: int) -> List[Monomial]:
    """
    Nonconstant monomials whose pullbacks can reach degree max_degree: sum a_i v_i <= N with
    v_i the valuation of f_i. Zero components only enter with exponent 0.
    """
    valuations = [s.valuation() for s in f]
    if any(v == 0 for v in valuations):
        raise InputError("the parametrization must send 0 to the origin")
    monomials: List[Monomial] = []

    def extend(prefix: Tuple[int, ...], weight: int) -> None:
        i = len(prefix)
        if i == len(valuations):
            if any(prefix):
                monomials.append(prefix)
            return
        v = valuations[i]
        top = 0 if v is None else (max_degree - weight) // v
        for a in range(top + 1):
            extend(prefix + (a,), weight + a * (v or 0))

    extend((), 0)
    return sorted(monomials, key=lambda m: (sum(a * (v or 0) for a, v in zip(m, valuations)), m))


def primitive_1d(form: Form, max_degree: Optional[int] = None) -> TruncatedSeries:
    """
    Coefficient-wise antiderivative of c(z) dz with constant term 0.

    Args:
        form: holomorphic 1-form on a one-dimensional chart, polynomial coefficient
        max_degree: truncation degree; defaults to one above the coefficient degree

    Raises:
        LogarithmicTermError: If the coefficient has a z^-1 term
        DimensionMismatchError: If the form is not a 1-form in one variable
        InputError: If the coefficient is not a polynomial or the form has a dzbar part
    """
    if form.dimension != 1 or form.degree != 1:
        raise DimensionMismatchError(f"primitives are taken of 1-forms in one variable, not {form.degree}-forms on C^{form.dimension}")
    basis = (dz_label(1),)
    if any(b != basis for b, _ in form.terms):
        raise InputError(f"{form} is not a multiple of dz")
    coefficients: Dict[int, sp.Expr] = {}
    for n, c in _laurent_terms(form.coefficient(basis), z(1)):
        if n == -1:
            raise LogarithmicTermError(f"{c}/z has no power-series primitive")
        if n < -1:
            raise InputError(f"coefficient of {form} is not a polynomial")
        coefficients[n + 1] = coefficients.get(n + 1, sp.Integer(0)) + c / (n + 1)
    top = max_degree if max_degree is not None else max(coefficients, default=0)
    return TruncatedSeries(top, coefficients)
