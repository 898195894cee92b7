"""
Scalar Fields
=============
Symbolic complex-valued fields on a chart domain, built on sympy.

- Coordinates z1..zn and their conjugates zbar1..zbarn are independent symbols, so the
  Wirtinger derivatives d/dz_i, d/dzbar_i are plain partial derivatives
- conj swaps the two symbol families and conjugates constants (I -> -I)
- Bump is B(t) = exp(1/(t^2 - 1)) on |t| < 1 and 0 elsewhere; B'(t) = -2t/(t^2-1)^2 B(t)
- varsigma is the real fibre parameter used by family connections
- Numeric evaluation compiles expressions with lambdify onto numpy
"""

import re
from functools import lru_cache
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

import numpy as np
import sympy as sp
from sympy.parsing.sympy_parser import (
    parse_expr,
    rationalize,
    standard_transformations,
)

from chernloc.utils.errors import ExpressionParseError, PoleError

VARSIGMA = sp.Symbol("varsigma", real=True)

_HOLO = re.compile(r"^z(\d+)$")
_ANTI = re.compile(r"^zbar(\d+)$")


@lru_cache(maxsize=None)
def z(i: int) -> sp.Symbol:
    """Holomorphic coordinate z_i (1-based)."""
    return sp.Symbol(f"z{i}")


@lru_cache(maxsize=None)
def zbar(i: int) -> sp.Symbol:
    """Conjugate coordinate zbar_i (1-based)."""
    return sp.Symbol(f"zbar{i}")


@lru_cache(maxsize=None)
def param(j: int) -> sp.Symbol:
    """Real parameter t_j of a parametrized simplex (1-based)."""
    return sp.Symbol(f"t{j}", real=True)


def coordinates(n: int) -> Tuple[sp.Symbol, ...]:
    return tuple(z(i) for i in range(1, n + 1))


def conjugates(n: int) -> Tuple[sp.Symbol, ...]:
    return tuple(zbar(i) for i in range(1, n + 1))


class Bump(sp.Function):
    """
    Compactly supported bump B(t) with B'(t) = -2t/(t^2 - 1)^2 * B(t).
    """

    nargs = 1

    @classmethod
    def eval(cls, t):
        if t.is_Number and t.is_extended_real:
            if abs(t) >= 1:
                return sp.S.Zero
            return sp.exp(1 / (t ** 2 - 1))
        return None

    def fdiff(self, argindex=1):
        t = self.args[0]
        return -2 * t / (t ** 2 - 1) ** 2 * Bump(t)


def numpy_bump(t):
    """numpy implementation of Bump on (possibly complex-typed) real arguments."""
    tr = np.real(np.asarray(t))
    inside = np.abs(tr) < 1.0
    safe = np.where(inside, tr, 0.0)
    return np.where(inside, np.exp(1.0 / (safe * safe - 1.0)), 0.0)


def _swap_map(expr: sp.Expr) -> Dict[sp.Symbol, sp.Symbol]:
    mapping = {}
    for symbol in expr.free_symbols:
        holo = _HOLO.match(symbol.name)
        if holo:
            mapping[symbol] = zbar(int(holo.group(1)))
            continue
        anti = _ANTI.match(symbol.name)
        if anti:
            mapping[symbol] = z(int(anti.group(1)))
    return mapping


def conj(expr) -> sp.Expr:
    """
    Complex conjugate of a field: swap z_i <-> zbar_i and conjugate constants.
    Real symbols (t_j, varsigma) are left alone.
    """
    expr = sp.sympify(expr)
    return expr.xreplace(_swap_map(expr)).xreplace({sp.I: -sp.I})


def real_part(expr) -> sp.Expr:
    expr = sp.sympify(expr)
    return (expr + conj(expr)) / 2


def imag_part(expr) -> sp.Expr:
    expr = sp.sympify(expr)
    return (expr - conj(expr)) / (2 * sp.I)


def partial(expr, i: int, anti: bool = False) -> sp.Expr:
    """
    Wirtinger derivative d/dz_i (anti=False) or d/dzbar_i (anti=True).
    """
    return sp.diff(expr, zbar(i) if anti else z(i))


def is_holomorphic(expr, n: int) -> bool:
    """Structural holomorphy check: every d/dzbar_i is identically zero."""
    expr = sp.sympify(expr)
    return all(sp.diff(expr, zbar(i)) == 0 for i in range(1, n + 1))


def chart_symbols(n: int) -> Tuple[sp.Symbol, ...]:
    """Argument order of compiled chart fields: z1..zn, zbar1..zbarn, varsigma."""
    return coordinates(n) + conjugates(n) + (VARSIGMA,)


@lru_cache(maxsize=8192)
def compile_expression(expr: sp.Expr, symbols: Tuple[sp.Symbol, ...]):
    """lambdify an expression over the given argument symbols (cached)."""
    return sp.lambdify(symbols, expr, modules=[{"Bump": numpy_bump}, "numpy"])


def evaluate_field(
    expr,
    points: np.ndarray,
    varsigma: float = 0.0,
    what: str = "field",
) -> np.ndarray:
    """
    Evaluate a field at N chart points.

    Args:
        expr: sympy expression in z_i, zbar_i (and optionally varsigma)
        points: complex array of shape (N, n)
        varsigma: value of the fibre parameter
        what: label used in pole errors

    Returns:
        complex array of shape (N,)

    Raises:
        PoleError: If any value is not finite
    """
    expr = sp.sympify(expr)
    points = np.atleast_2d(np.asarray(points, dtype=complex))
    count, n = points.shape
    if expr.is_Number:
        value = complex(expr)
        return np.full(count, value, dtype=complex)
    fn = compile_expression(expr, chart_symbols(n))
    args = [points[:, i] for i in range(n)] + [np.conj(points[:, i]) for i in range(n)] + [varsigma]
    with np.errstate(all="ignore"):
        values = np.asarray(fn(*args), dtype=complex)
    values = np.broadcast_to(values, (count,)).copy()
    bad = ~np.isfinite(values)
    if bad.any():
        where = points[int(np.argmax(bad))]
        raise PoleError(f"{what} is not finite at {tuple(where)}", where)
    return values


# ---------------------------------------------------------------------------
# Expression grammar
# ---------------------------------------------------------------------------

TRANSFORMATIONS = standard_transformations + (rationalize,)


def grammar_namespace(n: int, params: Optional[Mapping[str, object]], extra: Iterable[sp.Symbol] = ()):
    namespace = {
        "i": sp.I,
        "I": sp.I,
        "pi": sp.pi,
        "conj": conj,
        "bump": Bump,
        "exp": sp.exp,
        "cos": sp.cos,
        "sin": sp.sin,
        "re": real_part,
        "im": imag_part,
        "varsigma": VARSIGMA,
        "Integer": sp.Integer,
        "Rational": sp.Rational,
        "Float": sp.Float,
        "Symbol": sp.Symbol,
    }
    for k in range(1, n + 1):
        namespace[f"z{k}"] = z(k)
    for symbol in extra:
        namespace[symbol.name] = symbol
    for name, value in (params or {}).items():
        namespace[name] = sp.nsimplify(value, rational=True)
    return namespace


def parse_field(
    text: str,
    dimension: int,
    params: Optional[Mapping[str, object]] = None,
    extra_symbols: Sequence[sp.Symbol] = (),
) -> sp.Expr:
    """
    Parse a field expression of the scene grammar.

    Args:
        text: infix expression, e.g. "z1**2 + conj(z1)/2 + bump(re(z1))"
        dimension: chart dimension n (z1..zn allowed)
        params: scene parameters substituted as exact numbers
        extra_symbols: additional allowed symbols (simplex parameters t_j)

    Returns:
        sympy expression

    Raises:
        ExpressionParseError: If the text does not parse or uses unknown names
    """
    if not isinstance(text, str):
        return sp.nsimplify(text, rational=True)
    namespace = grammar_namespace(dimension, params, extra_symbols)
    try:
        expr = parse_expr(text, local_dict=namespace, global_dict={"__builtins__": {}}, transformations=TRANSFORMATIONS)
    except Exception as exc:
        raise ExpressionParseError(f"cannot parse expression {text!r}: {exc}") from exc
    expr = sp.sympify(expr)
    allowed = set(chart_symbols(dimension)) | set(extra_symbols)
    unknown = sorted(s.name for s in expr.free_symbols if s not in allowed)
    if unknown:
        raise ExpressionParseError(f"unknown names {unknown} in expression {text!r}")
    return expr
