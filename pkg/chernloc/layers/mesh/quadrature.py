"""
Adaptive Simplex Quadrature
===========================
Integration of a form over a parametrized simplex.

- The standard k-simplex is reached from [0,1]^k by the Duffy map
  x_j = u_j * prod_{i<j} (1 - u_i), Jacobian prod_j (1 - u_j)^(k - j)
- Each cube cell is integrated with tensor Gauss-Legendre; its error is the gap
  between the cell rule and the sum over its 2^k dyadic children
- Cells are refined from a global heap, largest error first, until the summed
  error is below the tolerance or the cell budget is exhausted
"""

import heapq
import logging
from functools import lru_cache
from itertools import count, product
from typing import Callable, List, Tuple

import numpy as np

from chernloc.layers.fields_forms.form import Form, TangentVector, evaluate
from chernloc.layers.mesh.simplices import Simplex
from chernloc.models.data_models import QuadratureResult
from chernloc.utils.errors import ChartMismatchError, DimensionMismatchError, QuadratureError

logger = logging.getLogger(__name__)


@lru_cache(maxsize=None)
def gauss_rule(order: int, k: int) -> Tuple[np.ndarray, np.ndarray]:
    """Tensor Gauss-Legendre nodes/weights on [0,1]^k."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes = 0.5 * (nodes + 1.0)
    weights = 0.5 * weights
    grid = np.array(list(product(nodes, repeat=k))).reshape(-1, k)
    w = np.prod(np.array(list(product(weights, repeat=k))).reshape(-1, k), axis=1)
    return grid, w


def duffy(u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Map cube points (N, k) onto the standard simplex; returns (points, jacobian)."""
    n_points, k = u.shape
    x = np.empty_like(u)
    remaining = np.ones(n_points)
    jacobian = np.ones(n_points)
    for j in range(k):
        x[:, j] = u[:, j] * remaining
        jacobian *= (1.0 - u[:, j]) ** (k - 1 - j)
        remaining = remaining * (1.0 - u[:, j])
    return x, jacobian


def pullback_integrand(a: Form, simplex: Simplex) -> Callable[[np.ndarray], np.ndarray]:
    """
    The function t -> a(phi(t))(d phi/dt_1, ..., d phi/dt_k) on the standard simplex,
    without the orientation sign.

    Raises:
        ChartMismatchError: If form and simplex live on different charts
        DimensionMismatchError: If the degree differs from the simplex dimension
    """
    if a.chart_id != simplex.chart_id:
        raise ChartMismatchError(f"form on {a.chart_id!r} integrated over a simplex in {simplex.chart_id!r}")
    if a.degree != simplex.order:
        raise DimensionMismatchError(f"{a.degree}-form integrated over a {simplex.order}-simplex")

    def integrand(t: np.ndarray) -> np.ndarray:
        points = simplex.map_points(t)
        vectors = [TangentVector.real(v) for v in simplex.tangents(t)]
        return evaluate(a, points, vectors)

    return integrand


class AdaptiveQuadrature:
    """
    Global adaptive cubature over [0,1]^k composed with the Duffy map.
    """

    def __init__(self, order: int = 8, max_cells: int = 2 ** 16):
        """
        Args:
            order: Gauss-Legendre points per direction and cell
            max_cells: Maximum number of leaf cells before giving up
        """
        self.order = order
        self.max_cells = max_cells

    def _children(self, lower: np.ndarray, width: float) -> List[np.ndarray]:
        k = lower.shape[0]
        half = width / 2.0
        return [lower + half * np.array(bits, dtype=float) for bits in product((0, 1), repeat=k)]

    def _evaluate_cells(self, fn, cells: List[np.ndarray], width: float) -> np.ndarray:
        """Rule values of several equal-width cells in one vectorized call."""
        k = cells[0].shape[0]
        grid, weights = gauss_rule(self.order, k)
        u = np.concatenate([lower + width * grid for lower in cells])
        x, jacobian = duffy(u)
        values = fn(x) * jacobian
        per_cell = values.reshape(len(cells), -1) @ (weights * width ** k)
        return per_cell

    def integrate(self, fn: Callable[[np.ndarray], np.ndarray], k: int, tol: float, name: str = "") -> QuadratureResult:
        """
        Integrate fn over the standard k-simplex.

        Raises:
            QuadratureError: If the cell budget is exhausted before the error drops below tol
        """
        if k == 0:
            value = complex(fn(np.zeros((1, 0)))[0])
            return QuadratureResult(value, 0.0, 1)
        tie = count()
        root = np.zeros(k)
        coarse = self._evaluate_cells(fn, [root], 1.0)[0]
        children = self._children(root, 1.0)
        fine = self._evaluate_cells(fn, children, 0.5)
        heap = [(-abs(coarse - fine.sum()), next(tie), root, 1.0, complex(fine.sum()))]
        total_error = abs(coarse - fine.sum())
        total_value = complex(fine.sum())
        leaves = 1
        while total_error > tol:
            if leaves + 2 ** k - 1 > self.max_cells:
                raise QuadratureError(
                    f"quadrature did not converge on {name or 'simplex'}: error {total_error:.3e} after {leaves} cells",
                    simplex=name,
                    cells=leaves,
                    error=total_error,
                )
            neg_error, _, lower, width, value = heapq.heappop(heap)
            total_error += neg_error
            total_value -= value
            half = width / 2.0
            kids = self._children(lower, width)
            grandkids = [g for kid in kids for g in self._children(kid, half)]
            kid_fine = self._evaluate_cells(fn, grandkids, half / 2.0).reshape(len(kids), -1).sum(axis=1)
            kid_coarse = self._evaluate_cells(fn, kids, half)
            for kid, c_val, f_val in zip(kids, kid_coarse, kid_fine):
                err = abs(c_val - f_val)
                heapq.heappush(heap, (-err, next(tie), kid, half, complex(f_val)))
                total_error += err
                total_value += f_val
            leaves += 2 ** k - 1
        # Re-sum from the leaves to avoid drift in the running total
        total_value = complex(sum(item[4] for item in sorted(heap, key=lambda item: item[1])))
        total_error = float(sum(-item[0] for item in heap))
        logger.debug("[QUADRATURE] simplex=%s cells=%d error=%.3e", name, leaves, total_error)
        return QuadratureResult(total_value, total_error, leaves)

    def integrate_form(self, a: Form, simplex: Simplex, tol: float) -> QuadratureResult:
        """Signed integral of a over the simplex."""
        fn = pullback_integrand(a, simplex)
        if a.is_zero():
            return QuadratureResult.zero()
        result = self.integrate(fn, simplex.order, tol, simplex.describe())
        return result.scaled(simplex.sign)
