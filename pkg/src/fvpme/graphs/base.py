"""
Maximal monotone graphs on the real line and their resolvents.

A graph is handled through the interval it assigns to each abscissa,
``beta(u) = [lower(u), upper(u)]``. Single-valued graphs have
``lower == upper``; vertical segments give a proper interval. The resolvent
``(Id + lam beta)^-1`` is the single-valued handle used by the solvers.
"""

from abc import ABC, abstractmethod
from typing import Callable, Optional, Tuple, Union

import numpy as np
from scipy import optimize

from src.fvpme.config import settings
from src.fvpme.core.enums import GraphMode
from src.fvpme.core.exceptions import StructuralError, ValidationError
from src.fvpme.core.logging import get_logger

logger = get_logger(__name__)

ArrayLike = Union[float, np.ndarray]


class MonotoneGraph(ABC):
    """
    Maximal monotone graph with full domain.

    Subclasses provide the interval bounds; resolvent, inverse and the
    A/B decomposition are derived here.
    """

    mode: GraphMode = GraphMode.FUNCTION

    def __init__(
        self,
        scalar_tol: Optional[float] = None,
        bracket_expansion: Optional[float] = None,
        max_iter: Optional[int] = None
    ) -> None:
        """
        Initialize resolvent solver settings.

        Args:
            scalar_tol: absolute tolerance of scalar root finding
            bracket_expansion: growth factor when searching a sign change
            max_iter: iteration cap of bracket search and root finding
        """
        self.scalar_tol = scalar_tol if scalar_tol is not None else settings.graph.scalar_tol
        self.bracket_expansion = (
            bracket_expansion if bracket_expansion is not None else settings.graph.bracket_expansion
        )
        self.max_iter = max_iter if max_iter is not None else settings.graph.max_iter

    @abstractmethod
    def lower(self, u: ArrayLike) -> np.ndarray:
        """Smallest element of beta(u)."""

    @abstractmethod
    def upper(self, u: ArrayLike) -> np.ndarray:
        """Largest element of beta(u)."""

    def __call__(self, u: ArrayLike) -> np.ndarray:
        """A selection of beta (the lower bound)."""
        return self.lower(u)

    def contains(self, u: ArrayLike, v: ArrayLike, tol: float = 0.0) -> np.ndarray:
        """Membership v in beta(u), elementwise."""
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        return (v >= self.lower(u) - tol) & (v <= self.upper(u) + tol)

    def inverse(self) -> "MonotoneGraph":
        """The inverse graph beta^-1 (axes swapped)."""
        return InverseGraph(self)

    def resolvent(self, lam: float, y: float) -> float:
        """
        Evaluate (Id + lam beta)^-1 at a scalar y.

        Args:
            lam: positive scaling
            y: right-hand side

        Returns:
            The unique u with y in u + lam beta(u)

        Raises:
            ValidationError: lam <= 0
            StructuralError: no sign change found (graph is not maximal)
        """
        if lam <= 0:
            raise ValidationError("resolvent requires lam > 0", details={"lam": lam})
        y = float(y)
        if bool(self.contains(0.0, y / lam)):
            return 0.0

        def residual(u: float) -> float:
            return u + lam * float(self.lower(u)) - y

        def residual_upper(u: float) -> float:
            return u + lam * float(self.upper(u)) - y

        width = max(1.0, abs(y))
        a, b = y - width, y + width
        for _ in range(self.max_iter):
            if residual_upper(a) <= 0.0 <= residual(b):
                break
            width *= self.bracket_expansion
            a, b = y - width, y + width
        else:
            raise StructuralError(
                "resolvent bracket search failed",
                details={"lam": lam, "y": y, "width": width}
            )

        # A jump of the selection at the root still brackets it
        return float(optimize.brentq(
            residual, a, b,
            xtol=self.scalar_tol,
            rtol=4 * np.finfo(float).eps,
            maxiter=self.max_iter,
        ))

    def resolvent_many(self, lam: ArrayLike, y: ArrayLike) -> np.ndarray:
        """Elementwise resolvent; lam may be a scalar or an array like y."""
        y = np.asarray(y, dtype=float)
        lam_arr = np.broadcast_to(np.asarray(lam, dtype=float), y.shape)
        out = np.empty_like(y)
        for idx in np.ndindex(y.shape):
            out[idx] = self.resolvent(float(lam_arr[idx]), float(y[idx]))
        return out

    def decompose_AB(self, w: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
        """
        Split w = a + b with b = (Id + beta)^-1 w and a = (Id + beta^-1)^-1 w.

        Both maps are nondecreasing and 1-Lipschitz, and a lies in beta(b).
        """
        w = np.asarray(w, dtype=float)
        b = self.resolvent_many(1.0, w)
        return w - b, b

    def A(self, w: ArrayLike) -> np.ndarray:
        """(Id + beta^-1)^-1."""
        return self.decompose_AB(w)[0]

    def B(self, w: ArrayLike) -> np.ndarray:
        """(Id + beta)^-1."""
        return self.decompose_AB(w)[1]

    def is_monotone(self, samples: np.ndarray, tol: float = 0.0) -> bool:
        """Check (y1 - y2)(x1 - x2) >= 0 on sorted samples using extreme selections."""
        x = np.sort(np.asarray(samples, dtype=float))
        if x.size < 2:
            return True
        # Worst pairing: the largest value at x_i against the smallest at x_{i+1}
        return bool(np.all(self.lower(x[1:]) - self.upper(x[:-1]) >= -tol))


class FunctionGraph(MonotoneGraph):
    """Single-valued nondecreasing continuous function on the real line."""

    mode = GraphMode.FUNCTION

    def __init__(
        self,
        function: Callable[[np.ndarray], np.ndarray],
        inverse_function: Optional[Callable[[np.ndarray], np.ndarray]] = None,
        derivative: Optional[Callable[[np.ndarray], np.ndarray]] = None,
        **solver_options
    ) -> None:
        super().__init__(**solver_options)
        self.function = function
        self.inverse_function = inverse_function
        self.derivative = derivative

    def lower(self, u: ArrayLike) -> np.ndarray:
        return np.asarray(self.function(np.asarray(u, dtype=float)), dtype=float)

    def upper(self, u: ArrayLike) -> np.ndarray:
        return self.lower(u)

    def inverse(self) -> MonotoneGraph:
        if self.inverse_function is None:
            return InverseGraph(self)
        return FunctionGraph(
            self.inverse_function,
            inverse_function=self.function,
            scalar_tol=self.scalar_tol,
            bracket_expansion=self.bracket_expansion,
            max_iter=self.max_iter,
        )


class InverseGraph(MonotoneGraph):
    """
    Inverse of a maximal monotone graph, evaluated through the original.

    beta^-1(v) = {u : v in beta(u)}; the bounds are found by bracketed
    root finding on the original graph. Valid when beta has range R.
    """

    def __init__(self, graph: MonotoneGraph) -> None:
        super().__init__(
            scalar_tol=graph.scalar_tol,
            bracket_expansion=graph.bracket_expansion,
            max_iter=graph.max_iter,
        )
        self.graph = graph
        self.mode = graph.mode

    def _bound(self, v: float, use_upper: bool) -> float:
        # lower(beta^-1)(v) = inf {u : upper(u) >= v}; upper(beta^-1)(v) = sup {u : lower(u) <= v}
        def gap(u: float) -> float:
            if use_upper:
                return float(self.graph.lower(u)) - v
            return float(self.graph.upper(u)) - v

        width = 1.0
        a, b = -width, width
        for _ in range(self.max_iter):
            ga, gb = gap(a), gap(b)
            if use_upper and ga <= 0.0 < gb or not use_upper and ga < 0.0 <= gb:
                break
            width *= self.bracket_expansion
            a, b = -width, width
        else:
            raise StructuralError("inverse graph bracket search failed", details={"v": v})

        for _ in range(self.max_iter):
            mid = 0.5 * (a + b)
            if b - a <= self.scalar_tol or mid in (a, b):
                break
            g = gap(mid)
            if (use_upper and g <= 0.0) or (not use_upper and g < 0.0):
                a = mid
            else:
                b = mid
        return a if use_upper else b

    def lower(self, u: ArrayLike) -> np.ndarray:
        v = np.asarray(u, dtype=float)
        return np.vectorize(lambda s: self._bound(s, False), otypes=[float])(v)

    def upper(self, u: ArrayLike) -> np.ndarray:
        v = np.asarray(u, dtype=float)
        return np.vectorize(lambda s: self._bound(s, True), otypes=[float])(v)

    def inverse(self) -> MonotoneGraph:
        return self.graph
