"""
Porous-medium nonlinearity psi(u) = |u|^(q-1) u and its Kirchhoff transform.

phi is the primitive of sqrt(psi'), so phi'(u)^2 = psi'(u):

    phi(u) = 2 sqrt(q) / (q + 1) |u|^((q-1)/2) u

q = 1 is admitted as a linear mode (psi = phi = Id).
"""

from typing import Optional

import numpy as np

from src.fvpme.core.exceptions import StructuralError, ValidationError
from src.fvpme.graphs.base import ArrayLike, FunctionGraph


def _check_exponent(q: float) -> None:
    if not np.isfinite(q) or q < 1.0:
        raise ValidationError("power-law exponent must satisfy q >= 1", details={"q": q})


def psi(u: ArrayLike, q: float) -> np.ndarray:
    """|u|^(q-1) u."""
    u = np.asarray(u, dtype=float)
    return np.abs(u) ** (q - 1.0) * u


def dpsi(u: ArrayLike, q: float) -> np.ndarray:
    """psi'(u) = q |u|^(q-1)."""
    u = np.asarray(u, dtype=float)
    return q * np.abs(u) ** (q - 1.0)


def phi(u: ArrayLike, q: float) -> np.ndarray:
    """Kirchhoff transform (2 sqrt(q) / (q+1)) |u|^((q-1)/2) u."""
    u = np.asarray(u, dtype=float)
    return 2.0 * np.sqrt(q) / (q + 1.0) * np.abs(u) ** (0.5 * (q - 1.0)) * u


def psi_inverse(v: ArrayLike, q: float) -> np.ndarray:
    """|v|^(1/q - 1) v."""
    v = np.asarray(v, dtype=float)
    return np.abs(v) ** (1.0 / q - 1.0) * v


class PowerLaw(FunctionGraph):
    """
    The graph of psi with exponent q >= 1.

    The resolvent is solved in closed form through a vectorized Newton
    iteration started above the root; u + lam psi(u) is convex on u >= 0 so
    the iterates decrease monotonically to the solution.
    """

    def __init__(self, q: float, **solver_options) -> None:
        _check_exponent(q)
        self.q = float(q)
        super().__init__(
            function=lambda u: psi(u, self.q),
            inverse_function=lambda v: psi_inverse(v, self.q),
            derivative=lambda u: dpsi(u, self.q),
            **solver_options
        )

    def __repr__(self) -> str:
        return f"PowerLaw(q={self.q})"

    @property
    def is_linear(self) -> bool:
        return self.q == 1.0

    def psi(self, u: ArrayLike) -> np.ndarray:
        return psi(u, self.q)

    def dpsi(self, u: ArrayLike) -> np.ndarray:
        return dpsi(u, self.q)

    def phi(self, u: ArrayLike) -> np.ndarray:
        return phi(u, self.q)

    def resolvent(self, lam: float, y: float) -> float:
        return float(self.resolvent_many(lam, np.asarray(float(y)))[()])

    def resolvent_many(self, lam: ArrayLike, y: ArrayLike, tol: Optional[float] = None) -> np.ndarray:
        """
        Solve u + lam psi(u) = y elementwise.

        Raises:
            ValidationError: some lam <= 0
            StructuralError: Newton did not converge within max_iter
        """
        lam_arr = np.asarray(lam, dtype=float)
        if np.any(lam_arr <= 0):
            raise ValidationError("resolvent requires lam > 0")
        y = np.asarray(y, dtype=float)
        lam_arr = np.broadcast_to(lam_arr, y.shape)
        tol = tol if tol is not None else self.scalar_tol

        s = np.abs(y)
        q = self.q
        if q == 1.0:
            return y / (1.0 + lam_arr)

        # The root of v + lam v^q = s lies below both s and (s / lam)^(1/q)
        v = np.minimum(s, (s / lam_arr) ** (1.0 / q))
        step = np.full_like(v, np.inf)
        for _ in range(self.max_iter):
            g = v + lam_arr * v ** q - s
            dg = 1.0 + lam_arr * q * v ** (q - 1.0)
            step = g / dg
            v = np.maximum(v - step, 0.0)
            if np.all(np.abs(step) <= tol * np.maximum(1.0, v)):
                break
        else:
            raise StructuralError(
                "power-law resolvent did not converge",
                details={"max_iter": self.max_iter, "max_step": float(np.max(np.abs(step), initial=0.0))}
            )
        return np.sign(y) * v
