"""
Scalar inequalities behind the discrete energy estimates.

Each function returns ``lhs - rhs`` of an inequality that holds for every
input, so a negative value beyond rounding signals a defect.
"""

import numpy as np

from src.fvpme.graphs.base import ArrayLike
from src.fvpme.graphs.power_law import phi, psi


def cs_gap(a: ArrayLike, b: ArrayLike, q: float) -> np.ndarray:
    """(a - b)(psi(a) - psi(b)) - (phi(a) - phi(b))^2 >= 0."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return (a - b) * (psi(a, q) - psi(b, q)) - (phi(a, q) - phi(b, q)) ** 2


def bdf2_multiplier_gap(a: ArrayLike, b: ArrayLike, c: ArrayLike) -> np.ndarray:
    """
    (3/2 a - 2b + c/2) a - (a^2 + (2a - b)^2 - b^2 - (2b - c)^2) / 4.

    Equals (a - 2b + c)^2 / 4.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    lhs = (1.5 * a - 2.0 * b + 0.5 * c) * a
    rhs = 0.25 * (a ** 2 + (2.0 * a - b) ** 2 - b ** 2 - (2.0 * b - c) ** 2)
    return lhs - rhs


def euler_multiplier_gap(a: ArrayLike, b: ArrayLike) -> np.ndarray:
    """(a - b) a - a^2/2 + b^2/2, equal to (a - b)^2 / 2."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return (a - b) * a - 0.5 * a ** 2 + 0.5 * b ** 2
