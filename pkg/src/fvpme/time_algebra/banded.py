"""
Lower-triangular matrices in banded or dense storage.

Banded storage is row-aligned: ``bands[r, k] = M[k, k - r]`` (zero for
``k < r``). Solves go through ``scipy.linalg.solve_banded``; the dense
variant uses ``scipy.linalg.solve_triangular``.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded, solve_triangular

from src.fvpme.core.exceptions import StructuralError

# Lower bandwidth up to which dense input is stored banded
MAX_BANDWIDTH = 8


class LowerTriangular(ABC):
    """Common interface of the two storage schemes."""

    @property
    @abstractmethod
    def size(self) -> int:
        """Number of rows."""

    @abstractmethod
    def to_dense(self) -> np.ndarray:
        """Dense copy."""

    @abstractmethod
    def diagonal(self) -> np.ndarray:
        """Main diagonal as a copy."""

    @abstractmethod
    def matvec(self, x: np.ndarray) -> np.ndarray:
        """M x."""

    @abstractmethod
    def rmatvec(self, x: np.ndarray) -> np.ndarray:
        """M^T x."""

    @abstractmethod
    def solve(self, b: np.ndarray) -> np.ndarray:
        """M^-1 b."""

    @abstractmethod
    def solve_transposed(self, b: np.ndarray) -> np.ndarray:
        """M^-T b."""

    @abstractmethod
    def trailing(self) -> "LowerTriangular":
        """Drop the first row and column."""

    def check_invertible(self, name: str) -> None:
        diag = self.diagonal()
        zero = np.nonzero(diag == 0.0)[0]
        if zero.size or not np.all(np.isfinite(diag)):
            raise StructuralError(
                f"{name} is singular",
                details={"row": int(zero[0]) if zero.size else None}
            )


@dataclass(frozen=True, eq=False)
class BandedLower(LowerTriangular):
    bands: np.ndarray

    @property
    def size(self) -> int:
        return int(self.bands.shape[1])

    @property
    def bandwidth(self) -> int:
        return int(self.bands.shape[0] - 1)

    def diagonal(self) -> np.ndarray:
        return self.bands[0].copy()

    def to_dense(self) -> np.ndarray:
        m = self.size
        dense = np.zeros((m, m))
        for r in range(self.bandwidth + 1):
            k = np.arange(r, m)
            dense[k, k - r] = self.bands[r, r:]
        return dense

    def _solver_form(self, lower: bool) -> np.ndarray:
        m, bw = self.size, self.bandwidth
        ab = np.zeros((bw + 1, m))
        for r in range(bw + 1):
            if lower:
                ab[r, :m - r] = self.bands[r, r:]
            else:
                ab[bw - r, r:] = self.bands[r, r:]
        return ab

    def matvec(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        bands = self.bands.reshape(self.bands.shape + (1,) * (x.ndim - 1))
        y = bands[0] * x
        for r in range(1, self.bandwidth + 1):
            y[r:] += bands[r, r:] * x[:-r]
        return y

    def rmatvec(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        bands = self.bands.reshape(self.bands.shape + (1,) * (x.ndim - 1))
        y = bands[0] * x
        for r in range(1, self.bandwidth + 1):
            y[:-r] += bands[r, r:] * x[r:]
        return y

    def solve(self, b: np.ndarray) -> np.ndarray:
        self.check_invertible("lower-triangular matrix")
        return solve_banded((self.bandwidth, 0), self._solver_form(lower=True), b)

    def solve_transposed(self, b: np.ndarray) -> np.ndarray:
        self.check_invertible("lower-triangular matrix")
        return solve_banded((0, self.bandwidth), self._solver_form(lower=False), b)

    def trailing(self) -> "BandedLower":
        bands = self.bands[:, 1:].copy()
        for r in range(1, self.bandwidth + 1):
            bands[r, :r] = 0.0
        return BandedLower(bands)


@dataclass(frozen=True, eq=False)
class DenseLower(LowerTriangular):
    matrix: np.ndarray

    @property
    def size(self) -> int:
        return int(self.matrix.shape[0])

    def diagonal(self) -> np.ndarray:
        return np.diag(self.matrix).copy()

    def to_dense(self) -> np.ndarray:
        return self.matrix.copy()

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return self.matrix @ np.asarray(x, dtype=float)

    def rmatvec(self, x: np.ndarray) -> np.ndarray:
        return self.matrix.T @ np.asarray(x, dtype=float)

    def solve(self, b: np.ndarray) -> np.ndarray:
        self.check_invertible("lower-triangular matrix")
        return solve_triangular(self.matrix, b, lower=True)

    def solve_transposed(self, b: np.ndarray) -> np.ndarray:
        self.check_invertible("lower-triangular matrix")
        return solve_triangular(self.matrix, b, lower=True, trans="T")

    def trailing(self) -> "DenseLower":
        return DenseLower(self.matrix[1:, 1:].copy())


def bandwidth_of(dense: np.ndarray, tol: float = 0.0) -> int:
    """Largest r with a nonzero entry on subdiagonal r."""
    m = dense.shape[0]
    width = 0
    for r in range(1, m):
        if np.any(np.abs(np.diagonal(dense, offset=-r)) > tol):
            width = r
    return width


def lower_triangular(dense: np.ndarray, tol: float = 0.0) -> LowerTriangular:
    """Store a dense lower-triangular matrix banded when its bandwidth is small."""
    dense = np.asarray(dense, dtype=float)
    if np.any(np.abs(np.triu(dense, k=1)) > tol):
        raise StructuralError("matrix is not lower triangular")
    width = bandwidth_of(dense, tol)
    if width > MAX_BANDWIDTH:
        return DenseLower(np.tril(dense))
    m = dense.shape[0]
    bands = np.zeros((width + 1, m))
    for r in range(width + 1):
        bands[r, r:] = np.diagonal(dense, offset=-r)
    return BandedLower(bands)
