"""
Matrix formalism of multistep discrete time differentiation.

For a grid with steps dt_k the one-step matrix is M = T^-1 D with
T = diag(1, dt_1, ..., dt_n) and D lower bidiagonal (1 on the diagonal,
-1 below). A rule is given by its matrix Mhat (row 0 = (1, 0, ..., 0),
rows k >= 1 summing to zero); the associated matrix is

    Ahat = T Mhat D^-1,        D^-1 = lower-triangular all ones,

whose first row and column are (1, 0, ..., 0), and A is Ahat without them.
"""

from dataclasses import dataclass
from typing import List, Sequence, Tuple, Union

import numpy as np

from src.fvpme.core.enums import TimeRule
from src.fvpme.core.exceptions import StructuralError, UnsupportedGridError, ValidationError
from src.fvpme.core.logging import get_logger
from src.fvpme.time_algebra.banded import BandedLower, LowerTriangular, lower_triangular
from src.fvpme.time_algebra.grid import TimeGrid
from src.fvpme.time_algebra.schemas import NormRow

logger = get_logger(__name__)

STRUCTURE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class MultistepOperator:
    """
    Immutable bundle (Mhat, Ahat, A) of a time-differentiation rule.

    Attributes:
        grid: the time subdivision
        rule: euler, bdf2 or custom
        Mhat: (n+1) x (n+1) rule matrix
        Ahat: (n+1) x (n+1) associated matrix
        A: n x n trailing block of Ahat
    """

    grid: TimeGrid
    rule: TimeRule
    Mhat: LowerTriangular
    Ahat: LowerTriangular
    A: LowerTriangular

    @property
    def n(self) -> int:
        return self.grid.n

    def M(self) -> BandedLower:
        """One-step matrix T^-1 D."""
        inv_dt = 1.0 / self.grid.scaling()
        bands = np.zeros((2, self.n + 1))
        bands[0] = inv_dt
        bands[1, 1:] = -inv_dt[1:]
        return BandedLower(bands)

    def reconstruct_mhat(self) -> np.ndarray:
        """T^-1 Ahat T M, which must reproduce Mhat."""
        scale = self.grid.scaling()
        tm = scale[:, None] * self.M().to_dense()
        return self.Ahat.to_dense() @ tm / scale[:, None]

    def structural_residuals(self) -> dict:
        """Worst deviations from the structural conditions of the formalism."""
        mhat = self.Mhat.to_dense()
        ahat = self.Ahat.to_dense()
        first_row = np.zeros(self.n + 1)
        first_row[0] = 1.0
        return {
            "mhat_first_row": float(np.abs(mhat[0] - first_row).max()),
            "mhat_row_sums": float(np.abs(mhat[1:].sum(axis=1) * self.grid.steps).max()),
            "ahat_first_row": float(np.abs(ahat[0] - first_row).max()),
            "ahat_first_column": float(np.abs(ahat[:, 0] - first_row).max()),
            "reconstruction": float(np.abs(self.reconstruct_mhat() - mhat).max()
                                    * self.grid.steps.max()),
        }


def derive_ahat(mhat: LowerTriangular, grid: TimeGrid) -> LowerTriangular:
    """Ahat = T Mhat D^-1: row k, column j holds dt_k * sum_{i >= j} Mhat[k, i]."""
    scale = grid.scaling()
    if isinstance(mhat, BandedLower):
        bw = mhat.bandwidth
        bands = np.cumsum(mhat.bands, axis=0) * scale[None, :]
        for r in range(1, bw + 1):
            bands[r, :r] = 0.0
        # The last band is a full row sum, zero except on row 0
        if bw > 0 and np.all(np.abs(bands[bw]) <= STRUCTURE_TOL * max(1.0, np.abs(bands).max())):
            bands = bands[:bw]
        return BandedLower(bands)

    dense = mhat.to_dense()
    suffix = np.cumsum(dense[:, ::-1], axis=1)[:, ::-1]
    return lower_triangular(np.tril(scale[:, None] * suffix), tol=STRUCTURE_TOL)


def _assemble(grid: TimeGrid, rule: TimeRule, mhat: LowerTriangular) -> MultistepOperator:
    mhat.check_invertible("Mhat")
    ahat = derive_ahat(mhat, grid)
    unit = np.zeros(grid.n + 1)
    unit[0] = 1.0
    first_column = ahat.matvec(unit)[1:]
    if np.any(np.abs(first_column) > STRUCTURE_TOL * max(1.0, np.abs(ahat.diagonal()).max())):
        raise StructuralError("Ahat first column must vanish below row 0")
    op = MultistepOperator(grid=grid, rule=rule, Mhat=mhat, Ahat=ahat, A=ahat.trailing())
    logger.debug("Built multistep operator", extra={"rule": rule.value, "n": grid.n})
    return op


def build_euler(grid: TimeGrid) -> MultistepOperator:
    """Implicit Euler: Mhat = M and A = identity."""
    inv_dt = 1.0 / grid.scaling()
    bands = np.zeros((2, grid.n + 1))
    bands[0] = inv_dt
    bands[1, 1:] = -inv_dt[1:]
    return _assemble(grid, TimeRule.EULER, BandedLower(bands))


def build_bdf2_uniform(grid: TimeGrid) -> MultistepOperator:
    """
    BDF2 on a uniform grid: row 1 is an Euler step, rows k >= 2 encode
    (3/2 u^k - 2 u^(k-1) + 1/2 u^(k-2)) / dt.

    Raises:
        UnsupportedGridError: nonuniform steps
    """
    if not grid.is_uniform():
        raise UnsupportedGridError(
            "BDF2 builder requires equal steps; use build_custom for variable steps",
            details={"min_step": float(grid.steps.min()), "max_step": float(grid.steps.max())}
        )
    dt = grid.steps[0]
    m = grid.n + 1
    bands = np.zeros((3, m))
    bands[0, 0] = 1.0
    bands[0, 1] = 1.0 / dt
    bands[1, 1] = -1.0 / dt
    bands[0, 2:] = 1.5 / dt
    bands[1, 2:] = -2.0 / dt
    bands[2, 2:] = 0.5 / dt
    return _assemble(grid, TimeRule.BDF2, BandedLower(bands))


def build_custom(
    grid: TimeGrid,
    rows: Union[Sequence[float], Sequence[Sequence[float]]]
) -> MultistepOperator:
    """
    Build a rule from per-row coefficients.

    Row k >= 1 encodes (sum_j c_j u^(k-s+j)) / dt_k with coefficients listed
    oldest first. A single pattern applies to every row long enough to hold
    it, earlier rows falling back to an Euler step; a list of n patterns
    gives each row explicitly.

    Raises:
        ValidationError: wrong number of rows or a pattern longer than its row allows
        StructuralError: a row that does not sum to zero or has a zero diagonal
    """
    n = grid.n
    first = rows[0] if len(rows) else None
    single = first is not None and np.ndim(first) == 0
    if single:
        pattern = np.asarray(rows, dtype=float)
        patterns: List[np.ndarray] = [
            pattern if pattern.size <= k + 1 else np.array([-1.0, 1.0])
            for k in range(1, n + 1)
        ]
    else:
        if len(rows) != n:
            raise ValidationError(
                "custom rule needs one coefficient row per step",
                details={"rows": len(rows), "n": n}
            )
        patterns = [np.asarray(r, dtype=float) for r in rows]

    dense = np.zeros((n + 1, n + 1))
    dense[0, 0] = 1.0
    for k, coeffs in enumerate(patterns, start=1):
        s = coeffs.size - 1
        if s > k or s < 1:
            raise ValidationError(
                "coefficient row does not fit its step",
                details={"row": k, "length": int(coeffs.size)}
            )
        if abs(coeffs.sum()) > STRUCTURE_TOL * np.abs(coeffs).max():
            raise StructuralError(
                "rows of Mhat must vanish on constants",
                details={"row": k, "sum": float(coeffs.sum())}
            )
        dense[k, k - s:k + 1] = coeffs / grid.steps[k - 1]

    return _assemble(grid, TimeRule.CUSTOM, lower_triangular(dense))


def norm1_inverse(A: LowerTriangular) -> float:
    """Exact ||A^-1||_1 by forward substitution on the unit basis."""
    A.check_invertible("A")
    with np.errstate(over="ignore", invalid="ignore"):
        inv = A.solve(np.eye(A.size))
        norm = float(np.abs(inv).sum(axis=0).max())
    return norm if np.isfinite(norm) else float("inf")


def check_At(op: MultistepOperator, C_threshold: float) -> Tuple[float, bool]:
    """
    Measure ||A^-1||_1 against a threshold.

    Returns:
        (norm, norm <= C_threshold)

    Raises:
        StructuralError: A is singular
    """
    norm = norm1_inverse(op.A)
    passed = norm <= C_threshold
    if not passed:
        logger.warning(
            "Multistep stability bound exceeded",
            extra={"rule": op.rule.value, "n": op.n, "norm": norm, "threshold": C_threshold}
        )
    return norm, passed


def bdf2_norm_closed_form(n: int) -> float:
    """(3/2)(1 - 3^-n)."""
    return 1.5 * (1.0 - 3.0 ** (-n))


def norm_table(
    ns: Sequence[int],
    rule: TimeRule = TimeRule.BDF2,
    C_threshold: float = 1.5,
    T: float = 1.0
) -> List[NormRow]:
    """||A^-1||_1 for built rules on uniform grids of several sizes."""
    builders = {TimeRule.EULER: build_euler, TimeRule.BDF2: build_bdf2_uniform}
    rule = TimeRule(rule)
    if rule not in builders:
        raise ValidationError("norm tables are available for built rules only", details={"rule": rule.value})
    table = []
    for n in ns:
        op = builders[rule](TimeGrid.uniform(T, n))
        norm, passed = check_At(op, C_threshold)
        table.append(NormRow(n=n, rule=rule, norm1_Ainv=norm, passed=passed))
    return table
