"""
Piecewise-linear maximal monotone graphs with vertical and horizontal segments.
"""

from typing import Sequence, Tuple

import numpy as np

from src.fvpme.core.enums import GraphMode
from src.fvpme.core.exceptions import ValidationError
from src.fvpme.graphs.base import ArrayLike, MonotoneGraph


class PiecewiseGraph(MonotoneGraph):
    """
    Monotone polyline through breakpoints, extended by rays at both ends.

    Consecutive breakpoints sharing an abscissa form a vertical segment
    (multi-valued part); sharing an ordinate, a horizontal one.

    Args:
        breakpoints: (x, y) pairs, nondecreasing in both coordinates
        slope_left: slope of the ray for x below the first breakpoint
        slope_right: slope of the ray for x above the last breakpoint
    """

    mode = GraphMode.PIECEWISE

    def __init__(
        self,
        breakpoints: Sequence[Tuple[float, float]],
        slope_left: float = 0.0,
        slope_right: float = 0.0,
        **solver_options
    ) -> None:
        super().__init__(**solver_options)
        pts = np.asarray(breakpoints, dtype=float).reshape(-1, 2)
        if pts.shape[0] == 0:
            raise ValidationError("piecewise graph needs at least one breakpoint")
        if np.any(np.diff(pts[:, 0]) < 0) or np.any(np.diff(pts[:, 1]) < 0):
            raise ValidationError(
                "breakpoints must be nondecreasing in both coordinates",
                details={"breakpoints": pts.tolist()}
            )
        if slope_left < 0 or slope_right < 0:
            raise ValidationError("end slopes must be nonnegative")
        self.breakpoints = pts
        self.slope_left = float(slope_left)
        self.slope_right = float(slope_right)

        xs, first = np.unique(pts[:, 0], return_index=True)
        last = np.r_[first[1:] - 1, pts.shape[0] - 1]
        self._x = xs
        self._y_low = pts[first, 1]
        self._y_high = pts[last, 1]

    def __repr__(self) -> str:
        return f"PiecewiseGraph(breakpoints={self.breakpoints.tolist()})"

    def _bounds(self, u: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
        shape = np.shape(u)
        u = np.atleast_1d(np.asarray(u, dtype=float)).ravel()
        x, lo_y, hi_y = self._x, self._y_low, self._y_high
        lo = np.empty_like(u)
        hi = np.empty_like(u)

        left = u < x[0]
        right = u > x[-1]
        lo[left] = hi[left] = lo_y[0] + self.slope_left * (u[left] - x[0])
        lo[right] = hi[right] = hi_y[-1] + self.slope_right * (u[right] - x[-1])

        inner = ~(left | right)
        ui = u[inner]
        idx = np.searchsorted(x, ui, side="left")
        exact = x[np.minimum(idx, x.size - 1)] == ui
        inner_lo = np.empty_like(ui)
        inner_hi = np.empty_like(ui)
        inner_lo[exact] = lo_y[idx[exact]]
        inner_hi[exact] = hi_y[idx[exact]]

        between = ~exact
        i = idx[between] - 1
        if i.size:
            t = (ui[between] - x[i]) / (x[i + 1] - x[i])
            val = hi_y[i] + t * (lo_y[i + 1] - hi_y[i])
            inner_lo[between] = val
            inner_hi[between] = val
        lo[inner] = inner_lo
        hi[inner] = inner_hi
        return lo.reshape(shape), hi.reshape(shape)

    def lower(self, u: ArrayLike) -> np.ndarray:
        return self._bounds(u)[0]

    def upper(self, u: ArrayLike) -> np.ndarray:
        return self._bounds(u)[1]

    def inverse(self) -> MonotoneGraph:
        """Swap axes; end rays must have positive slopes."""
        if self.slope_left <= 0 or self.slope_right <= 0:
            raise ValidationError(
                "inverse of a piecewise graph needs positive end slopes",
                details={"slope_left": self.slope_left, "slope_right": self.slope_right}
            )
        return PiecewiseGraph(
            self.breakpoints[:, ::-1],
            slope_left=1.0 / self.slope_left,
            slope_right=1.0 / self.slope_right,
            scalar_tol=self.scalar_tol,
            bracket_expansion=self.bracket_expansion,
            max_iter=self.max_iter,
        )


def stefan_graph(latent_heat: float, **solver_options) -> PiecewiseGraph:
    """
    Stefan-type graph: u for u < 0, [0, L] at 0, u + L for u > 0.

    Raises:
        ValidationError: negative latent heat
    """
    if latent_heat < 0:
        raise ValidationError("latent heat must be nonnegative", details={"latent_heat": latent_heat})
    return PiecewiseGraph(
        [(0.0, 0.0), (0.0, latent_heat)],
        slope_left=1.0,
        slope_right=1.0,
        **solver_options
    )


def identity_graph(**solver_options) -> PiecewiseGraph:
    """beta = Id."""
    return PiecewiseGraph([(0.0, 0.0)], slope_left=1.0, slope_right=1.0, **solver_options)
