"""
Time subdivisions 0 = t_0 < t_1 < ... < t_n = T.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from src.fvpme.core.exceptions import ValidationError


@dataclass(frozen=True, eq=False)
class TimeGrid:
    """Strictly increasing times starting at 0."""

    times: np.ndarray

    def __post_init__(self) -> None:
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or t.size < 2:
            raise ValidationError("a time grid needs at least one step", details={"size": int(t.size)})
        if t[0] != 0.0:
            raise ValidationError("time grid must start at 0", details={"t0": float(t[0])})
        if not np.all(np.isfinite(t)) or np.any(np.diff(t) <= 0):
            raise ValidationError("time grid must be strictly increasing")
        object.__setattr__(self, "times", t)

    @classmethod
    def uniform(cls, T: float, n: int) -> "TimeGrid":
        """n equal steps on [0, T]."""
        if n < 1:
            raise ValidationError("step count must be at least 1", details={"n": n})
        if not T > 0:
            raise ValidationError("final time must be positive", details={"T": T})
        return cls(np.linspace(0.0, T, n + 1))

    @classmethod
    def from_times(cls, times: Sequence[float]) -> "TimeGrid":
        return cls(np.asarray(times, dtype=float))

    @property
    def n(self) -> int:
        return int(self.times.size - 1)

    @property
    def T(self) -> float:
        return float(self.times[-1])

    @property
    def steps(self) -> np.ndarray:
        """Delta t_k for k = 1..n."""
        return np.diff(self.times)

    @property
    def dt(self) -> float:
        """Largest step."""
        return float(self.steps.max())

    def is_uniform(self, rtol: float = 1e-12) -> bool:
        s = self.steps
        return bool(np.all(np.abs(s - s.mean()) <= rtol * s.mean()))

    def scaling(self) -> np.ndarray:
        """Diagonal of T_n: (1, Delta t_1, ..., Delta t_n)."""
        return np.concatenate([[1.0], self.steps])

    def midpoints(self) -> np.ndarray:
        return 0.5 * (self.times[:-1] + self.times[1:])
