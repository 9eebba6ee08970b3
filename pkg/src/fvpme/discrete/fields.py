"""
Discrete unknowns attached to a mesh (and a time grid).
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.fvpme.core.exceptions import ValidationError
from src.fvpme.mesh.geometry import AdmissibleMesh
from src.fvpme.time_algebra.grid import TimeGrid


@dataclass(frozen=True, eq=False)
class CellVector:
    """One finite value per cell."""

    mesh: AdmissibleMesh
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.mesh.n_cells,):
            raise ValidationError(
                "cell vector length must equal the cell count",
                details={"length": int(values.size), "cells": self.mesh.n_cells}
            )
        if not np.all(np.isfinite(values)):
            raise ValidationError("cell vector values must be finite")
        object.__setattr__(self, "values", values)

    @classmethod
    def constant(cls, mesh: AdmissibleMesh, value: float) -> "CellVector":
        return cls(mesh, np.full(mesh.n_cells, float(value)))

    @classmethod
    def zeros(cls, mesh: AdmissibleMesh) -> "CellVector":
        return cls.constant(mesh, 0.0)

    def __len__(self) -> int:
        return self.mesh.n_cells

    def __array__(self, dtype=None, copy=None) -> np.ndarray:
        return self.values if dtype is None else self.values.astype(dtype)

    @property
    def mass(self) -> float:
        """sum_K m_K u_K."""
        return float(self.mesh.measures @ self.values)


@dataclass(frozen=True, eq=False)
class WeightField:
    """Cell restriction of a weight bounded between two positive constants."""

    values: np.ndarray
    lower: float
    upper: float

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if not self.lower > 0:
            raise ValidationError("weight lower bound must be positive", details={"lower": self.lower})
        if np.any(values < self.lower) or np.any(values > self.upper):
            raise ValidationError(
                "weights must lie within their bounds",
                details={"lower": self.lower, "upper": self.upper}
            )
        object.__setattr__(self, "values", values)

    @classmethod
    def constant(cls, mesh: AdmissibleMesh, value: float = 1.0) -> "WeightField":
        return cls(np.full(mesh.n_cells, float(value)), lower=float(value), upper=float(value))


@dataclass(frozen=True, eq=False)
class DiamondField:
    """One d-vector per interior interface, constant on its diamond."""

    mesh: AdmissibleMesh
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float).reshape(self.mesh.n_interfaces, self.mesh.dim)
        object.__setattr__(self, "values", values)

    @property
    def magnitudes(self) -> np.ndarray:
        return np.linalg.norm(self.values, axis=1)

    def collinearity_residual(self) -> float:
        """Largest component orthogonal to n_KL."""
        if self.mesh.n_interfaces == 0:
            return 0.0
        normals = self.mesh.iface_normals
        along = (self.values * normals).sum(axis=1, keepdims=True) * normals
        return float(np.abs(self.values - along).max())

    def lp_norm(self, p: float = 2.0) -> float:
        """(sum_D meas(D) |g_D|^p)^(1/p)."""
        return float((self.mesh.diamond_measures @ self.magnitudes ** p) ** (1.0 / p))

    def sup_norm(self) -> float:
        return float(self.magnitudes.max()) if self.mesh.n_interfaces else 0.0


@dataclass(frozen=True, eq=False)
class SpaceTimeField:
    """Unknowns u_K^k for k = 0..n, stored as an (n+1, N) array."""

    mesh: AdmissibleMesh
    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        expected = (self.grid.n + 1, self.mesh.n_cells)
        if values.shape != expected:
            raise ValidationError(
                "space-time field has the wrong shape",
                details={"shape": list(values.shape), "expected": list(expected)}
            )
        if not np.all(np.isfinite(values)):
            raise ValidationError("space-time field values must be finite")
        object.__setattr__(self, "values", values)

    @classmethod
    def from_slots(cls, mesh: AdmissibleMesh, grid: TimeGrid, slots) -> "SpaceTimeField":
        return cls(mesh, grid, np.stack([np.asarray(s, dtype=float) for s in slots]))

    @classmethod
    def constant_in_time(
        cls, mesh: AdmissibleMesh, grid: TimeGrid, state: np.ndarray
    ) -> "SpaceTimeField":
        return cls(mesh, grid, np.tile(np.asarray(state, dtype=float), (grid.n + 1, 1)))

    @property
    def n(self) -> int:
        return self.grid.n

    def at(self, k: int) -> CellVector:
        return CellVector(self.mesh, self.values[k])

    @property
    def final(self) -> CellVector:
        return self.at(self.grid.n)

    def masses(self, weights: Optional[WeightField] = None) -> np.ndarray:
        m = self.mesh.measures if weights is None else self.mesh.measures * weights.values
        return self.values @ m
