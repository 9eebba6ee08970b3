"""
Cell quadrature rules.

Cartesian meshes (and 1D interval meshes) use tensor Gauss-Legendre rules
with three points per axis, exact for polynomials of degree 5 per variable.
General polygons are fanned into triangles from their first vertex, each
triangle is split uniformly ``4^r`` times and integrated with the
edge-midpoint rule, exact for quadratics.
"""

from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from src.fvpme.config import settings
from src.fvpme.mesh.geometry import AdmissibleMesh

GAUSS_POINTS = 3

SpaceFunction = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Points (P, d), weights (P,) and owning cell (P,) of a composite rule."""

    points: np.ndarray
    weights: np.ndarray
    cells: np.ndarray

    def integrate_cells(self, values: np.ndarray, n_cells: int) -> np.ndarray:
        """Per-cell sums of weight * value."""
        return np.bincount(self.cells, weights=self.weights * values, minlength=n_cells)


def _reference_gauss(order: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = leggauss(order)
    return 0.5 * (nodes + 1.0), 0.5 * weights


def _tensor_rule(lo: np.ndarray, hi: np.ndarray, order: int) -> QuadratureRule:
    """Tensor Gauss rule on boxes [lo_c, hi_c], one box per row."""
    n_cells, dim = lo.shape
    nodes, weights = _reference_gauss(order)
    grids = np.meshgrid(*([nodes] * dim), indexing="ij")
    ref = np.stack([g.ravel() for g in grids], axis=1)
    ref_w = np.prod(np.meshgrid(*([weights] * dim), indexing="ij"), axis=0).ravel()

    extent = hi - lo
    points = lo[:, None, :] + extent[:, None, :] * ref[None, :, :]
    cell_weights = np.prod(extent, axis=1)[:, None] * ref_w[None, :]
    cells = np.repeat(np.arange(n_cells), ref.shape[0])
    return QuadratureRule(points.reshape(-1, dim), cell_weights.ravel(), cells)


def _split_triangle(tri: np.ndarray) -> np.ndarray:
    a, b, c = tri
    ab, bc, ca = 0.5 * (a + b), 0.5 * (b + c), 0.5 * (c + a)
    return np.array([[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]])


def _polygon_rule(mesh: AdmissibleMesh, refinement: int) -> QuadratureRule:
    points, weights, cells = [], [], []
    for cell, verts in enumerate(mesh.vertices):
        triangles = np.array([[verts[0], verts[i], verts[i + 1]] for i in range(1, len(verts) - 1)])
        for _ in range(refinement):
            triangles = np.concatenate([_split_triangle(t) for t in triangles])
        a, b, c = triangles[:, 0], triangles[:, 1], triangles[:, 2]
        area = 0.5 * np.abs((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1])
                            - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))
        mids = np.concatenate([0.5 * (a + b), 0.5 * (b + c), 0.5 * (c + a)])
        points.append(mids)
        weights.append(np.tile(area / 3.0, 3))
        cells.append(np.full(mids.shape[0], cell))
    return QuadratureRule(np.concatenate(points), np.concatenate(weights), np.concatenate(cells))


def cell_quadrature(mesh: AdmissibleMesh, refinement: Optional[int] = None) -> QuadratureRule:
    """Composite rule over all cells (cached on the mesh)."""
    level = refinement if refinement is not None else settings.mesh.polygon_refinement
    key = f"quadrature:{level}"
    cached = mesh._cache.get(key)
    if cached is not None:
        return cached

    if mesh.structure is not None or mesh.dim == 1:
        lo = np.array([v.min(axis=0) for v in mesh.vertices])
        hi = np.array([v.max(axis=0) for v in mesh.vertices])
        rule = _tensor_rule(lo, hi, GAUSS_POINTS)
    else:
        rule = _polygon_rule(mesh, level)
    mesh._cache[key] = rule
    return rule


def integrate_cells(mesh: AdmissibleMesh, function: SpaceFunction) -> np.ndarray:
    """int_K f for every cell; f maps points (P, d) to values (P,)."""
    rule = cell_quadrature(mesh)
    values = np.asarray(function(rule.points), dtype=float).reshape(-1)
    return rule.integrate_cells(values, mesh.n_cells)


def integrate_domain(mesh: AdmissibleMesh, function: SpaceFunction) -> float:
    return float(integrate_cells(mesh, function).sum())
