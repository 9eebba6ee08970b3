"""
Admissible finite-volume mesh container and polygon helpers.

Cells are convex polytopes (intervals in 1D, convex polygons in 2D) with a center
x_K inside each cell. Interior interfaces carry the two-point-flux geometry
(measure, center distance, unit normal from K to L, transmissibility); boundary
interfaces carry only their measure since the scheme is zero-flux.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp


@dataclass(frozen=True, eq=False)
class CartesianStructure:
    """Tensor-grid layout of a mesh built on an axis-aligned box.

    Cell ids are lexicographic with the first axis varying fastest.
    """

    origin: np.ndarray
    spacing: np.ndarray
    shape: Tuple[int, ...]

    @property
    def upper(self) -> np.ndarray:
        return self.origin + self.spacing * np.asarray(self.shape)

    def axis_edges(self, axis: int) -> np.ndarray:
        """Cell boundaries along one axis."""
        return self.origin[axis] + self.spacing[axis] * np.arange(self.shape[axis] + 1)

    def to_grid(self, values: np.ndarray) -> np.ndarray:
        """Reshape a cell vector to an array indexed ``[i_0, i_1, ...]``."""
        return np.asarray(values).reshape(self.shape[::-1]).T

    def cell_id(self, index: np.ndarray) -> np.ndarray:
        """Lexicographic cell id of integer axis indices with shape (P, d)."""
        ids = np.zeros(index.shape[0], dtype=np.int64)
        stride = 1
        for axis, count in enumerate(self.shape):
            ids += index[:, axis] * stride
            stride *= count
        return ids


@dataclass(frozen=True, eq=False)
class AdmissibleMesh:
    """Immutable admissible discretization of a polytopal domain.

    Attributes:
        dim: spatial dimension (1 or 2)
        centers: cell centers x_K, shape (N, d)
        measures: cell measures m_K, shape (N,)
        vertices: per-cell vertex arrays (interval endpoints or CCW polygon)
        diameters: diam(K), shape (N,)
        iface_cells: (K, L) pairs with K < L, shape (E, 2)
        iface_measures: m_KL, shape (E,); counting measure 1 in 1D
        iface_distances: |x_K - x_L|, shape (E,)
        iface_normals: unit normals n_KL pointing from K to L, shape (E, d)
        iface_points: interface geometry, shape (E, 2, d) segment endpoints
            (1D: the interface point repeated)
        boundary_cells: owning cell of each boundary interface
        boundary_measures: m_sigma of each boundary interface
        domain_measure: meas(Omega) computed from the cell geometry
        structure: tensor layout when the mesh is Cartesian
    """

    dim: int
    centers: np.ndarray
    measures: np.ndarray
    vertices: Tuple[np.ndarray, ...]
    diameters: np.ndarray
    iface_cells: np.ndarray
    iface_measures: np.ndarray
    iface_distances: np.ndarray
    iface_normals: np.ndarray
    iface_points: np.ndarray
    boundary_cells: np.ndarray
    boundary_measures: np.ndarray
    domain_measure: float
    structure: Optional[CartesianStructure] = None
    _cache: Dict[str, object] = field(default_factory=dict, repr=False)

    @property
    def n_cells(self) -> int:
        return int(self.measures.shape[0])

    @property
    def n_interfaces(self) -> int:
        return int(self.iface_cells.shape[0])

    @property
    def transmissibilities(self) -> np.ndarray:
        """tau_KL = m_KL / |x_K - x_L|."""
        return self.iface_measures / self.iface_distances

    @property
    def diamond_measures(self) -> np.ndarray:
        """meas(D_KL) = m_KL |x_K - x_L| / d."""
        return self.iface_measures * self.iface_distances / self.dim

    @property
    def h(self) -> float:
        """Mesh size: max cell diameter."""
        return float(self.diameters.max())

    @property
    def rho(self) -> float:
        """Mesh regularity: max over cells of the neighbour sum."""
        if self.n_interfaces == 0:
            return 0.0
        k, l = self.iface_cells[:, 0], self.iface_cells[:, 1]
        dist = self.iface_distances
        per_cell = np.zeros(self.n_cells)
        np.add.at(
            per_cell, k,
            self.iface_measures * dist / self.measures[k] + self.diameters[k] / dist
        )
        np.add.at(
            per_cell, l,
            self.iface_measures * dist / self.measures[l] + self.diameters[l] / dist
        )
        return float(per_cell.max())

    @property
    def is_cartesian(self) -> bool:
        return self.structure is not None

    def neighbours(self, cell: int) -> List[int]:
        """Neighbouring cells N_K."""
        mask_k = self.iface_cells[:, 0] == cell
        mask_l = self.iface_cells[:, 1] == cell
        return sorted(
            self.iface_cells[mask_k, 1].tolist() + self.iface_cells[mask_l, 0].tolist()
        )

    def interface_index(self, cell_k: int, cell_l: int) -> int:
        """Index of the interface between two cells, in either order."""
        a, b = min(cell_k, cell_l), max(cell_k, cell_l)
        hits = np.nonzero((self.iface_cells[:, 0] == a) & (self.iface_cells[:, 1] == b))[0]
        if hits.size == 0:
            raise KeyError(f"cells {cell_k} and {cell_l} are not neighbours")
        return int(hits[0])

    def oriented_normal(self, cell_k: int, cell_l: int) -> np.ndarray:
        """Unit normal from ``cell_k`` to ``cell_l``; n_LK = -n_KL."""
        idx = self.interface_index(cell_k, cell_l)
        normal = self.iface_normals[idx]
        return normal if self.iface_cells[idx, 0] == cell_k else -normal

    def graph_laplacian(self) -> sp.csr_matrix:
        """Sparse tau-weighted graph Laplacian (cached)."""
        cached = self._cache.get("laplacian")
        if cached is None:
            k, l = self.iface_cells[:, 0], self.iface_cells[:, 1]
            tau = self.transmissibilities
            n = self.n_cells
            rows = np.concatenate([k, l, k, l])
            cols = np.concatenate([k, l, l, k])
            data = np.concatenate([tau, tau, -tau, -tau])
            cached = sp.csr_matrix((data, (rows, cols)), shape=(n, n))
            self._cache["laplacian"] = cached
        return cached


def polygon_area(points: np.ndarray) -> float:
    """Signed shoelace area of a polygon given as (n, 2) vertices."""
    x, y = points[:, 0], points[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def polytope_measure(points: np.ndarray) -> float:
    """Measure of an interval (2, 1) or convex polygon (n, 2)."""
    if points.shape[1] == 1:
        return float(abs(points[1, 0] - points[0, 0]))
    return abs(polygon_area(points))


def polytope_diameter(points: np.ndarray) -> float:
    """Largest vertex-to-vertex distance."""
    diff = points[:, None, :] - points[None, :, :]
    return float(np.sqrt((diff ** 2).sum(axis=-1)).max())


def polygon_edges(points: np.ndarray) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Edges of a polygon (or the two end points of an interval)."""
    if points.shape[1] == 1:
        return [(points[0], points[0]), (points[1], points[1])]
    return [(points[i], points[(i + 1) % len(points)]) for i in range(len(points))]


def contains(points: np.ndarray, query: np.ndarray, tol: float = 0.0) -> np.ndarray:
    """Closed containment test of query points (P, d) in a convex polytope."""
    if points.shape[1] == 1:
        lo, hi = min(points[0, 0], points[1, 0]), max(points[0, 0], points[1, 0])
        return (query[:, 0] >= lo - tol) & (query[:, 0] <= hi + tol)
    inside = np.ones(query.shape[0], dtype=bool)
    orientation = np.sign(polygon_area(points)) or 1.0
    scale = polytope_diameter(points)
    for a, b in polygon_edges(points):
        edge = b - a
        rel = query - a
        cross = orientation * (edge[0] * rel[:, 1] - edge[1] * rel[:, 0])
        inside &= cross >= -tol * scale * np.linalg.norm(edge)
    return inside


def locate_points(mesh: AdmissibleMesh, query: Sequence) -> np.ndarray:
    """Cell id owning each query point, or -1 outside the domain.

    Cartesian meshes use half-open cells [a_i, b_i) per axis, the upper domain
    face belonging to the last cell. General meshes return the lowest cell id
    whose closure contains the point.
    """
    q = np.atleast_2d(np.asarray(query, dtype=float))
    if q.shape[1] != mesh.dim:
        q = q.reshape(-1, mesh.dim)

    if mesh.structure is not None:
        s = mesh.structure
        rel = (q - s.origin) / s.spacing
        index = np.floor(rel).astype(np.int64)
        shape = np.asarray(s.shape)
        upper = s.upper
        on_upper = np.isclose(q, upper, rtol=0.0, atol=1e-14 * np.abs(upper).max(initial=1.0))
        index = np.where(on_upper, shape - 1, index)
        inside = np.all((index >= 0) & (index < shape) & (q <= upper) & (q >= s.origin), axis=1)
        ids = np.full(q.shape[0], -1, dtype=np.int64)
        ids[inside] = s.cell_id(index[inside])
        return ids

    ids = np.full(q.shape[0], -1, dtype=np.int64)
    pending = np.ones(q.shape[0], dtype=bool)
    for cell, pts in enumerate(mesh.vertices):
        if not pending.any():
            break
        hit = np.zeros(q.shape[0], dtype=bool)
        hit[pending] = contains(pts, q[pending], tol=1e-12)
        ids[hit] = cell
        pending &= ~hit
    return ids
