"""
Mesh construction: Cartesian builders and assembly of polygonal cell lists.
"""

from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from src.fvpme.core.exceptions import InvalidGeometryError
from src.fvpme.core.logging import get_logger
from src.fvpme.mesh.geometry import (
    AdmissibleMesh,
    CartesianStructure,
    polygon_edges,
    polytope_diameter,
    polytope_measure,
)

logger = get_logger(__name__)

Box = Sequence[Tuple[float, float]]


def _normalize_box(domain_box: Union[Box, Tuple[float, float]]) -> np.ndarray:
    box = np.asarray(domain_box, dtype=float)
    if box.ndim == 1:
        box = box.reshape(1, 2)
    if box.shape[1] != 2 or box.shape[0] not in (1, 2):
        raise InvalidGeometryError(
            "domain box must be one (lo, hi) pair per axis in 1D or 2D",
            details={"shape": list(box.shape)}
        )
    extents = box[:, 1] - box[:, 0]
    if np.any(extents <= 0) or not np.all(np.isfinite(extents)):
        raise InvalidGeometryError(
            "domain box must have positive side lengths",
            details={"extents": extents.tolist()}
        )
    return box


def build_uniform_grid(
    domain_box: Union[Box, Tuple[float, float]],
    cells_per_axis: Union[int, Sequence[int]]
) -> AdmissibleMesh:
    """
    Build a uniform Cartesian mesh with centroid centers.

    Args:
        domain_box: (lo, hi) per axis, e.g. ``[(0, 1), (0, 1)]``
        cells_per_axis: cell count per axis (an int is accepted in 1D)

    Returns:
        Admissible mesh carrying its tensor structure
    """
    box = _normalize_box(domain_box)
    dim = box.shape[0]
    counts = np.atleast_1d(np.asarray(cells_per_axis, dtype=np.int64))
    if counts.shape[0] == 1 and dim > 1:
        counts = np.repeat(counts, dim)
    if counts.shape[0] != dim or np.any(counts < 1):
        raise InvalidGeometryError(
            "cells_per_axis must give at least one cell on each axis",
            details={"cells_per_axis": counts.tolist()}
        )

    origin = box[:, 0].copy()
    spacing = (box[:, 1] - box[:, 0]) / counts
    structure = CartesianStructure(origin=origin, spacing=spacing, shape=tuple(int(c) for c in counts))

    if dim == 1:
        mesh = _build_1d(structure)
    else:
        mesh = _build_2d(structure)

    logger.debug(
        "Built uniform grid",
        extra={"dim": dim, "cells": mesh.n_cells, "interfaces": mesh.n_interfaces}
    )
    return mesh


def _build_1d(s: CartesianStructure) -> AdmissibleMesh:
    n = s.shape[0]
    h = s.spacing[0]
    edges = s.axis_edges(0)
    centers = 0.5 * (edges[:-1] + edges[1:])
    vertices = tuple(np.array([[edges[i]], [edges[i + 1]]]) for i in range(n))

    k = np.arange(n - 1)
    iface_cells = np.stack([k, k + 1], axis=1)
    inner = edges[1:-1]
    iface_points = np.stack([inner, inner], axis=1)[:, :, None]

    return AdmissibleMesh(
        dim=1,
        centers=centers[:, None],
        measures=np.full(n, h),
        vertices=vertices,
        diameters=np.full(n, h),
        iface_cells=iface_cells,
        iface_measures=np.ones(n - 1),
        iface_distances=np.full(n - 1, h),
        iface_normals=np.ones((n - 1, 1)),
        iface_points=iface_points,
        boundary_cells=np.array([0, n - 1]) if n > 1 else np.array([0, 0]),
        boundary_measures=np.ones(2),
        domain_measure=float(h * n),
        structure=s,
    )


def _build_2d(s: CartesianStructure) -> AdmissibleMesh:
    nx, ny = s.shape
    hx, hy = s.spacing
    xe, ye = s.axis_edges(0), s.axis_edges(1)
    xc = 0.5 * (xe[:-1] + xe[1:])
    yc = 0.5 * (ye[:-1] + ye[1:])
    ii, jj = np.meshgrid(np.arange(nx), np.arange(ny), indexing="xy")
    ii, jj = ii.ravel(), jj.ravel()
    ids = ii + nx * jj

    centers = np.stack([xc[ii], yc[jj]], axis=1)
    vertices = tuple(
        np.array([
            [xe[i], ye[j]], [xe[i + 1], ye[j]], [xe[i + 1], ye[j + 1]], [xe[i], ye[j + 1]]
        ])
        for i, j in zip(ii, jj)
    )

    cells: List[np.ndarray] = []
    measures: List[np.ndarray] = []
    distances: List[np.ndarray] = []
    normals: List[np.ndarray] = []
    points: List[np.ndarray] = []

    # Faces normal to x
    mask = ii < nx - 1
    kx = ids[mask]
    cells.append(np.stack([kx, kx + 1], axis=1))
    measures.append(np.full(kx.size, hy))
    distances.append(np.full(kx.size, hx))
    normals.append(np.tile([1.0, 0.0], (kx.size, 1)))
    xf = xe[ii[mask] + 1]
    points.append(np.stack([
        np.stack([xf, ye[jj[mask]]], axis=1),
        np.stack([xf, ye[jj[mask] + 1]], axis=1),
    ], axis=1))

    # Faces normal to y
    mask = jj < ny - 1
    ky = ids[mask]
    cells.append(np.stack([ky, ky + nx], axis=1))
    measures.append(np.full(ky.size, hx))
    distances.append(np.full(ky.size, hy))
    normals.append(np.tile([0.0, 1.0], (ky.size, 1)))
    yf = ye[jj[mask] + 1]
    points.append(np.stack([
        np.stack([xe[ii[mask]], yf], axis=1),
        np.stack([xe[ii[mask] + 1], yf], axis=1),
    ], axis=1))

    left, right = ids[ii == 0], ids[ii == nx - 1]
    bottom, top = ids[jj == 0], ids[jj == ny - 1]
    boundary_cells = np.concatenate([left, right, bottom, top])
    boundary_measures = np.concatenate([
        np.full(left.size, hy), np.full(right.size, hy),
        np.full(bottom.size, hx), np.full(top.size, hx),
    ])

    return AdmissibleMesh(
        dim=2,
        centers=centers,
        measures=np.full(nx * ny, hx * hy),
        vertices=vertices,
        diameters=np.full(nx * ny, float(np.hypot(hx, hy))),
        iface_cells=np.concatenate(cells).astype(np.int64).reshape(-1, 2),
        iface_measures=np.concatenate(measures),
        iface_distances=np.concatenate(distances),
        iface_normals=np.concatenate(normals).reshape(-1, 2),
        iface_points=np.concatenate(points).reshape(-1, 2, 2),
        boundary_cells=boundary_cells,
        boundary_measures=boundary_measures,
        domain_measure=float(hx * nx * hy * ny),
        structure=s,
    )


def refine_uniform(mesh: AdmissibleMesh, factor: int = 2) -> AdmissibleMesh:
    """Refine a Cartesian mesh by an integer factor on every axis."""
    if mesh.structure is None:
        raise InvalidGeometryError("only Cartesian meshes can be refined uniformly")
    s = mesh.structure
    box = list(zip(s.origin.tolist(), s.upper.tolist()))
    return build_uniform_grid(box, [c * factor for c in s.shape])


def _same_point(a: np.ndarray, b: np.ndarray, tol: float) -> bool:
    return bool(np.all(np.abs(a - b) <= tol))


def _shared_face(
    verts_k: np.ndarray,
    verts_l: np.ndarray,
    tol: float
) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    """Common face of two cells: a shared endpoint in 1D, a shared edge in 2D."""
    if verts_k.shape[1] == 1:
        for p in verts_k:
            for r in verts_l:
                if _same_point(p, r, tol):
                    return p, p
        return None
    for a, b in polygon_edges(verts_k):
        for c, d in polygon_edges(verts_l):
            if (_same_point(a, d, tol) and _same_point(b, c, tol)) or (
                _same_point(a, c, tol) and _same_point(b, d, tol)
            ):
                return a, b
    return None


def assemble_mesh(
    dim: int,
    centers: np.ndarray,
    measures: np.ndarray,
    vertices: Sequence[np.ndarray],
    interfaces: Sequence[Tuple[int, int, float]],
) -> AdmissibleMesh:
    """
    Assemble a mesh from explicit cells and declared interfaces.

    Interface segments, distances, normals and transmissibilities are derived;
    polygon edges not used by a declared interface become boundary interfaces.

    Raises:
        InvalidGeometryError: empty cell list, degenerate cells, or a declared
            interface whose cells do not share a face
    """
    n = len(vertices)
    if n == 0:
        raise InvalidGeometryError("mesh has no cells")
    centers = np.asarray(centers, dtype=float).reshape(n, dim)
    measures = np.asarray(measures, dtype=float)
    verts = tuple(np.asarray(v, dtype=float).reshape(-1, dim) for v in vertices)
    if np.any(measures <= 0):
        bad = int(np.argmax(measures <= 0))
        raise InvalidGeometryError("cell measure must be positive", details={"cell": bad})

    scale = max(polytope_diameter(v) for v in verts)
    tol = 1e-9 * scale

    iface_cells, iface_measures, iface_points = [], [], []
    used: List[set] = [set() for _ in range(n)]
    for index, (k, l, m_kl) in enumerate(interfaces):
        k, l = int(k), int(l)
        if not (0 <= k < n and 0 <= l < n) or k == l:
            raise InvalidGeometryError(
                "interface references unknown cells",
                details={"interface": index, "cells": [k, l]}
            )
        if k > l:
            k, l = l, k
        face = _shared_face(verts[k], verts[l], tol)
        if face is None:
            raise InvalidGeometryError(
                "interface cells do not share a face",
                details={"interface": index, "cells": [k, l]}
            )
        iface_cells.append((k, l))
        iface_measures.append(float(m_kl))
        iface_points.append(np.stack(face))
        for cell in (k, l):
            for e, (a, b) in enumerate(polygon_edges(verts[cell])):
                if _same_point(a, face[0], tol) and _same_point(b, face[1], tol) or (
                    _same_point(a, face[1], tol) and _same_point(b, face[0], tol)
                ):
                    used[cell].add(e)

    boundary_cells, boundary_measures = [], []
    for cell, v in enumerate(verts):
        for e, (a, b) in enumerate(polygon_edges(v)):
            if e not in used[cell]:
                boundary_cells.append(cell)
                boundary_measures.append(1.0 if dim == 1 else float(np.linalg.norm(b - a)))

    cells_arr = np.asarray(iface_cells, dtype=np.int64).reshape(-1, 2)
    delta = centers[cells_arr[:, 1]] - centers[cells_arr[:, 0]]
    distances = np.linalg.norm(delta, axis=1)
    if np.any(distances <= 0):
        bad = int(np.argmax(distances <= 0))
        raise InvalidGeometryError("coincident cell centers", details={"interface": bad})

    return AdmissibleMesh(
        dim=dim,
        centers=centers,
        measures=measures,
        vertices=verts,
        diameters=np.array([polytope_diameter(v) for v in verts]),
        iface_cells=cells_arr,
        iface_measures=np.asarray(iface_measures, dtype=float),
        iface_distances=distances,
        iface_normals=delta / distances[:, None] if distances.size else np.zeros((0, dim)),
        iface_points=np.asarray(iface_points, dtype=float).reshape(-1, 2, dim),
        boundary_cells=np.asarray(boundary_cells, dtype=np.int64),
        boundary_measures=np.asarray(boundary_measures, dtype=float),
        domain_measure=float(sum(polytope_measure(v) for v in verts)),
    )
