"""
Executable admissibility checks for finite-volume meshes.

Every check reports a worst-case relative residual and, on failure, the
offending cell or interface so callers can build diagnostics.
"""

from typing import Optional, Tuple

import numpy as np

from src.fvpme.config import settings
from src.fvpme.core.enums import CheckStatus
from src.fvpme.core.logging import get_logger
from src.fvpme.core.schemas import CheckResult
from src.fvpme.mesh.geometry import AdmissibleMesh, contains, polytope_measure
from src.fvpme.mesh.schemas import ValidationReport

logger = get_logger(__name__)


def _result(name: str, residual: float, tol: float, worst: Optional[int], label: str) -> CheckResult:
    ok = bool(residual <= tol)
    return CheckResult(
        name=name,
        status=CheckStatus.PASS if ok else CheckStatus.FAIL,
        residual=float(residual),
        detail=None if ok or worst is None else f"{label} {worst}",
    )


def _worst(values: np.ndarray) -> Tuple[float, Optional[int]]:
    if values.size == 0:
        return 0.0, None
    idx = int(np.argmax(values))
    return float(values[idx]), idx


def _perpendicular_distances(mesh: AdmissibleMesh, cells: np.ndarray) -> np.ndarray:
    """Distance from each center to the line carrying its interface (2D)."""
    p0, p1 = mesh.iface_points[:, 0, :], mesh.iface_points[:, 1, :]
    edge = p1 - p0
    rel = mesh.centers[cells] - p0
    cross = edge[:, 0] * rel[:, 1] - edge[:, 1] * rel[:, 0]
    return np.abs(cross) / np.linalg.norm(edge, axis=1)


def validate_admissible(
    mesh: AdmissibleMesh,
    orthogonality_tol: Optional[float] = None,
    measure_tol: Optional[float] = None,
) -> ValidationReport:
    """
    Check a mesh against the admissibility conditions of the two-point scheme.

    Args:
        mesh: mesh to check
        orthogonality_tol: relative tolerance of the orthogonality test
        measure_tol: relative tolerance of measure identities

    Returns:
        Report with one entry per check plus h and rho
    """
    ortho_tol = orthogonality_tol if orthogonality_tol is not None else settings.mesh.orthogonality_tol
    meas_tol = measure_tol if measure_tol is not None else settings.mesh.measure_tol
    checks = []

    total = float(mesh.measures.sum())
    checks.append(_result(
        "measure_sum",
        abs(total - mesh.domain_measure) / mesh.domain_measure,
        meas_tol, None, "domain",
    ))

    geometric = np.array([polytope_measure(v) for v in mesh.vertices])
    residual, worst = _worst(np.abs(geometric - mesh.measures) / geometric)
    checks.append(_result("cell_measures", residual, meas_tol, worst, "cell"))

    inside = np.array([
        bool(contains(v, mesh.centers[k:k + 1], tol=1e-12)[0])
        for k, v in enumerate(mesh.vertices)
    ])
    outside = np.nonzero(~inside)[0]
    checks.append(_result(
        "center_inside",
        float(outside.size), 0.0,
        int(outside[0]) if outside.size else None, "cell",
    ))

    tau = mesh.transmissibilities if mesh.n_interfaces else np.zeros(0)
    bad = np.nonzero(
        (mesh.iface_measures <= 0) | (mesh.iface_distances <= 0) | ~(tau > 0)
    )[0]
    checks.append(_result(
        "positivity",
        float(bad.size), 0.0,
        int(bad[0]) if bad.size else None, "interface",
    ))

    k, l = mesh.iface_cells[:, 0], mesh.iface_cells[:, 1]
    pairs = k * mesh.n_cells + l
    _, first = np.unique(pairs, return_index=True)
    dup = np.setdiff1d(np.arange(pairs.size), first)
    checks.append(_result(
        "unique_interfaces",
        float(dup.size), 0.0,
        int(dup[0]) if dup.size else None, "interface",
    ))

    if mesh.dim == 1 or mesh.n_interfaces == 0:
        between = np.zeros(mesh.n_interfaces)
        if mesh.n_interfaces:
            x = mesh.iface_points[:, 0, 0]
            lo = np.minimum(mesh.centers[k, 0], mesh.centers[l, 0])
            hi = np.maximum(mesh.centers[k, 0], mesh.centers[l, 0])
            between = np.maximum(lo - x, x - hi).clip(min=0.0) / mesh.iface_distances
        residual, worst = _worst(between)
        checks.append(_result("orthogonality", residual, ortho_tol, worst, "interface"))
        residual, worst = _worst(np.abs(mesh.iface_measures - 1.0))
        checks.append(_result("interface_measures", residual, meas_tol, worst, "interface"))
        geometric_diamond = mesh.iface_distances
    else:
        edge = mesh.iface_points[:, 1, :] - mesh.iface_points[:, 0, :]
        edge_len = np.linalg.norm(edge, axis=1)
        delta = mesh.centers[l] - mesh.centers[k]
        cosine = np.abs((delta * edge).sum(axis=1)) / (edge_len * mesh.iface_distances)
        residual, worst = _worst(cosine)
        checks.append(_result("orthogonality", residual, ortho_tol, worst, "interface"))
        residual, worst = _worst(np.abs(mesh.iface_measures - edge_len) / edge_len)
        checks.append(_result("interface_measures", residual, meas_tol, worst, "interface"))
        # Two triangles (x_K, sigma) and (x_L, sigma)
        geometric_diamond = 0.5 * edge_len * (
            _perpendicular_distances(mesh, k) + _perpendicular_distances(mesh, l)
        )

    diamonds = mesh.diamond_measures
    residual, worst = _worst(np.abs(geometric_diamond - diamonds) / np.where(diamonds > 0, diamonds, 1.0))
    checks.append(_result("diamond_identity", residual, max(ortho_tol, meas_tol) * 10, worst, "interface"))

    excess = max(0.0, float(diamonds.sum()) - mesh.domain_measure) / mesh.domain_measure
    checks.append(_result("diamond_cover", excess, meas_tol, None, "domain"))

    report = ValidationReport(
        dim=mesh.dim,
        n_cells=mesh.n_cells,
        n_interfaces=mesh.n_interfaces,
        h=mesh.h,
        rho=mesh.rho,
        checks=checks,
    )
    logger.debug(
        "Validated mesh",
        extra={"cells": mesh.n_cells, "passed": report.passed, "h": report.h, "rho": report.rho}
    )
    return report
