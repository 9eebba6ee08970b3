"""
Exact reference solutions.

barenblatt: self-similar solution of d_t u = div grad(|u|^(q-1) u),

    u(x, t) = s^-alpha (C - kappa |x - x_c|^2 s^(-2 beta))_+^(1 / (q-1)),   s = t + t0,
    alpha = d / (d (q-1) + 2),  beta = alpha / d,  kappa = alpha (q-1) / (2 d q),

with C fixed by the mass.

heat_sine: separable solution of the heat equation (q = 1) with zero flux
on the faces of a box, varying along the first axis.
"""

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.special import gamma

from src.fvpme.core.enums import ReferenceKind
from src.fvpme.core.exceptions import ValidationError
from src.fvpme.core.logging import get_logger
from src.fvpme.mesh.geometry import AdmissibleMesh

logger = get_logger(__name__)

Evaluator = Callable[[np.ndarray, float], np.ndarray]
Box = Tuple[np.ndarray, np.ndarray]


@dataclass(frozen=True, eq=False)
class ReferenceSolution:
    """
    Exact solution on solver time t in [0, T].

    Attributes:
        kind: barenblatt or heat_sine
        q: exponent the reference solves
        dim: space dimension
        evaluator: (points (P, d), t) -> values (P,)
        support_radius: t -> radius of the support, None when unbounded
        center: center of the support
        params: constants of the closed form
    """

    kind: ReferenceKind
    q: float
    dim: int
    evaluator: Evaluator
    support_radius: Optional[Callable[[float], float]] = None
    center: Optional[np.ndarray] = None
    params: Dict[str, Any] = field(default_factory=dict)

    def __call__(self, points: np.ndarray, t: float) -> np.ndarray:
        return self.evaluator(np.atleast_2d(np.asarray(points, dtype=float)), float(t))

    def at(self, t: float) -> Callable[[np.ndarray], np.ndarray]:
        """Snapshot x -> u(x, t)."""
        return lambda points: self(points, t)

    def certificate(self, domain_box: Box, T: float) -> bool:
        """True when the support stays inside the box over [0, T]."""
        if self.support_radius is None:
            return True
        lo, hi = (np.asarray(b, dtype=float) for b in domain_box)
        # The support grows in time
        radius = self.support_radius(T)
        return bool(np.all(self.center - radius > lo) and np.all(self.center + radius < hi))


def mesh_box(mesh: AdmissibleMesh) -> Box:
    """Bounding box of the mesh vertices."""
    points = np.concatenate(mesh.vertices)
    return points.min(axis=0), points.max(axis=0)


def barenblatt_exponents(q: float, d: int) -> Tuple[float, float, float]:
    """(alpha, beta, kappa)."""
    alpha = d / (d * (q - 1.0) + 2.0)
    beta = alpha / d
    kappa = alpha * (q - 1.0) / (2.0 * d * q)
    return alpha, beta, kappa


def barenblatt_constant(q: float, d: int, mass: float = 1.0) -> float:
    """C such that the profile carries the given mass."""
    _, _, kappa = barenblatt_exponents(q, d)
    p = 1.0 / (q - 1.0)
    unit = kappa ** (-0.5 * d) * np.pi ** (0.5 * d) * gamma(p + 1.0) / gamma(p + 1.0 + 0.5 * d)
    return float((mass / unit) ** (1.0 / (p + 0.5 * d)))


def barenblatt(
    q: float,
    d: int,
    t0: float,
    mass: float = 1.0,
    center: Optional[Sequence[float]] = None
) -> ReferenceSolution:
    """
    Barenblatt profile shifted by t0 in time.

    Raises:
        ValidationError: q <= 1, t0 <= 0, mass <= 0 or d not in {1, 2}
    """
    if not q > 1.0:
        raise ValidationError("Barenblatt profiles need q > 1", details={"q": q})
    if not t0 > 0:
        raise ValidationError("time offset must be positive", details={"t0": t0})
    if not mass > 0:
        raise ValidationError("mass must be positive", details={"mass": mass})
    if d not in (1, 2):
        raise ValidationError("dimension must be 1 or 2", details={"d": d})

    alpha, beta, kappa = barenblatt_exponents(q, d)
    C = barenblatt_constant(q, d, mass)
    x_c = np.zeros(d) if center is None else np.asarray(center, dtype=float).reshape(d)
    power = 1.0 / (q - 1.0)

    def evaluate(points: np.ndarray, t: float) -> np.ndarray:
        s = t + t0
        r2 = np.sum((points - x_c) ** 2, axis=1)
        core = np.clip(C - kappa * r2 * s ** (-2.0 * beta), 0.0, None)
        return s ** (-alpha) * core ** power

    def radius(t: float) -> float:
        return float(np.sqrt(C / kappa) * (t + t0) ** beta)

    return ReferenceSolution(
        kind=ReferenceKind.BARENBLATT,
        q=float(q),
        dim=d,
        evaluator=evaluate,
        support_radius=radius,
        center=x_c,
        params={"alpha": alpha, "beta": beta, "kappa": kappa, "C": C, "t0": t0, "mass": mass},
    )


def heat_sine(
    domain_box: Box,
    amplitude: float = 1.0,
    offset: float = 0.0,
    mode: int = 1
) -> ReferenceSolution:
    """
    offset + amplitude cos(k pi (x - a) / L) exp(-(k pi / L)^2 t) along the first axis.

    Raises:
        ValidationError: mode < 1 or a degenerate box
    """
    if mode < 1:
        raise ValidationError("mode must be at least 1", details={"mode": mode})
    lo, hi = (np.atleast_1d(np.asarray(b, dtype=float)) for b in domain_box)
    length = float(hi[0] - lo[0])
    if not length > 0:
        raise ValidationError("domain box must have positive extent")
    wave = mode * np.pi / length

    def evaluate(points: np.ndarray, t: float) -> np.ndarray:
        return offset + amplitude * np.cos(wave * (points[:, 0] - lo[0])) * np.exp(-wave ** 2 * t)

    return ReferenceSolution(
        kind=ReferenceKind.HEAT_SINE,
        q=1.0,
        dim=lo.size,
        evaluator=evaluate,
        params={"amplitude": amplitude, "offset": offset, "mode": mode, "length": length},
    )


def pde_residual(
    reference: ReferenceSolution,
    points: np.ndarray,
    t: float,
    rel_step: float = 1e-3
) -> np.ndarray:
    """
    Relative residual |d_t u - lap psi(u)| / (|d_t u| + |lap psi(u)|) by
    central differences; points must stay away from the free boundary.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    q = reference.q
    s = t + reference.params.get("t0", 1.0)
    dt = rel_step * s
    length = reference.support_radius(t) if reference.support_radius else reference.params["length"]
    dx = rel_step * length

    def psi_u(x: np.ndarray) -> np.ndarray:
        u = reference(x, t)
        return np.abs(u) ** (q - 1.0) * u

    time_derivative = (reference(points, t + dt) - reference(points, t - dt)) / (2.0 * dt)
    laplacian = np.zeros(points.shape[0])
    centre = psi_u(points)
    for axis in range(reference.dim):
        shift = np.zeros(reference.dim)
        shift[axis] = dx
        laplacian += (psi_u(points + shift) - 2.0 * centre + psi_u(points - shift)) / dx ** 2
    scale = np.abs(time_derivative) + np.abs(laplacian)
    return np.abs(time_derivative - laplacian) / np.where(scale > 0, scale, 1.0)


def interior_samples(
    reference: ReferenceSolution,
    t: float,
    count: int,
    rng: np.random.Generator,
    fraction: float = 0.8
) -> np.ndarray:
    """Random points inside fraction * support radius around the center."""
    radius = fraction * reference.support_radius(t)
    directions = rng.normal(size=(count, reference.dim))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    radii = radius * rng.uniform(0.05, 1.0, size=(count, 1)) ** (1.0 / reference.dim)
    return reference.center + radii * directions
