"""
A priori estimates evaluated on discrete trajectories.

- energy ledgers of the implicit Euler and BDF2 steps and the energy bound
- L1 norms of psi(u) and of its discrete gradient, with the mean-value weights
- discrete weak formulation split into its three terms
- weak time-derivative estimate against projected test functions
"""

from typing import Callable, List, Tuple

import numpy as np

from src.fvpme.core.enums import TimeRule
from src.fvpme.core.logging import get_logger
from src.fvpme.discrete.fields import SpaceTimeField
from src.fvpme.discrete.operators import (
    gradient_l2_squared,
    gradient_sup_norm,
    interface_differences,
    project_test_function,
    space_time_lp_norm,
)
from src.fvpme.graphs.power_law import PowerLaw
from src.fvpme.solver.schemas import EnergyRecord, WeakFormResidual
from src.fvpme.time_algebra.apply import apply_delta, space_time_pairing, transform_test_vector
from src.fvpme.time_algebra.operator import MultistepOperator, build_bdf2_uniform, build_euler

logger = get_logger(__name__)

_EPS = float(np.finfo(float).eps)
_SQRT_EPS = float(np.sqrt(_EPS))
# Rounding of psi, phi and their differences, in ulps
_ROUNDING_ULPS = 8.0

TestFunction = Callable[[np.ndarray, float], np.ndarray]


def multistep_operator(field: SpaceTimeField, rule: TimeRule) -> MultistepOperator:
    """The operator matching the scheme that produced ``field``."""
    if TimeRule(rule) == TimeRule.EULER:
        return build_euler(field.grid)
    return build_bdf2_uniform(field.grid)


def dissipation(field: SpaceTimeField, graph: PowerLaw) -> np.ndarray:
    """dt_k sum tau (phi(u_K^k) - phi(u_L^k))^2 for k = 1..n."""
    diff = interface_differences(field.mesh, graph.phi(field.values[1:]))
    return field.grid.steps * (diff ** 2 @ field.mesh.transmissibilities)


def energy_functionals(
    field: SpaceTimeField,
    graph: PowerLaw,
    rule: TimeRule = TimeRule.BDF2
) -> List[EnergyRecord]:
    """
    Energy ledgers for every l = 0..n.

    The Euler inequality is recorded for step 1 (every step under the Euler
    rule); the telescoped BDF2 inequality for l >= 2 under the BDF2 rule.
    """
    m = field.mesh.measures
    u = field.values
    squares = (u ** 2) @ m
    dissipated = np.concatenate([[0.0], np.cumsum(dissipation(field, graph))])
    per_step = np.diff(dissipated)
    energy = 0.25 * squares + dissipated
    bound = 2.0 * squares[0]
    euler_everywhere = TimeRule(rule) == TimeRule.EULER

    bdf2_start = None
    if field.n >= 1:
        bdf2_start = 0.25 * (squares[1] + ((2.0 * u[1] - u[0]) ** 2) @ m)

    records = []
    for ell in range(field.n + 1):
        ledgers = {}
        if ell >= 1 and (ell == 1 or euler_everywhere):
            ledgers["euler_lhs"] = float(0.5 * squares[ell] + per_step[ell - 1])
            ledgers["euler_rhs"] = float(0.5 * squares[ell - 1])
        if ell >= 2 and not euler_everywhere:
            ledgers["bdf2_lhs"] = float(
                0.25 * (squares[ell] + ((2.0 * u[ell] - u[ell - 1]) ** 2) @ m)
                + dissipated[ell] - dissipated[1]
            )
            ledgers["bdf2_rhs"] = float(bdf2_start)
        records.append(EnergyRecord(step=ell, energy=float(energy[ell]), bound=float(bound), **ledgers))
    return records


def flux_l1_per_step(field: SpaceTimeField, graph: PowerLaw) -> np.ndarray:
    """dt_k sum m_KL |psi(u_K^k) - psi(u_L^k)| for k = 1..n."""
    diff = interface_differences(field.mesh, graph.psi(field.values[1:]))
    return field.grid.steps * (np.abs(diff) @ field.mesh.iface_measures)


def flux_l1_norm(field: SpaceTimeField, graph: PowerLaw) -> float:
    """||grad psi(u)||_L1(Q_T)."""
    return float(flux_l1_per_step(field, graph).sum())


def psi_l1_norm(field: SpaceTimeField, graph: PowerLaw) -> float:
    """||pi psi(u)||_L1(Q_T)."""
    return space_time_lp_norm(field, 1.0, slots=graph.psi(field.values[1:]))


def phi_l2_norm(field: SpaceTimeField, graph: PowerLaw) -> float:
    """||pi phi(u)||_L2(Q_T)."""
    return space_time_lp_norm(field, 2.0, slots=graph.phi(field.values[1:]))


def grad_phi_l2_norm(field: SpaceTimeField, graph: PowerLaw) -> float:
    """||grad phi(u)||_L2(Q_T)."""
    per_step = [gradient_l2_squared(field.mesh, graph.phi(field.values[k])) for k in range(1, field.n + 1)]
    return float(np.sqrt(field.grid.steps @ np.asarray(per_step)))


def u_lq1_norm(field: SpaceTimeField, graph: PowerLaw) -> float:
    """||pi u||_L^(q+1)(Q_T)."""
    return space_time_lp_norm(field, graph.q + 1.0)


def _weights(field: SpaceTimeField, graph: PowerLaw) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    mesh = field.mesh
    u = field.values[1:]
    u_k = u[..., mesh.iface_cells[:, 0]]
    u_l = u[..., mesh.iface_cells[:, 1]]
    psi_k, psi_l = graph.psi(u_k), graph.psi(u_l)
    phi_k, phi_l = graph.phi(u_k), graph.phi(u_l)
    d_psi = psi_l - psi_k
    d_phi = phi_l - phi_k
    half = 0.5 * (graph.q - 1.0)
    upper = np.sqrt(graph.q) * np.maximum(np.abs(u_k) ** half, np.abs(u_l) ** half)

    # Nearly equal pairs: the quotient is rounding noise, use sqrt(psi') at the midpoint
    phi_scale = np.maximum(np.abs(phi_k), np.abs(phi_l))
    close = np.abs(d_phi) <= _SQRT_EPS * phi_scale
    midpoint = np.sqrt(graph.q) * np.abs(0.5 * (u_k + u_l)) ** half
    with np.errstate(divide="ignore", invalid="ignore"):
        quotient = d_psi / d_phi
        eta = np.where(close, midpoint, quotient)
        psi_scale = np.maximum(np.abs(psi_k), np.abs(psi_l))
        rounding = np.where(
            close,
            0.0,
            _ROUNDING_ULPS * _EPS * (psi_scale + np.abs(eta) * phi_scale) / np.abs(d_phi),
        )
    return eta, upper, rounding


def mean_value_weights(field: SpaceTimeField, graph: PowerLaw) -> Tuple[np.ndarray, np.ndarray]:
    """
    eta_KL^k with psi_K - psi_L = eta (phi_K - phi_L), and its upper bound
    sqrt(q) max(|u_K|^((q-1)/2), |u_L|^((q-1)/2)); arrays of shape (n, E).

    Pairs with |phi_K - phi_L| at rounding level take sqrt(psi') at the
    midpoint instead of the quotient.
    """
    eta, upper, _ = _weights(field, graph)
    return eta, upper


def mean_value_weights_ok(field: SpaceTimeField, graph: PowerLaw, rtol: float = 1e-9) -> bool:
    """0 <= eta_KL^k <= its bound, up to rtol and the rounding bound of the quotient."""
    if field.mesh.n_interfaces == 0 or field.n == 0:
        return True
    eta, upper, rounding = _weights(field, graph)
    slack = rtol * np.maximum(1.0, upper) + rounding
    return bool(np.all(eta >= -slack) and np.all(eta <= upper + slack))


def weak_form_residual(
    field: SpaceTimeField,
    test_function: TestFunction,
    graph: PowerLaw,
    rule: TimeRule = TimeRule.BDF2
) -> WeakFormResidual:
    """
    Terms A, B, C of the discrete weak formulation.

    A pairs the multistep derivative with phihat = (Ahat^-1)^T P phi, B is the
    flux term against P phi and C the flux term against phihat - P phi. Their
    sum is sum_k dt sum_K phihat_K F_K(u^k), which vanishes up to the
    nonlinear solve residual.
    """
    mesh, grid = field.mesh, field.grid
    op = multistep_operator(field, rule)
    projected = project_test_function(mesh, grid, test_function)
    transformed = transform_test_vector(op, projected)

    derivative = apply_delta(op, field.values)
    a_term = space_time_pairing(grid, mesh.measures, derivative, transformed[1:])

    weights = grid.steps[:, None] * mesh.transmissibilities[None, :]
    d_psi = interface_differences(mesh, graph.psi(field.values[1:]))
    d_proj = interface_differences(mesh, projected[1:])
    d_corr = interface_differences(mesh, transformed[1:] - projected[1:])
    b_term = float(np.sum(weights * d_psi * d_proj))
    c_term = float(np.sum(weights * d_psi * d_corr))

    scale = float(
        np.einsum("k,kc,kc,c->", grid.steps, np.abs(derivative), np.abs(transformed[1:]), mesh.measures)
        + np.sum(weights * np.abs(d_psi) * np.abs(d_proj + d_corr))
    )
    corrector = max(
        (gradient_sup_norm(mesh, transformed[k] - projected[k]) for k in range(1, grid.n + 1)),
        default=0.0,
    )
    return WeakFormResidual(
        A=a_term,
        B=b_term,
        C=c_term,
        total=a_term + b_term + c_term,
        scale=scale,
        test_vector_gradient=corrector,
    )


def time_derivative_bound(
    field: SpaceTimeField,
    test_function: TestFunction,
    graph: PowerLaw,
    rule: TimeRule = TimeRule.BDF2
) -> Tuple[float, float]:
    """
    (|int int deltahat(u) pi P phi|, (1/d) ||grad psi(u)||_L1 max_k ||grad P phi^k||_inf).
    """
    mesh, grid = field.mesh, field.grid
    op = multistep_operator(field, rule)
    projected = project_test_function(mesh, grid, test_function)
    lhs = abs(space_time_pairing(grid, mesh.measures, apply_delta(op, field.values), projected[1:]))
    grad_sup = max((gradient_sup_norm(mesh, projected[k]) for k in range(1, grid.n + 1)), default=0.0)
    rhs = flux_l1_norm(field, graph) * grad_sup / mesh.dim
    return float(lhs), float(rhs)
