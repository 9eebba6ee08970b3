"""
Unit tests for monotone graphs.

Tests power laws, piecewise graphs, resolvents and the scalar inequalities.
"""

import numpy as np
import pytest

from src.fvpme.core.exceptions import StructuralError, ValidationError
from src.fvpme.graphs.base import FunctionGraph, InverseGraph
from src.fvpme.graphs.inequalities import bdf2_multiplier_gap, cs_gap, euler_multiplier_gap
from src.fvpme.graphs.piecewise import PiecewiseGraph, identity_graph, stefan_graph
from src.fvpme.graphs.power_law import PowerLaw, dpsi, phi, psi, psi_inverse


@pytest.mark.unit
@pytest.mark.parametrize("u,q,expected", [
    (2.0, 2.0, 4.0),
    (-2.0, 2.0, -4.0),
    (0.5, 3.0, 0.125),
    (-1.5, 1.0, -1.5),
])
def test_psi_values(u, q, expected):
    """Test psi(u) = |u|^(q-1) u."""
    # ASSERT
    assert float(psi(u, q)) == pytest.approx(expected)


@pytest.mark.unit
@pytest.mark.parametrize("q", [1.0, 1.5, 2.0, 3.0])
def test_kirchhoff_derivative_squares_to_psi_derivative(q):
    """Test phi'(u)^2 = psi'(u) by central differences."""
    # ARRANGE
    u = np.linspace(-2.0, 2.0, 41)
    u = u[np.abs(u) > 0.05]
    step = 1e-6

    # ACT
    derivative = (phi(u + step, q) - phi(u - step, q)) / (2.0 * step)

    # ASSERT
    np.testing.assert_allclose(derivative ** 2, dpsi(u, q), rtol=1e-6)


@pytest.mark.unit
def test_exponent_below_one_is_rejected():
    """Test that q < 1 raises a validation error."""
    # ACT & ASSERT
    with pytest.raises(ValidationError):
        PowerLaw(0.5)


@pytest.mark.unit
@pytest.mark.parametrize("q,lam,y,expected", [
    (2.0, 1.0, 2.0, 1.0),
    (2.0, 1.0, -2.0, -1.0),
    (1.0, 3.0, 4.0, 1.0),
    (3.0, 2.0, 0.0, 0.0),
])
def test_power_law_resolvent(q, lam, y, expected):
    """Test the unique u with u + lam psi(u) = y."""
    # ACT
    u = PowerLaw(q).resolvent(lam, y)

    # ASSERT
    assert u == pytest.approx(expected, abs=1e-13)


@pytest.mark.unit
def test_resolvent_requires_positive_lambda():
    """Test that lam <= 0 raises a validation error."""
    # ACT & ASSERT
    with pytest.raises(ValidationError):
        PowerLaw(2.0).resolvent(0.0, 1.0)
    with pytest.raises(ValidationError):
        stefan_graph(1.0).resolvent(-1.0, 1.0)


@pytest.mark.unit
def test_power_law_resolvent_solves_equation(power_law, rng):
    """Test the vectorized resolvent against its defining equation."""
    # ARRANGE
    lam = rng.uniform(0.01, 100.0, 1000)
    y = rng.uniform(-10.0, 10.0, 1000)

    # ACT
    u = power_law.resolvent_many(lam, y)

    # ASSERT
    np.testing.assert_allclose(u + lam * power_law.psi(u), y, atol=1e-11)


@pytest.mark.unit
def test_power_law_resolvent_reports_non_convergence():
    """Test that an iteration cap too small for Newton is an error, not a silent result."""
    # ARRANGE
    graph = PowerLaw(2.0, max_iter=1)

    # ACT & ASSERT
    with pytest.raises(StructuralError) as exc_info:
        graph.resolvent_many(1.0, np.array([5.0, -0.5]))
    assert exc_info.value.details["max_iter"] == 1
    assert exc_info.value.details["max_step"] > 0.0


@pytest.mark.unit
def test_resolvent_is_nonexpansive(power_law, rng):
    """Test |R(y1) - R(y2)| <= |y1 - y2|."""
    # ARRANGE
    lam = rng.uniform(0.1, 10.0, 2000)
    y1 = rng.uniform(-5.0, 5.0, 2000)
    y2 = rng.uniform(-5.0, 5.0, 2000)

    # ACT
    gap = np.abs(power_law.resolvent_many(lam, y1) - power_law.resolvent_many(lam, y2))

    # ASSERT
    assert np.all(gap <= np.abs(y1 - y2) + 1e-12)


@pytest.mark.unit
@pytest.mark.parametrize("y,expected", [
    (0.5, 0.0),
    (1.0, 0.0),
    (3.0, 1.0),
    (-2.0, -1.0),
])
def test_stefan_resolvent(y, expected):
    """Test the resolvent through the vertical segment at 0."""
    # ACT
    u = stefan_graph(1.0).resolvent(1.0, y)

    # ASSERT
    assert u == pytest.approx(expected, abs=1e-12)


@pytest.mark.unit
def test_stefan_graph_membership():
    """Test beta(0) = [0, L] and single values elsewhere."""
    # ARRANGE
    graph = stefan_graph(2.0)

    # ASSERT
    assert graph.contains(0.0, 1.5)
    assert not graph.contains(0.0, 2.5)
    assert float(graph.lower(1.0)) == pytest.approx(3.0)
    assert float(graph.upper(-1.0)) == pytest.approx(-1.0)
    assert graph.is_monotone(np.linspace(-3.0, 3.0, 61))


@pytest.mark.unit
def test_stefan_inverse_has_flat_part():
    """Test that the inverse swaps the vertical segment into a horizontal one."""
    # ACT
    inverse = stefan_graph(1.0).inverse()

    # ASSERT
    assert float(inverse(0.5)) == pytest.approx(0.0)
    assert float(inverse(3.0)) == pytest.approx(2.0)
    assert float(inverse(-1.0)) == pytest.approx(-1.0)


@pytest.mark.unit
def test_piecewise_graph_rejects_decreasing_breakpoints():
    """Test the monotonicity precondition of breakpoints."""
    # ACT & ASSERT
    with pytest.raises(ValidationError):
        PiecewiseGraph([(0.0, 1.0), (1.0, 0.0)])


@pytest.mark.unit
def test_power_law_inverse_is_closed_form():
    """Test psi^-1 through the graph inverse."""
    # ACT
    inverse = PowerLaw(2.0).inverse()

    # ASSERT
    assert float(inverse(4.0)) == pytest.approx(2.0)
    assert float(psi_inverse(-8.0, 3.0)) == pytest.approx(-2.0)


@pytest.mark.unit
def test_inverse_graph_by_root_finding():
    """Test the bracketed inverse of a function without a closed-form inverse."""
    # ARRANGE
    graph = FunctionGraph(lambda u: u ** 3 + u)

    # ACT
    inverse = graph.inverse()

    # ASSERT
    assert isinstance(inverse, InverseGraph)
    assert float(inverse.lower(10.0)) == pytest.approx(2.0, abs=1e-10)
    assert inverse.inverse() is graph


@pytest.mark.unit
def test_identity_decomposition_splits_in_half():
    """Test w = A(w) + B(w) with A = B = w / 2 for beta = Id."""
    # ARRANGE
    w = np.array([-2.0, 0.0, 1.0, 3.0])

    # ACT
    a, b = identity_graph().decompose_AB(w)

    # ASSERT
    np.testing.assert_allclose(a, w / 2.0, atol=1e-12)
    np.testing.assert_allclose(b, w / 2.0, atol=1e-12)


@pytest.mark.unit
def test_decomposition_lies_on_the_graph(power_law, rng):
    """Test a in beta(b) for the A/B decomposition."""
    # ARRANGE
    w = rng.uniform(-5.0, 5.0, 200)

    # ACT
    a, b = power_law.decompose_AB(w)

    # ASSERT
    np.testing.assert_allclose(a + b, w, atol=1e-12)
    np.testing.assert_allclose(a, power_law.psi(b), atol=1e-10)


@pytest.mark.unit
@pytest.mark.parametrize("q", [1.5, 2.0, 3.0])
def test_cs_gap_is_nonnegative(q, rng):
    """Test (a - b)(psi(a) - psi(b)) >= (phi(a) - phi(b))^2."""
    # ARRANGE
    a = rng.uniform(-10.0, 10.0, 100_000)
    b = rng.uniform(-10.0, 10.0, 100_000)

    # ACT
    gap = cs_gap(a, b, q)

    # ASSERT
    scale = np.abs(a - b) * (np.abs(psi(a, q)) + np.abs(psi(b, q)))
    assert np.all(gap >= -1e-13 * (scale + 1e-300))


@pytest.mark.unit
def test_bdf2_multiplier_gap_is_a_square(rng):
    """Test the BDF2 multiplier identity against (a - 2b + c)^2 / 4."""
    # ARRANGE
    a, b, c = (rng.uniform(-3.0, 3.0, 100_000) for _ in range(3))

    # ACT
    gap = bdf2_multiplier_gap(a, b, c)

    # ASSERT
    np.testing.assert_allclose(gap, 0.25 * (a - 2.0 * b + c) ** 2, atol=1e-12)


@pytest.mark.unit
def test_euler_multiplier_gap_is_a_square(rng):
    """Test (a - b) a - a^2/2 + b^2/2 = (a - b)^2 / 2."""
    # ARRANGE
    a, b = rng.normal(size=1000), rng.normal(size=1000)

    # ACT
    gap = euler_multiplier_gap(a, b)

    # ASSERT
    np.testing.assert_allclose(gap, 0.5 * (a - b) ** 2, atol=1e-12)
