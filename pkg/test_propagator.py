import numpy as np
import pytest
import scipy.linalg

from coefficient_generator import random_pt_set
from coefficients import CoefficientSet
from companion import assemble_companion
from floquet_errors import IntegrationFailureError, ParameterError
from propagator import (
    DEFAULT_SETTINGS,
    IntegratorSettings,
    canonical_boundary_matrix,
    integrate_fundamental,
    integrate_interval,
    trajectory,
)


def test_scalar_monodromy_closed_form():
    X1 = integrate_fundamental(CoefficientSet.zeros(1, 1), np.pi).X1
    assert X1[0, 0] == pytest.approx(-1.0, abs=1e-8)


def test_hill_operator_zero_potential_below_the_spectrum():
    X1 = integrate_fundamental(CoefficientSet.zeros(2, 1), -1.0).X1
    expected = [[np.cosh(1.0), np.sinh(1.0)], [np.sinh(1.0), np.cosh(1.0)]]
    np.testing.assert_allclose(X1, expected, atol=1e-8)


def test_constant_coefficients_match_matrix_exponential():
    rng = np.random.default_rng(0)
    coefficients = CoefficientSet.from_constant_matrices(rng.uniform(-1, 1, (2, 2, 2)))
    lam = 0.7 - 0.4j
    X1 = integrate_fundamental(coefficients, lam).X1
    expected = scipy.linalg.expm(assemble_companion(coefficients, lam, 0.0).A)
    np.testing.assert_allclose(X1, expected, rtol=1e-8, atol=1e-9)


def test_backward_then_forward_returns_to_identity():
    coefficients = random_pt_set(2, 2, 2, 0.5, seed=1)
    lam = 1.2 + 0.3j
    identity = np.eye(4, dtype=complex)
    back = integrate_interval(coefficients, lam, 0.0, -1.0, identity)
    again = integrate_interval(coefficients, lam, -1.0, 0.0, back)
    np.testing.assert_allclose(again, identity, atol=1e-8)


def test_zero_length_interval_is_identity():
    M0 = np.arange(4, dtype=complex).reshape(2, 2)
    out = integrate_interval(CoefficientSet.zeros(2, 1), 1.0, 0.5, 0.5, M0)
    np.testing.assert_array_equal(out, M0)


def test_step_budget_is_enforced():
    settings = IntegratorSettings(max_steps=3)
    with pytest.raises(IntegrationFailureError) as info:
        integrate_fundamental(random_pt_set(2, 1, 2, 0.5, seed=2), 3.0, settings)
    assert 0.0 <= info.value.last_x < 1.0


@pytest.mark.parametrize("kwargs", [{"rel_tol": 0.0}, {"abs_tol": -1e-9}, {"initial_step": 0.0}, {"max_steps": 0}])
def test_settings_validation(kwargs):
    with pytest.raises(ParameterError):
        IntegratorSettings(**kwargs)


def test_scaled_settings():
    halved = DEFAULT_SETTINGS.scaled(0.5)
    assert halved.rel_tol == pytest.approx(5e-11)
    assert halved.abs_tol == pytest.approx(5e-11)
    assert halved.max_steps == DEFAULT_SETTINGS.max_steps


def test_trajectory_samples_the_solution():
    lam = 1.0
    traj = trajectory(CoefficientSet.zeros(1, 1), lam, [1.0], 0.0, 1.0, 11)
    np.testing.assert_allclose(traj.x, np.linspace(0.0, 1.0, 11))
    np.testing.assert_allclose(traj.component(0, 1)[:, 0], np.exp(-1j * lam * traj.x), atol=1e-9)


def test_trajectory_rejects_bad_input():
    with pytest.raises(ParameterError):
        trajectory(CoefficientSet.zeros(1, 1), 1.0, [1.0], 0.0, 1.0, 1)
    with pytest.raises(ParameterError):
        trajectory(CoefficientSet.zeros(2, 1), 1.0, [1.0], 0.0, 1.0, 5)


def test_boundary_matrix_shares_the_monodromy_layout():
    coefficients = random_pt_set(3, 1, 1, 0.5, seed=8)
    lam, t = 0.5 + 0.2j, 1.1
    boundary = canonical_boundary_matrix(coefficients, lam, t)
    X1 = integrate_fundamental(coefficients, lam).X1
    np.testing.assert_allclose(boundary, X1 - np.exp(1j * t) * np.eye(3), atol=1e-9)


def test_halving_tolerances_barely_moves_the_monodromy():
    coefficients = random_pt_set(2, 2, 2, 0.5, seed=21)
    lam = -0.6 + 0.5j
    coarse = integrate_fundamental(coefficients, lam).X1
    fine = integrate_fundamental(coefficients, lam, DEFAULT_SETTINGS.scaled(0.5)).X1
    assert np.abs(coarse - fine).max() < 1e-8
