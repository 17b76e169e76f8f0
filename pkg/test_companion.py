import numpy as np
import pytest

from coefficient_generator import random_pt_set
from coefficients import CoefficientSet
from companion import CompanionAssembler, assemble_companion, companion_trace_integral, i_power


def test_i_power_is_exact():
    assert i_power(0) == 1
    assert i_power(-1) == -1j
    assert i_power(-3) == 1j
    assert i_power(6) == -1


def test_first_order_scalar():
    A = assemble_companion(CoefficientSet.zeros(1, 1), 2.0 + 1.0j, 0.3).A
    np.testing.assert_allclose(A, [[-1j * (2.0 + 1.0j)]])


def test_second_order_with_constant_coefficients():
    # -y'' + i a y' + b y = lambda y  =>  y'' = i a y' + (b - lambda) y
    a, b, lam = 0.7, -1.3, 0.4 + 0.2j
    coefficients = CoefficientSet.from_constant_matrices([[[a]], [[b]]])
    A = assemble_companion(coefficients, lam, 0.0).A
    np.testing.assert_allclose(A, [[0.0, 1.0], [b - lam, 1j * a]])


def test_third_order_zero_potential():
    A = assemble_companion(CoefficientSet.zeros(3, 1), 1.0, 0.0).A
    np.testing.assert_allclose(A, [[0, 1, 0], [0, 0, 1], [1j, 0, 0]])


def test_block_layout_for_matrix_coefficients():
    coefficients = random_pt_set(3, 2, 1, 0.5, seed=4)
    lam = 0.3 - 0.1j
    x = 0.37
    A = CompanionAssembler(coefficients, lam)(x)
    P = coefficients.matrices_at(x)
    assert A.shape == (6, 6)
    np.testing.assert_allclose(A[0:2, 2:4], np.eye(2))
    np.testing.assert_allclose(A[2:4, 4:6], np.eye(2))
    np.testing.assert_allclose(A[4:6, 4:6], 1j * P[0])
    np.testing.assert_allclose(A[4:6, 2:4], P[1])
    np.testing.assert_allclose(A[4:6, 0:2], 1j * (lam * np.eye(2) - P[2]))


def test_trace_integral_examples():
    coefficients = CoefficientSet.from_constant_matrices([[[5.0]], [[0.0]], [[0.0]]])
    assert companion_trace_integral(coefficients, 3.0) == pytest.approx(5.0j)
    assert companion_trace_integral(CoefficientSet.zeros(2, 3), 1.0 + 4.0j) == 0
    assert companion_trace_integral(CoefficientSet.zeros(1, 2), 1.5) == pytest.approx(-3.0j)


@pytest.mark.parametrize("n,m", [(1, 2), (2, 2), (3, 1)])
def test_trace_integral_matches_sampled_trace(n, m):
    coefficients = random_pt_set(n, m, 2, 0.5, seed=n + 10 * m)
    lam = -0.8 + 0.6j
    assembler = CompanionAssembler(coefficients, lam)
    xs = np.arange(16) / 16.0
    sampled = np.mean([np.trace(assembler(x)) for x in xs])
    assert companion_trace_integral(coefficients, lam) == pytest.approx(sampled, abs=1e-12)
