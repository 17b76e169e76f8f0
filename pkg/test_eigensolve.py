import numpy as np
import pytest

from eigensolve import determinant, eigenvalues, match_multisets
from floquet_errors import EigensolverFailureError, MalformedInputError


def _assert_same_spectrum(computed, expected, tol):
    _, residual = match_multisets(computed, expected)
    assert residual <= tol


def test_one_by_one():
    np.testing.assert_allclose(eigenvalues(np.array([[2.5 - 1j]])), [2.5 - 1j])


def test_rotation_has_conjugate_pair():
    _assert_same_spectrum(eigenvalues(np.array([[0.0, -1.0], [1.0, 0.0]])), [1j, -1j], 1e-12)


def test_identity_and_triangular():
    _assert_same_spectrum(eigenvalues(np.eye(3)), [1, 1, 1], 1e-14)
    T = np.array([[1.0, 4.0, -2.0], [0.0, 3.0j, 5.0], [0.0, 0.0, -2.0]])
    _assert_same_spectrum(eigenvalues(T), [1.0, 3.0j, -2.0], 1e-12)


def test_defective_jordan_block():
    _assert_same_spectrum(eigenvalues(np.array([[2.0, 1.0], [0.0, 2.0]])), [2.0, 2.0], 1e-6)


@pytest.mark.parametrize("size,seed", [(3, 0), (6, 1), (9, 2), (12, 3)])
def test_random_complex_matrices_match_lapack(size, seed):
    rng = np.random.default_rng(seed)
    M = rng.normal(size=(size, size)) + 1j * rng.normal(size=(size, size))
    _assert_same_spectrum(eigenvalues(M), np.linalg.eigvals(M), 1e-10)


def test_widely_spread_moduli():
    # monodromies routinely mix moduli around e^{+-5}
    D = np.diag([np.exp(5.0), np.exp(-5.0), 1j, -1.0])
    rng = np.random.default_rng(4)
    Q, _ = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
    M = Q @ D @ Q.conj().T
    _assert_same_spectrum(eigenvalues(M), np.diag(D), 1e-10)


def test_iteration_cap():
    rng = np.random.default_rng(5)
    with pytest.raises(EigensolverFailureError):
        eigenvalues(rng.normal(size=(6, 6)) + 0j, max_iterations=1)


@pytest.mark.parametrize("bad", [np.zeros((2, 3)), np.zeros((0, 0)), np.array([[np.nan]])])
def test_malformed_matrices(bad):
    with pytest.raises(MalformedInputError):
        eigenvalues(bad)
    with pytest.raises(MalformedInputError):
        determinant(bad)


def test_determinant():
    rng = np.random.default_rng(6)
    M = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    assert determinant(M) == pytest.approx(np.linalg.det(M), rel=1e-12)
    assert determinant(np.array([[0.0, 1.0], [1.0, 0.0]])) == pytest.approx(-1.0)
    assert determinant(np.array([[1.0, 2.0], [2.0, 4.0]])) == pytest.approx(0.0, abs=1e-15)


def test_match_multisets_pairs_and_residual():
    pairs, residual = match_multisets([1.0, 2j], [2j + 1e-9, 1.0])
    assert pairs == [(0, 1), (1, 0)]
    assert residual == pytest.approx(1e-9 / 2.0, rel=1e-6)


def test_match_multisets_edge_cases():
    assert match_multisets([], []) == ([], 0.0)
    with pytest.raises(MalformedInputError):
        match_multisets([1.0], [1.0, 2.0])
