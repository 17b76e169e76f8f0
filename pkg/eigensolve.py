"""
Dense complex eigenvalue and determinant kernel for the small (nm <= ~12)
matrices produced by the monodromy computation.
"""

import logging
import warnings
from typing import List, Sequence, Tuple

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from floquet_errors import EigensolverFailureError, MalformedInputError

logger = logging.getLogger(__name__)

_EPS = np.finfo(float).eps
# iterations without deflation before an exceptional shift is tried
_EXCEPTIONAL_EVERY = 10


def _as_square(M: np.ndarray) -> np.ndarray:
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise MalformedInputError(f"Expected a non-empty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise MalformedInputError("Matrix has non-finite entries")
    return M


def _wilkinson_shift(B: np.ndarray) -> complex:
    """Eigenvalue of the trailing 2x2 block closest to its last diagonal entry."""
    a, b = B[-2, -2], B[-2, -1]
    c, d = B[-1, -2], B[-1, -1]
    half_trace = 0.5 * (a + d)
    disc = np.sqrt(0.25 * (a - d) ** 2 + b * c)
    mu1, mu2 = half_trace + disc, half_trace - disc
    return mu1 if abs(mu1 - d) <= abs(mu2 - d) else mu2


def _qr_sweep(B: np.ndarray, shift: complex) -> None:
    """One shifted QR step B - sI = QR, B <- RQ + sI on a Hessenberg block, in place."""
    p = B.shape[0]
    B[np.diag_indices(p)] -= shift
    rotations = []
    for k in range(p - 1):
        x, y = B[k, k], B[k + 1, k]
        r = np.hypot(abs(x), abs(y))
        if r == 0.0:
            c, s = 1.0 + 0.0j, 0.0j
        else:
            c, s = x / r, y / r
        top, bottom = B[k, k:].copy(), B[k + 1, k:].copy()
        B[k, k:] = np.conj(c) * top + np.conj(s) * bottom
        B[k + 1, k:] = -s * top + c * bottom
        rotations.append((c, s))
    for k, (c, s) in enumerate(rotations):
        left, right = B[:k + 2, k].copy(), B[:k + 2, k + 1].copy()
        B[:k + 2, k] = c * left + s * right
        B[:k + 2, k + 1] = -np.conj(s) * left + np.conj(c) * right
    B[np.diag_indices(p)] += shift


def eigenvalues(M: np.ndarray, max_iterations: int = 0) -> np.ndarray:
    """
    All eigenvalues of M with algebraic multiplicity.

    Hessenberg reduction followed by Wilkinson-shifted complex QR with
    deflation on the active diagonal block.
    """
    M = _as_square(M)
    d = M.shape[0]
    if d == 1:
        return M[0].copy()
    H = scipy.linalg.hessenberg(M).astype(complex)
    cap = max_iterations or 60 * d
    norm = max(np.abs(H).max(), np.finfo(float).tiny)

    found: List[complex] = []
    hi = d - 1
    total = 0
    since_deflation = 0
    while hi >= 0:
        if hi == 0:
            found.append(H[0, 0])
            break
        lo = hi
        while lo > 0:
            scale = abs(H[lo, lo]) + abs(H[lo - 1, lo - 1])
            if scale == 0.0:
                scale = norm
            if abs(H[lo, lo - 1]) <= _EPS * scale:
                H[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            found.append(H[hi, hi])
            hi -= 1
            since_deflation = 0
            continue

        total += 1
        since_deflation += 1
        if total > cap:
            raise EigensolverFailureError(total - 1, d)
        block = H[lo:hi + 1, lo:hi + 1]
        if since_deflation % _EXCEPTIONAL_EVERY == 0:
            shift = block[-1, -1] + 0.75 * abs(block[-1, -2]) * np.exp(0.5j * since_deflation)
        else:
            shift = _wilkinson_shift(block)
        _qr_sweep(block, shift)
        H[lo:hi + 1, lo:hi + 1] = block

    logger.debug("QR converged for dimension %d in %d sweeps", d, total)
    return np.array(found[::-1], dtype=complex)


def determinant(M: np.ndarray) -> complex:
    """Determinant through pivoted LU; singular input gives 0."""
    M = _as_square(M)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(M, check_finite=False)
    swaps = int(np.count_nonzero(piv != np.arange(piv.size)))
    sign = -1.0 if swaps % 2 else 1.0
    return complex(sign * np.prod(np.diag(lu)))


def match_multisets(a: Sequence[complex], b: Sequence[complex]) -> Tuple[List[Tuple[int, int]], float]:
    """
    Pair two equally sized multisets of complex numbers and return the pairs
    and the worst per-pair residual |a_i - b_j| / max(1, |b_j|).

    The pairing minimises the total residual (optimal assignment); inputs are
    first ordered by (modulus, phase) so ties resolve deterministically.
    """
    a = np.asarray(a, dtype=complex).reshape(-1)
    b = np.asarray(b, dtype=complex).reshape(-1)
    if a.size != b.size:
        raise MalformedInputError(f"Multisets differ in size: {a.size} vs {b.size}")
    if a.size == 0:
        return [], 0.0
    order_a = np.lexsort((np.angle(a), np.abs(a)))
    order_b = np.lexsort((np.angle(b), np.abs(b)))
    sa, sb = a[order_a], b[order_b]
    cost = np.abs(sa[:, None] - sb[None, :]) / np.maximum(1.0, np.abs(sb))[None, :]
    rows, cols = linear_sum_assignment(cost)
    pairs = sorted((int(order_a[r]), int(order_b[c])) for r, c in zip(rows, cols))
    return pairs, float(cost[rows, cols].max())
