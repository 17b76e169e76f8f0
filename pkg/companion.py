"""
Companion linearization of

    i^n y^(n) + i^(n-1) P_1 y^(n-1) + ... + P_n y = lambda y

into x' = A(x, lambda) x with the stacked state (y, y', ..., y^(n-1)).
"""

from dataclasses import dataclass

import numpy as np

from coefficients import CoefficientProvider

_I_POWERS = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)


def i_power(k: int) -> complex:
    """i**k computed exactly from k mod 4."""
    return _I_POWERS[k % 4]


@dataclass(frozen=True, eq=False)
class CompanionMatrix:
    A: np.ndarray
    lam: complex
    x: float


class CompanionAssembler:
    """
    Precomputes the constant part of A(x, lambda) for one (set, lambda) pair so
    the integrator only pays for the last block row at each evaluation.
    """

    def __init__(self, coefficients: CoefficientProvider, lam: complex):
        self.coefficients = coefficients
        self.lam = complex(lam)
        n, m = coefficients.n, coefficients.m
        self.n, self.m = n, m
        self.dimension = n * m

        base = np.zeros((self.dimension, self.dimension), dtype=complex)
        for j in range(n - 1):
            base[j * m:(j + 1) * m, (j + 1) * m:(j + 2) * m] = np.eye(m)
        # lambda enters only the y-column of the last block row
        base[(n - 1) * m:, :m] += i_power(-n) * self.lam * np.eye(m)
        self._base = base

        # column block of y^(n-k) gets -i^(-k) P_k; column block of y gets -i^(-n) P_n
        self._scales = np.array([-i_power(-k) for k in range(1, n + 1)])
        self._columns = [n - k for k in range(1, n + 1)]

    def __call__(self, x: float) -> np.ndarray:
        mats = self.coefficients.matrices_at(x)
        A = self._base.copy()
        m = self.m
        last = slice((self.n - 1) * m, self.n * m)
        for k in range(self.n):
            col = self._columns[k]
            A[last, col * m:(col + 1) * m] += self._scales[k] * mats[k]
        return A


def assemble_companion(coefficients: CoefficientProvider, lam: complex, x: float) -> CompanionMatrix:
    """A(x, lambda) for the order-n equation."""
    return CompanionMatrix(A=CompanionAssembler(coefficients, lam)(x), lam=complex(lam), x=float(x))


def companion_trace_integral(coefficients: CoefficientProvider, lam: complex) -> complex:
    """Exact integral of trace A(x, lambda) over one period."""
    # only the y^(n-1) block of the last row sits on the diagonal; its coefficient is i*P_1
    trace = 1j * complex(np.trace(coefficients.mean_matrix(1)))
    if coefficients.n == 1:
        trace += -1j * complex(lam) * coefficients.m
    return trace
